"""Average age-of-information analysis, optimization, and simulation for
parallel heterogeneous M/M/1 FCFS queues with probabilistic routing."""

from .analytic import (
    GammaParam,
    ServerLoad,
    SystemConfig,
    approx_mean_n,
    approx_mean_two,
    exact_mean,
    gamma_tail,
    single_server_mean,
    single_server_tail,
    theta_of,
)
from .exppoly import ExpSum, ExpTerm, canonicalize, evaluate, integrate, multiply
from .optimize import (
    RoutingSolution,
    gradient_check_at_optimum,
    minimize_exact,
    optimal_routing_approx,
    rho_star,
    symmetric_exact_optimum,
)
from .simulate import SimConfig, SimResult, empirical_tail, replicate, run

__version__ = "0.1.0"

__all__ = [
    "ExpSum",
    "ExpTerm",
    "GammaParam",
    "RoutingSolution",
    "ServerLoad",
    "SimConfig",
    "SimResult",
    "SystemConfig",
    "approx_mean_n",
    "approx_mean_two",
    "canonicalize",
    "empirical_tail",
    "evaluate",
    "exact_mean",
    "gamma_tail",
    "gradient_check_at_optimum",
    "integrate",
    "minimize_exact",
    "multiply",
    "optimal_routing_approx",
    "replicate",
    "rho_star",
    "run",
    "single_server_mean",
    "single_server_tail",
    "symmetric_exact_optimum",
    "theta_of",
]
