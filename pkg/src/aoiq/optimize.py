"""Routing and utilization optimization for the parallel-queue AoI model.

Covers the closed-form single-server optimum, the symmetric two-server
optimum (root of a degree-11 polynomial), the optimal routing rule under
the gamma approximation, and a derivative-free minimizer for the exact
AoI surface.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .analytic import (
    GammaParam,
    ServerLoad,
    approx_mean_n,
    approx_mean_two,
    exact_mean,
    single_server_mean,
    theta_of,
)

# Numerator of the derivative of the symmetric two-server AoI (mu=1) as a
# function of the common utilization x; coefficients from x^11 down to x^0.
# Denominator: 2 x^2 (x-2)^3 (x-1)^2 (x+1)^3, nonzero on (0,1).
SYMMETRIC_DERIVATIVE_NUMERATOR = (
    1.0, -5.0, 4.0, 24.0, -27.0, 30.0, -123.0, 169.0, -71.0, -14.0, -4.0, 8.0
)

RHO_MIN = 1e-3
RHO_MAX = 1.0 - 1e-3

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RoutingSolution:
    """An operating point: total arrival rate, routing split, predicted AoI."""

    arrival_rate: float
    alphas: tuple[float, ...]
    predicted_aoi: float
    per_server_rho: tuple[float, ...]


def rho_star() -> float:
    """Utilization minimizing the single-server M/M/1 average AoI.

    Closed form (1/2)(sqrt(2) + 1 - sqrt(2*sqrt(2) - 1)) ~ 0.531010; the
    unique root in (0,1) of (1 + rho^2)(1 - rho)^2 = rho^2.
    """
    return 0.5 * (math.sqrt(2.0) + 1.0 - math.sqrt(2.0 * math.sqrt(2.0) - 1.0))


def symmetric_derivative_numerator(x: float) -> float:
    """Numerator polynomial of the symmetric exact-AoI derivative."""
    val = 0.0
    for c in SYMMETRIC_DERIVATIVE_NUMERATOR:
        val = val * x + c
    return val


def symmetric_exact_optimum() -> float:
    """Common utilization minimizing the exact two-server AoI at mu1 = mu2.

    Bisects the derivative's numerator polynomial on (0,1); the root is
    ~0.533391, slightly above the single-server optimum.
    """
    lo, hi = 0.4, 0.7
    flo, fhi = symmetric_derivative_numerator(lo), symmetric_derivative_numerator(hi)
    while flo * fhi > 0.0:
        lo, hi = max(RHO_MIN, lo - 0.05), min(RHO_MAX, hi + 0.05)
        if lo <= RHO_MIN and hi >= RHO_MAX:
            raise ArithmeticError("no sign change for the symmetric-optimum bracket")
        flo, fhi = symmetric_derivative_numerator(lo), symmetric_derivative_numerator(hi)
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if symmetric_derivative_numerator(mid) * flo <= 0.0:
            hi = mid
        else:
            lo, flo = mid, symmetric_derivative_numerator(mid)
    return 0.5 * (lo + hi)


def optimal_routing_approx(mus: list[float]) -> RoutingSolution:
    """Routing minimizing the approximate AoI: every server at rho_star.

    Forcing alpha_i * lam / mu_i = rho* with sum(alpha) = 1 gives
    alpha_i = mu_i / sum(mu) and lam = rho* * sum(mu).
    """
    if not mus:
        raise ValueError("need at least one service rate")
    if any(m <= 0.0 for m in mus):
        raise ValueError("service rates must be positive")
    rs = rho_star()
    total = sum(mus)
    alphas = tuple(m / total for m in mus)
    lam = rs * total
    thetas = [theta_of(ServerLoad(rho=rs, mu=m)) for m in mus]
    return RoutingSolution(
        arrival_rate=lam,
        alphas=alphas,
        predicted_aoi=approx_mean_n(thetas),
        per_server_rho=tuple(rs for _ in mus),
    )


def _golden_min(f, lo: float, hi: float, tol: float = 1e-7) -> float:
    """Golden-section minimum of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def minimize_exact(mus: list[float], budget: float | None = None) -> RoutingSolution:
    """Minimize the exact AoI over per-server utilizations.

    Multi-start coordinate descent with golden-section line searches on
    rho_i in [RHO_MIN, RHO_MAX].  Starts: a 5-point grid per axis (for up
    to 4 servers; the diagonal otherwise) plus the all-rho_star point.
    With a budget, points violating sum(rho_i * mu_i) <= budget are
    rejected (objective = inf).
    """
    if not mus:
        raise ValueError("need at least one service rate")
    if any(m <= 0.0 for m in mus):
        raise ValueError("service rates must be positive")
    if budget is not None:
        if budget <= 0.0:
            raise ValueError("budget must be positive")
        if sum(RHO_MIN * m for m in mus) > budget:
            raise ValueError("infeasible budget: cannot keep every server active")
    n = len(mus)

    def objective(rhos: tuple[float, ...]) -> float:
        if budget is not None and sum(r * m for r, m in zip(rhos, mus)) > budget:
            return math.inf
        return exact_mean([ServerLoad(rho=r, mu=m) for r, m in zip(rhos, mus)])

    axis = [0.15, 0.35, 0.53, 0.70, 0.85]
    if n <= 4:
        starts = [tuple(pt) for pt in itertools.product(axis, repeat=n)]
    else:
        starts = [tuple(v for _ in range(n)) for v in axis]
    starts.append(tuple(rho_star() for _ in range(n)))

    best_rhos: tuple[float, ...] | None = None
    best_val = math.inf
    for start in starts:
        rhos = list(start)
        val = objective(tuple(rhos))
        if not math.isfinite(val):
            continue
        for _ in range(200):
            moved = 0.0
            for i in range(n):
                def line(x, i=i):
                    probe = rhos.copy()
                    probe[i] = x
                    return objective(tuple(probe))

                hi = RHO_MAX
                if budget is not None:
                    rest = sum(r * m for j, (r, m) in enumerate(zip(rhos, mus)) if j != i)
                    hi = min(RHO_MAX, (budget - rest) / mus[i])
                    if hi <= RHO_MIN:
                        continue
                new = _golden_min(line, RHO_MIN, hi)
                moved = max(moved, abs(new - rhos[i]))
                rhos[i] = new
            if budget is not None:
                # axis moves stall on the budget boundary; rebalance pairs
                # along directions that keep rho_i*mu_i + rho_j*mu_j fixed
                for i in range(n):
                    for j in range(i + 1, n):
                        s = rhos[i] * mus[i] + rhos[j] * mus[j]
                        lo_x = max(RHO_MIN, (s - RHO_MAX * mus[j]) / mus[i])
                        hi_x = min(RHO_MAX, (s - RHO_MIN * mus[j]) / mus[i])
                        if hi_x <= lo_x:
                            continue

                        def pair(x, i=i, j=j, s=s):
                            probe = rhos.copy()
                            probe[i] = x
                            probe[j] = (s - x * mus[i]) / mus[j]
                            return objective(tuple(probe))

                        new = _golden_min(pair, lo_x, hi_x)
                        moved = max(moved, abs(new - rhos[i]))
                        rhos[i] = new
                        rhos[j] = (s - new * mus[i]) / mus[j]
            val = objective(tuple(rhos))
            if moved < 1e-6:
                break
        point = tuple(rhos)
        if val < best_val - 1e-15 or (
            abs(val - best_val) <= 1e-15 and (best_rhos is None or point < best_rhos)
        ):
            best_val, best_rhos = val, point

    assert best_rhos is not None
    lam_i = [r * m for r, m in zip(best_rhos, mus)]
    lam = sum(lam_i)
    return RoutingSolution(
        arrival_rate=lam,
        alphas=tuple(li / lam for li in lam_i),
        predicted_aoi=best_val,
        per_server_rho=best_rhos,
    )


def gradient_check_at_optimum(mu1: float, mu2: float, step: float = 1e-5) -> float:
    """Norm of the approximate-AoI gradient in (rho1, rho2) at (rho*, rho*).

    Central differences through theta_i(rho_i, mu_i); should vanish at the
    optimum predicted by the gamma-approximation analysis.
    """
    if mu1 <= 0.0 or mu2 <= 0.0:
        raise ValueError("service rates must be positive")
    rs = rho_star()

    def f(r1: float, r2: float) -> float:
        return approx_mean_two(
            theta_of(ServerLoad(rho=r1, mu=mu1)),
            theta_of(ServerLoad(rho=r2, mu=mu2)),
        )

    g1 = (f(rs + step, rs) - f(rs - step, rs)) / (2.0 * step)
    g2 = (f(rs, rs + step) - f(rs, rs - step)) / (2.0 * step)
    return math.hypot(g1, g2)
