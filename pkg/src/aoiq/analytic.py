"""Closed-form AoI quantities for parallel M/M/1 FCFS queues.

Single-server mean and tail distribution, the exact n-server average AoI
via products of tails, and the shape-2 gamma approximation layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exppoly import ExpSum, integrate, multiply


@dataclass(frozen=True)
class ServerLoad:
    """Utilization rho in (0,1) and service rate mu > 0 of one M/M/1 server."""

    rho: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise ValueError(f"unstable server: rho={self.rho} not in (0,1)")
        if self.mu <= 0.0:
            raise ValueError(f"service rate must be positive, got {self.mu}")

    @property
    def rho_bar(self) -> float:
        return 1.0 - self.rho

    @property
    def arrival_rate(self) -> float:
        return self.rho * self.mu


@dataclass(frozen=True)
class SystemConfig:
    """Total Poisson arrival rate, routing probabilities, service rates."""

    arrival_rate: float
    alphas: tuple[float, ...]
    mus: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "mus", tuple(float(m) for m in self.mus))
        if self.arrival_rate <= 0.0:
            raise ValueError("arrival rate must be positive")
        if len(self.alphas) != len(self.mus):
            raise ValueError("alphas and mus must have the same length")
        if not self.alphas:
            raise ValueError("need at least one server")
        if abs(sum(self.alphas) - 1.0) > 1e-12:
            raise ValueError(f"routing probabilities sum to {sum(self.alphas)}, not 1")
        for i, (a, m) in enumerate(zip(self.alphas, self.mus)):
            if not (0.0 <= a <= 1.0):
                raise ValueError(f"alpha[{i}]={a} outside [0,1]")
            if m <= 0.0:
                raise ValueError(f"mu[{i}]={m} must be positive")

    def is_stable(self) -> bool:
        return all(
            a * self.arrival_rate < m
            for a, m in zip(self.alphas, self.mus)
            if a > 0.0
        )

    def active_loads(self) -> list[ServerLoad]:
        """Loads of the servers actually receiving traffic (alpha > 0)."""
        loads = []
        for a, m in zip(self.alphas, self.mus):
            if a > 0.0:
                loads.append(ServerLoad(rho=a * self.arrival_rate / m, mu=m))
        if not loads:
            raise ValueError("no active servers: all routing probabilities are zero")
        return loads


@dataclass(frozen=True)
class GammaParam:
    """Half of a server's average AoI; scale of the shape-2 gamma model."""

    theta: float

    def __post_init__(self):
        if self.theta <= 0.0:
            raise ValueError(f"theta must be positive, got {self.theta}")


def single_server_mean(load: ServerLoad) -> float:
    """Average AoI of one M/M/1 FCFS queue: (1/mu)(1 + 1/rho + rho^2/(1-rho))."""
    rho = load.rho
    return (1.0 / load.mu) * (1.0 + 1.0 / rho + rho * rho / (1.0 - rho))


def single_server_tail(load: ServerLoad) -> ExpSum:
    """Survival function P(age > x) of one M/M/1 FCFS queue as an ExpSum.

    Three terms: exp(-rb*mu*x) - (1/rb + rho*mu*x) exp(-mu*x)
    + (1/rb) exp(-rho*mu*x), with rb = 1 - rho.
    """
    rb, mu, lam = load.rho_bar, load.mu, load.arrival_rate
    return ExpSum.from_parts(
        [
            ((1.0,), rb * mu),
            ((-1.0 / rb, -lam), mu),
            ((1.0 / rb,), lam),
        ]
    )


def combined_tail(loads: list[ServerLoad]) -> ExpSum:
    """Tail of the minimum of independent per-server ages (tails multiply)."""
    if not loads:
        raise ValueError("no active servers")
    tail = single_server_tail(loads[0])
    for load in loads[1:]:
        tail = multiply(tail, single_server_tail(load))
    return tail


def exact_mean(loads: list[ServerLoad]) -> float:
    """Exact average AoI of n parallel servers: integral of the tail product."""
    if not loads:
        raise ValueError("no active servers")
    if len(loads) == 1:
        return single_server_mean(loads[0])
    return integrate(combined_tail(loads))


def exact_mean_two_printed(load1: ServerLoad, load2: ServerLoad) -> float:
    """Literal transcription of the published two-server rational expression.

    Kept only as a cross-check: at symmetric loads it exceeds the
    single-server mean, which the minimum of two ages cannot do, so
    exact_mean is computed from the tail product instead.  See
    docs/known-discrepancy note in the README.
    """
    r1, m1, rb1 = load1.rho, load1.mu, load1.rho_bar
    r2, m2, rb2 = load2.rho, load2.mu, load2.rho_bar
    val = 1.0 / (rb1 * m1 + rb2 * m2)
    val += 1.0 / (rb1 * rb2 * (r1 * m1 + r2 * m2))
    val += 1.0 / (rb1 * rb2 * (m1 + m2))
    val += 2.0 * r1 * r2 * m1 * m2 / (m1 + m2) ** 3
    val += (r2 * m2 / rb1 + r1 * m1 / rb2) / (m1 + m2) ** 2
    val -= (
        1.0 / (rb2 * (m2 + rb1 * m1))
        + r2 * m2 / (rb1 * m1 + m2) ** 2
        + 1.0 / (rb1 * (m1 + rb2 * m2))
        + r1 * m1 / (rb2 * m2 + m1) ** 2
    )
    val += 1.0 / (rb2 * (r2 * m2 + rb1 * m1))
    val += 1.0 / (rb1 * (r1 * m1 + rb2 * m2))
    val += r1 * m1 / (rb2 * (r2 * m2 + m1) ** 2)
    val += r2 * m2 / (rb1 * (r1 * m1 + m2) ** 2)
    val -= (1.0 / (rb1 * rb2)) * (1.0 / (m1 + m2 * r2) + 1.0 / (m2 + m1 * r1))
    return val


def theta_of(load: ServerLoad) -> GammaParam:
    """Gamma scale matching the server's mean AoI: theta = mean / 2."""
    return GammaParam(single_server_mean(load) / 2.0)


def gamma_tail(param: GammaParam) -> ExpSum:
    """Shape-2 gamma survival function (1 + x/theta) exp(-x/theta)."""
    inv = 1.0 / param.theta
    return ExpSum.from_parts([((1.0, inv), inv)])


def gamma_pdf(param: GammaParam, x: float) -> float:
    """Shape-2 gamma density (x/theta^2) exp(-x/theta)."""
    if x < 0.0:
        return 0.0
    th = param.theta
    return (x / th**2) * math.exp(-x / th)


def approx_mean_two(theta1: GammaParam, theta2: GammaParam) -> float:
    """Approximate combined AoI of two servers: 2*T0*(1 + T0^2/(T1*T2))."""
    t1, t2 = theta1.theta, theta2.theta
    t0 = t1 * t2 / (t1 + t2)
    return 2.0 * t0 * (1.0 + t0 * t0 / (t1 * t2))


def approx_mean_n(thetas: list[GammaParam]) -> float:
    """Approximate combined AoI of n servers: integral of the gamma-tail product."""
    if not thetas:
        raise ValueError("need at least one theta")
    tail = gamma_tail(thetas[0])
    for th in thetas[1:]:
        tail = multiply(tail, gamma_tail(th))
    return integrate(tail)


def gamma_approx_error(load: ServerLoad) -> float:
    """Sup-norm gap between the exact tail and its gamma stand-in on a grid.

    Grid step 0.01/mu, extent 20/(rho_bar*mu); covers essentially all of
    the tail mass at desk-scale parameters.
    """
    exact = single_server_tail(load)
    gamma = gamma_tail(theta_of(load))
    h = 0.01 / load.mu
    x_max = 20.0 / (load.rho_bar * load.mu)
    worst = 0.0
    x = 0.0
    while x <= x_max:
        worst = max(worst, abs(exact(x) - gamma(x)))
        x += h
    return worst
