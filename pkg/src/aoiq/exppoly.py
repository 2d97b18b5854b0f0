"""Exact algebra over exponential-polynomial functions on [0, inf).

An ExpSum is a finite sum of terms p(x) * exp(-c*x) with polynomial p and
decay rate c > 0.  The class is closed under addition and multiplication and
integrates exactly on the half line, which is all the machinery needed to
turn products of AoI tail distributions into closed-form averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Rates closer than this (relatively) are treated as equal and merged;
# keeping them separate would blow up the k!/c^(k+1) sums.
RATE_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class ExpTerm:
    """One term p(x) * exp(-rate * x), coeffs ascending: p(x) = sum a_k x^k."""

    coeffs: tuple[float, ...]
    rate: float

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("ExpTerm needs at least one coefficient")
        if not math.isfinite(self.rate):
            raise ValueError("ExpTerm rate must be finite")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        object.__setattr__(self, "rate", float(self.rate))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        p = 0.0
        for a in reversed(self.coeffs):
            p = p * x + a
        return p * math.exp(-self.rate * x)


@dataclass(frozen=True)
class ExpSum:
    """Finite sum of ExpTerms; value semantics, safe to share."""

    terms: tuple[ExpTerm, ...]

    def __init__(self, terms: Iterable[ExpTerm] = ()):
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def from_parts(cls, parts: Sequence[tuple[Sequence[float], float]]) -> "ExpSum":
        return cls(ExpTerm(tuple(c), r) for c, r in parts)

    @classmethod
    def zero(cls) -> "ExpSum":
        return cls(())

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return canonicalize(ExpSum(self.terms + other.terms))

    def __mul__(self, other: "ExpSum") -> "ExpSum":
        return multiply(self, other)

    def __len__(self) -> int:
        return len(self.terms)

    def derivative(self) -> "ExpSum":
        """d/dx of the sum: (p'(x) - c p(x)) exp(-c x) per term."""
        out = []
        for t in self.terms:
            p = np.asarray(t.coeffs)
            dp = p[1:] * np.arange(1, len(p))
            dp = np.concatenate([dp, [0.0]]) if len(dp) < len(p) else dp
            out.append(ExpTerm(tuple(dp - t.rate * p), t.rate))
        return canonicalize(ExpSum(out))

    def min_rate(self) -> float:
        return min(t.rate for t in self.terms) if self.terms else math.inf


def evaluate(f: ExpSum, x: float) -> float:
    """Value of f at x >= 0."""
    return sum(t(x) for t in f.terms)


def multiply(f: ExpSum, g: ExpSum) -> ExpSum:
    """Pointwise product: rates add, polynomials convolve."""
    out = []
    for tf in f.terms:
        for tg in g.terms:
            coeffs = np.convolve(tf.coeffs, tg.coeffs)
            out.append(ExpTerm(tuple(coeffs), tf.rate + tg.rate))
    return canonicalize(ExpSum(out))


def canonicalize(f: ExpSum) -> ExpSum:
    """Merge terms with (relatively) equal rates, drop vanished terms.

    Rates within RATE_MERGE_TOL relative are summed coefficient-wise; the
    merged term keeps the mean of the merged rates.  Deterministic: terms
    are processed in rate order.
    """
    if not f.terms:
        return f
    terms = sorted(f.terms, key=lambda t: t.rate)
    groups: list[list[ExpTerm]] = [[terms[0]]]
    for t in terms[1:]:
        ref = groups[-1][-1].rate
        if abs(t.rate - ref) <= RATE_MERGE_TOL * max(abs(t.rate), abs(ref)):
            groups[-1].append(t)
        else:
            groups.append([t])
    out = []
    for grp in groups:
        deg = max(t.degree for t in grp)
        coeffs = np.zeros(deg + 1)
        for t in grp:
            coeffs[: len(t.coeffs)] += t.coeffs
        # strip exactly-zero high-order coefficients
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if np.all(coeffs == 0.0):
            continue
        rate = sum(t.rate for t in grp) / len(grp)
        out.append(ExpTerm(tuple(coeffs), rate))
    return ExpSum(out)


def integrate(f: ExpSum) -> float:
    """Exact integral of f over [0, inf): sum of a_k * k! / c^(k+1)."""
    total = 0.0
    for t in f.terms:
        if t.rate <= 0.0:
            raise ValueError(
                f"divergent integral: term with rate {t.rate} <= 0"
            )
        total += sum(
            a * math.factorial(k) / t.rate ** (k + 1)
            for k, a in enumerate(t.coeffs)
        )
    return total
