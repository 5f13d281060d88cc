"""Explicit spectral-parameter thresholds and the elliptic norm floor.

All four quantities are elementary closed forms or one-dimensional
minimizations of one:

    m(C, a, eps, s)   = ((log 2) s + 2 a eps + log(1 + 2^s C e^{6 a eps}))
                        / log cosh eps
    m~(C, a, delta, s) = inf over 0 < eps < delta of m(C, a, eps, s)
    m_Gamma(k)        = min over growth candidates (A, a) of
                        max{ m~(3^{k-1} A, a, eps_Gamma/4, 3^{k-1}) / 2, a }
    eta(n, r)         = arccosh(1 + 2 (sinh(r/4) sin(pi/n))^2)

m(...) is the sufficiency threshold for the shell-sum inequality checked
by checks.check_koukou; m_Gamma(k) is the sufficiency threshold for the
rank-k independence certificate.  Since every consumer treats these as
*sufficient* bounds, reporting an upper bound for the infimum in m~ is
sound, and the minimizer does exactly that (grid + golden-section, 1e-6
relative tolerance).

The 2^s factor overflows floats already at s = 1025, and s = 3^{k-1}
grows fast, so the log term is evaluated as logaddexp(0, s log 2 + log C
+ 6 a eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ThresholdInputs",
    "m_threshold",
    "m_tilde",
    "m_gamma",
    "eta",
    "InvalidClass",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class InvalidClass(ValueError):
    """Torsion class n out of range."""


@dataclass(frozen=True)
class ThresholdInputs:
    C: float
    a: float
    eps: float
    s: int

    def __post_init__(self):
        if self.C <= 0 or self.a <= 0 or self.eps <= 0:
            raise ValueError("C, a, eps must all be strictly positive")
        if self.s < 1:
            raise ValueError(f"s must be a positive integer, got {self.s}")


def m_threshold(inputs: ThresholdInputs) -> float:
    C, a, eps, s = inputs.C, inputs.a, inputs.eps, inputs.s
    log_term = float(np.logaddexp(0.0, s * math.log(2.0) + math.log(C) + 6.0 * a * eps))
    return (math.log(2.0) * s + 2.0 * a * eps + log_term) / _log_cosh(eps)


def _log_cosh(t: float) -> float:
    t = abs(t)
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)


def m_tilde(C: float, a: float, delta: float, s: int, rel_tol: float = 1e-6) -> float:
    """Upper bound for inf over 0 < eps < delta of m(C, a, eps, s).

    Coarse geometric grid, then golden-section refinement around the grid
    minimum.  Grows like delta^-2 as delta -> 0 and is O(1) as
    delta -> infinity.
    """
    value, _ = m_tilde_with_argmin(C, a, delta, s, rel_tol)
    return value


def m_tilde_with_argmin(
    C: float, a: float, delta: float, s: int, rel_tol: float = 1e-6
) -> tuple[float, float]:
    if delta <= 0:
        raise ValueError("delta must be strictly positive")

    def f(eps: float) -> float:
        return m_threshold(ThresholdInputs(C, a, eps, s))

    hi = delta * (1.0 - 1e-12)
    lo = min(delta * 1e-8, 1e-8)
    grid = np.geomspace(lo, hi, 96)
    values = [f(float(e)) for e in grid]
    i = int(np.argmin(values))
    left = float(grid[max(i - 1, 0)])
    right = float(grid[min(i + 1, len(grid) - 1)])

    # golden-section on [left, right]
    x1 = right - _GOLDEN * (right - left)
    x2 = left + _GOLDEN * (right - left)
    f1, f2 = f(x1), f(x2)
    best, best_eps = min((values[i], float(grid[i])), (f1, x1), (f2, x2))
    while (right - left) > rel_tol * max(right, 1e-300):
        if f1 <= f2:
            right, x2, f2 = x2, x1, f1
            x1 = right - _GOLDEN * (right - left)
            f1 = f(x1)
        else:
            left, x1, f1 = x1, x2, f2
            x2 = left + _GOLDEN * (right - left)
            f2 = f(x2)
        if f1 < best:
            best, best_eps = f1, x1
        if f2 < best:
            best, best_eps = f2, x2
    return best, best_eps


def m_gamma(k: int, candidates: Sequence[tuple[float, float]], eps_gamma: float) -> float:
    """Independence threshold for k series; +inf when no growth candidate
    is available or the separation constant vanishes."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if not candidates or eps_gamma <= 0.0:
        # inf over the empty set
        return math.inf
    s = 3 ** (k - 1)
    delta = eps_gamma / 4.0
    if math.isinf(delta):
        # eps_gamma = +inf only arises for a trivial/finite group; the
        # objective decreases to 8a for large eps, so a wide finite window
        # still yields a sound (upper) bound for the infimum
        delta = 1e3
    return min(max(m_tilde(s * A, a, delta, s) / 2.0, a) for A, a in candidates)


def eta(n: int, r: float) -> float:
    """Norm floor for conjugated order-n rotations:

        cosh eta_n = 1 + 2 (sinh(r/4) sin(pi/n))^2.
    """
    if n < 2:
        raise InvalidClass(f"eta needs n >= 2, got {n}")
    if r <= 0:
        raise ValueError("r must be strictly positive")
    return math.acosh(1.0 + 2.0 * (math.sinh(r / 4.0) * math.sin(math.pi / n)) ** 2)
