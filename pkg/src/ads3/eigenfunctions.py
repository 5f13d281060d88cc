"""Spherical eigenfunctions of the Lorentzian Laplacian on AdS^3.

For a positive integer m and nonnegative integer k, the ambient function

    F(x) = z1^-(k+2m) * z2^k,      z1 = x1 + i x2,  z2 = x3 + i x4,

is homogeneous of degree -2m and harmonic for the signature-(2,2) wave
operator d1^2 + d2^2 - d3^2 - d4^2, so its restriction to the quadric
Q = 1 is an eigenfunction with eigenvalue 4m(m-1).  It is invariant under
(z1, z2) -> (-z1, -z2) and therefore lives on AdS^3.  In polar
coordinates x = k(theta1) a(t) k(theta2):

    psi_{m,k}(x) = exp(-2i(m theta1 + (m+k) theta2)) tanh^k(t) cosh^-2m(t),

so |psi_{m,k}(x)| depends only on ||x|| = 2t.  Evaluation goes through
(z1, z2) as (z2/z1)^k * z1^-2m -- both factors have modulus <= 1, which
avoids overflow at any point and any admissible (m, k) -- and never
through polar coordinates, which degenerate at t = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.special import betaln

from .psl2 import AdS3Point

__all__ = [
    "SphericalParams",
    "eigenvalue",
    "psi",
    "psi_re",
    "psi_im",
    "psi_abs",
    "ambient_harmonic",
    "l2_radial_norm_sq",
]

# Cap on the integer exponent k + 2m; repeated-squaring rounding stays
# below ~1e-12 relative under this bound.
MAX_POWER = 1 << 15


class DivergentNorm(ValueError):
    """Radial L^2 integral diverges (needs m >= 1)."""


@dataclass(frozen=True)
class SphericalParams:
    """Type (-m, m+k) under the torus action; eigenvalue 4m(m-1)."""

    m: int
    k: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if self.k < 0:
            raise ValueError(f"k must be a nonnegative integer, got {self.k}")
        if self.k + 2 * self.m > MAX_POWER:
            raise ValueError(f"k + 2m = {self.k + 2 * self.m} exceeds {MAX_POWER}")

    def eigenvalue(self) -> float:
        return float(4 * self.m * (self.m - 1))


def eigenvalue(p: SphericalParams) -> float:
    return p.eigenvalue()


def _psi_from_pair(p: SphericalParams, z1: complex, z2: complex) -> complex:
    # (z2/z1)^k * z1^-2m with the negative power taken in polar form:
    # naive complex integer powers overflow internally for |z1|^2m beyond
    # float range even though the result underflows cleanly to 0
    w = (z2 / z1) ** p.k
    mod = math.exp(-2.0 * p.m * math.log(abs(z1)))  # silent underflow to 0
    return w * mod * cmath.exp(complex(0.0, -2.0 * p.m * cmath.phase(z1)))


def ambient_harmonic(p: SphericalParams, x) -> complex:
    """z1^-(k+2m) z2^k on {Q > 0}, evaluated as (z2/z1)^k z1^-2m.

    Defined for any 4-vector with Q(x) > 0 (there |z1| > |z2|, in
    particular z1 != 0); homogeneous of degree -2m.
    """
    x1, x2, x3, x4 = (float(v) for v in x)
    return _psi_from_pair(p, complex(x1, x2), complex(x3, x4))


def psi(p: SphericalParams, x: AdS3Point) -> complex:
    """The eigenfunction psi_{m,k} at a point of AdS^3.

    On the quadric |z1| >= 1 and |z2/z1| < 1, so the value has modulus
    at most 1 and the evaluation can neither overflow nor lose the phase.
    """
    z1, z2 = x.complex_pair
    return _psi_from_pair(p, z1, z2)


def psi_re(p: SphericalParams, x: AdS3Point) -> float:
    return psi(p, x).real


def psi_im(p: SphericalParams, x: AdS3Point) -> float:
    return psi(p, x).imag


def psi_abs(p: SphericalParams, norm_x: float) -> float:
    """|psi_{m,k}| as a function of the pseudo-distance to the origin:

        cosh^-2m(||x||/2) * tanh^k(||x||/2).
    """
    if norm_x < 0.0:
        raise ValueError("norm_x must be nonnegative")
    t = 0.5 * norm_x
    return math.exp(-2.0 * p.m * _log_cosh(t)) * math.tanh(t) ** p.k


def _log_cosh(t: float) -> float:
    # stable for large t: log cosh t = t + log(1 + e^-2t) - log 2
    t = abs(t)
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)


def l2_radial_norm_sq(p: SphericalParams) -> float:
    """Radial factor of ||psi_{m,k}||^2 in L^2.

    The measure in polar coordinates is sinh(2t) dtheta1 dt dtheta2, and

        int_0^inf tanh^2k(t) cosh^-4m(t) sinh(2t) dt = B(k+1, 2m-1)

    by the substitution v = sinh^2 t.
    """
    if p.m < 1:
        raise DivergentNorm("radial integral diverges for m < 1")
    return math.exp(betaln(p.k + 1, 2 * p.m - 1))
