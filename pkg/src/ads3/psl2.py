"""Arithmetic in PSL(2,R) and the identification AdS^3 = PSL(2,R).

The quadric {Q = x1^2 + x2^2 - x3^2 - x4^2 = 1} in R^4 is identified with
SL(2,R) by

    (x1, x2, x3, x4)  <->  [[x1 + x3, -x2 + x4],
                            [x2 + x4, x1 - x3]],

under which Q(x) = det.  Quotienting by +-1 gives the anti-de Sitter space
AdS^3 = PSL(2,R).  The pseudo-distance from the origin is

    cosh ||x|| = x1^2 + x2^2 + x3^2 + x4^2 = (a^2 + b^2 + c^2 + d^2) / 2,

which equals 2t in the polar decomposition x = k(theta1) a(t) k(theta2),
where k(theta) is the rotation matrix and a(t) = diag(e^t, e^-t).  This
particular pairing of the x's with matrix entries is chosen so that the
complex embedding z1 = x1 + i x2, z2 = x3 + i x4 takes the exact polar
form

    (z1, z2) = (cosh(t) e^{i(theta1+theta2)}, sinh(t) e^{i(theta1-theta2)}),

on which all eigenfunction evaluations downstream rely.

Elements are stored as flat 4-tuples (a, b, c, d), row-major, renormalized
to det 1 and sign-canonicalized (first nonzero entry >= 0) so that each
PSL class has a unique representative.  Everything here is immutable and
pure; tuples keep single-element operations fast enough for word
enumeration without numpy round-trips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "GroupElement",
    "AdS3Point",
    "CartanCoords",
    "identity",
    "rotation",
    "boost",
    "compose",
    "norm",
    "cartan",
    "norm_lower_bound",
    "random_element",
    "log_cosh",
]


def log_cosh(t: float) -> float:
    """log cosh t, accurate from t ~ 1e-160 (via log1p(2 sinh^2(t/2)))
    through t beyond the cosh overflow point (via the asymptote)."""
    t = abs(t)
    if t < 1.0:
        s = math.sinh(0.5 * t)
        return math.log1p(2.0 * s * s)
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)

# Determinant drift beyond this is treated as corrupted input, not noise.
_DET_HARD_LIMIT = 1e-6
# Below this we renormalize silently.
_DET_SOFT_LIMIT = 1e-13


class CorruptedElement(ValueError):
    """Determinant too far from 1 to be rounding drift."""


_SPLITTER = 134217729.0  # 2^27 + 1, Dekker splitting constant


def _two_product(a: float, b: float) -> tuple[float, float]:
    # error-free transformation: a*b = p + err exactly
    p = a * b
    ah = a * _SPLITTER
    ah = ah - (ah - a)
    al = a - ah
    bh = b * _SPLITTER
    bh = bh - (bh - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _det(a: float, b: float, c: float, d: float) -> float:
    # ad - bc cancels to ~1 from products of size ~||g||^2; the naive float
    # expression is pure noise already at entries ~1e8, so sum the exact
    # product pieces instead (correctly rounded via fsum)
    p1, e1 = _two_product(a, d)
    p2, e2 = _two_product(b, c)
    return math.fsum((p1, -p2, e1, -e2))


def _canonical(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    """Boundary canonicalization for user-supplied entries: the exact det
    of fresh input is a faithful corruption witness at any scale."""
    det = _det(a, b, c, d)
    if not det > 0.0 or abs(det - 1.0) > _DET_HARD_LIMIT:
        raise CorruptedElement(f"determinant {det!r} differs from 1 beyond 1e-6")
    if abs(det - 1.0) > _DET_SOFT_LIMIT:
        s = 1.0 / math.sqrt(det)
        a, b, c, d = a * s, b * s, c * s, d * s
    return _sign_canonical(a, b, c, d)


def _sign_canonical(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    for v in (a, b, c, d):
        if v != 0.0:
            if v < 0.0:
                a, b, c, d = -a, -b, -c, -d
            break
    # fold -0.0 into +0.0 so equal classes compare equal entrywise
    return (a + 0.0, b + 0.0, c + 0.0, d + 0.0)


def _make(a: float, b: float, c: float, d: float) -> "GroupElement":
    """Internal fast constructor for compositions of valid elements.

    Composition is a closed operation and never errors: composed entries
    are backward-stable, so norms and eigenfunction values stay relatively
    accurate regardless of what the (ill-conditioned) det reads.  Det
    hygiene is maintained where it is measurable and beneficial, i.e. at
    moderate entry scale; at large scale dividing by a noisy sqrt(det)
    would inject error instead of removing it.
    """
    if a * a + b * b + c * c + d * d <= 1e6:
        det = _det(a, b, c, d)
        # words whose intermediate products climbed to huge entry scale
        # come back with det noise inherited from cancellation; renormalize
        # only within a sane window, where det 1 is the credible reading
        if abs(det - 1.0) > _DET_SOFT_LIMIT and 0.25 <= det <= 4.0:
            s = 1.0 / math.sqrt(det)
            a, b, c, d = a * s, b * s, c * s, d * s
    for v in (a, b, c, d):
        if v != 0.0:
            if v < 0.0:
                a, b, c, d = -a, -b, -c, -d
            break
    g = object.__new__(GroupElement)
    object.__setattr__(g, "entries", (a + 0.0, b + 0.0, c + 0.0, d + 0.0))
    return g


@dataclass(frozen=True)
class GroupElement:
    """An element of PSL(2,R): det-1 matrix (a,b,c,d) modulo sign."""

    entries: tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "entries", _canonical(*self.entries))

    @staticmethod
    def from_matrix(m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return GroupElement((m[0, 0], m[0, 1], m[1, 0], m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        a, b, c, d = self.entries
        return np.array([[a, b], [c, d]])

    def compose(self, other: "GroupElement") -> "GroupElement":
        a1, b1, c1, d1 = self.entries
        a2, b2, c2, d2 = other.entries
        return _make(
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        )

    __matmul__ = compose

    def inverse(self) -> "GroupElement":
        a, b, c, d = self.entries
        return _make(d, -b, -c, a)

    def norm(self) -> float:
        """Pseudo-distance to the origin: arccosh((a^2+b^2+c^2+d^2)/2)."""
        a, b, c, d = self.entries
        s = 0.5 * (a * a + b * b + c * c + d * d)
        # rounding can push the argument a hair below 1 near the identity;
        # clamping costs <= ~1e-8 absolute error there
        return math.acosh(s) if s > 1.0 else 0.0

    def trace_abs(self) -> float:
        a, _, _, d = self.entries
        return abs(a + d)

    def translation_length(self) -> float:
        """2*arccosh(|tr|/2) for hyperbolic elements, 0 otherwise."""
        half = self.trace_abs() / 2.0
        return 2.0 * math.acosh(half) if half > 1.0 else 0.0

    def is_identity(self, tol: float = 1e-9) -> bool:
        a, b, c, d = self.entries
        return abs(a - 1.0) <= tol and abs(b) <= tol and abs(c) <= tol and abs(d - 1.0) <= tol

    def key(self, decimals: int = 9) -> tuple:
        """Hashable canonical key at the given rounding tolerance."""
        r = [round(v, decimals) + 0.0 for v in self.entries]
        for v in r:
            if v != 0.0:
                if v < 0.0:
                    r = [-u + 0.0 for u in r]
                break
        return tuple(r)

    def cartan(self) -> "CartanCoords":
        return cartan(self)

    def __repr__(self):
        a, b, c, d = self.entries
        return f"GroupElement([{a:.12g}, {b:.12g}, {c:.12g}, {d:.12g}])"


_IDENTITY = GroupElement((1.0, 0.0, 0.0, 1.0))


def identity() -> GroupElement:
    return _IDENTITY


def rotation(theta: float) -> GroupElement:
    """k(theta) = [[cos, -sin], [sin, cos]] as a PSL class (period pi)."""
    return _make(math.cos(theta), -math.sin(theta), math.sin(theta), math.cos(theta))


def boost(t: float) -> GroupElement:
    """a(t) = diag(e^t, e^-t); translates distance 2t along its axis."""
    return _make(math.exp(t), 0.0, 0.0, math.exp(-t))


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return g.compose(h)


def norm(g: GroupElement) -> float:
    return g.norm()


@dataclass(frozen=True)
class CartanCoords:
    """Polar coordinates g = k(theta1) a(t) k(theta2).

    theta1 lies in [0, pi); theta2 in [0, 2*pi) (matrix-level convention;
    set projective=True to reduce theta2 mod pi, which is enough to pin a
    PSL class).  t >= 0 and equals norm(g)/2 by construction.
    """

    theta1: float
    t: float
    theta2: float
    projective: bool = False

    def projectivize(self) -> "CartanCoords":
        return CartanCoords(self.theta1, self.t, self.theta2 % math.pi, True)

    def recompose(self) -> GroupElement:
        return rotation(self.theta1) @ boost(self.t) @ rotation(self.theta2)


def cartan(g: GroupElement) -> CartanCoords:
    """Decompose g = k(theta1) a(t) k(theta2) with t >= 0.

    For rotations (t = 0) the convention is theta2 = 0 and theta1 = the
    full rotation angle mod pi.  For t > 0 the (theta1, theta2) ->
    (theta1 + pi, theta2 + pi) ambiguity is resolved by theta1 in [0, pi).
    """
    a, b, c, d = g.entries
    s = 0.5 * (a * a + b * b + c * c + d * d)
    if s <= 1.0 + 1e-15:
        # pure rotation class
        theta = math.atan2(c, a) % math.pi
        return CartanCoords(theta, 0.0, 0.0)
    u, sig, vt = np.linalg.svd(g.matrix)
    if np.linalg.det(u) < 0.0:
        # det(u)*det(vt) = +1 for det-1 input; flip both to rotations
        u = u @ np.diag([1.0, -1.0])
        vt = np.diag([1.0, -1.0]) @ vt
    t = 0.5 * (math.log(sig[0]) - math.log(sig[1]))
    theta1 = math.atan2(u[1, 0], u[0, 0])
    theta2 = math.atan2(vt[1, 0], vt[0, 0])
    shift = math.floor(theta1 / math.pi)
    theta1 -= shift * math.pi
    theta2 -= shift * math.pi
    return CartanCoords(theta1, t, theta2 % (2.0 * math.pi))


@dataclass(frozen=True)
class AdS3Point:
    """A point of AdS^3, stored as its PSL(2,R) representative."""

    g: GroupElement

    @staticmethod
    def origin() -> "AdS3Point":
        return AdS3Point(_IDENTITY)

    @staticmethod
    def from_four_vector(x) -> "AdS3Point":
        x1, x2, x3, x4 = (float(v) for v in x)
        q = x1 * x1 + x2 * x2 - x3 * x3 - x4 * x4
        if abs(q - 1.0) > 1e-10:
            raise ValueError(f"Q(x) = {q!r} is not 1 within 1e-10")
        return AdS3Point(GroupElement((x1 + x3, -x2 + x4, x2 + x4, x1 - x3)))

    @staticmethod
    def from_complex_pair(z1: complex, z2: complex) -> "AdS3Point":
        return AdS3Point.from_four_vector((z1.real, z1.imag, z2.real, z2.imag))

    @property
    def four_vector(self) -> tuple[float, float, float, float]:
        a, b, c, d = self.g.entries
        return (0.5 * (a + d), 0.5 * (c - b), 0.5 * (a - d), 0.5 * (b + c))

    @property
    def complex_pair(self) -> tuple[complex, complex]:
        # z1 = x1 + i x2, z2 = x3 + i x4; |z1|^2 = 1 + |z2|^2 > 0, so z1 != 0
        x1, x2, x3, x4 = self.four_vector
        return (complex(x1, x2), complex(x3, x4))

    def norm(self) -> float:
        return self.g.norm()

    def moved_by(self, g1: GroupElement, g2: GroupElement) -> "AdS3Point":
        """Image under the isometry x -> g1 x g2^{-1}."""
        return AdS3Point(g1 @ self.g @ g2.inverse())

    def __repr__(self):
        x = self.four_vector
        return f"AdS3Point(({x[0]:.9g}, {x[1]:.9g}, {x[2]:.9g}, {x[3]:.9g}))"


def norm_lower_bound(g1: GroupElement, g2: GroupElement, x: AdS3Point) -> float:
    """| ||g1|| - ||g2|| | - ||x||, a lower bound for ||g1 x g2^{-1}||.

    Follows from the triangle inequality for ||.|| applied both ways; the
    bound is tight for x = E and g2 = E.
    """
    return abs(g1.norm() - g2.norm()) - x.norm()


def random_element(rng: np.random.Generator, max_boost: float = 1.0) -> GroupElement:
    """Haar-ish random sample k(theta1) a(t) k(theta2), t uniform."""
    th1 = rng.uniform(0.0, math.pi)
    th2 = rng.uniform(0.0, math.pi)
    t = rng.uniform(0.0, max_boost)
    return rotation(th1) @ boost(t) @ rotation(th2)


def parse_matrix_literal(value: Iterable[float]) -> GroupElement:
    """[a, b, c, d] row-major, the on-disk format for group elements."""
    vals = [float(v) for v in value]
    if len(vals) != 4:
        raise ValueError(f"matrix literal needs 4 entries, got {len(vals)}")
    return GroupElement(tuple(vals))
