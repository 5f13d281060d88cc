"""Truncated group averages of eigenfunctions with certified tails.

The group average  sum over gamma of psi(gamma^{-1} x)  is approximated by
the finite sum over orbit points inside a pseudo-ball B(R0), plus a tail
radius that majorizes everything outside.  Shell n (points with norm in
(R0 n, R0 (n+1)]) contains fewer than A e^{a R0 (n+1)} orbit points under
the exponential growth bound, and |psi_{m,k}| <= cosh^{-2m}(R0 n / 2)
there, so with rho = e^{a R0} cosh^{-2m}(R0 / 2) < 1 the whole tail is
below  A e^{a R0} rho / (1 - rho).

Non-vanishing and linear independence are certified at the combinatorial
sample points

    x_a = k(theta_a / 2) a(eps) k(theta_a / 2)^{-1},
    theta_a = pi * sum_i (chi(a_i) - chi(a_{i-1})) / 3^i,

indexed by sign vectors a in {+-1}^k, where the real parts of the
averaged eigenfunctions have main term cosh^{-2m}(eps) f_b(tanh eps)
with every coefficient of f_b nonnegative.  A rank certificate is a
matrix of such certified values whose smallest singular value exceeds the
accumulated error radius (Weyl perturbation), which proves the k
functions linearly independent.
"""

from __future__ import annotations

import itertools
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .eigenfunctions import SphericalParams, psi
from .groups import (
    DEFAULT_NODE_BUDGET,
    GroupPresentation,
    GrowthConstants,
    OrbitBall,
    enumerate_ball,
    enumerate_elements,
)
from .psl2 import AdS3Point, boost, rotation

__all__ = [
    "SignVector",
    "CertifiedValue",
    "NonvanishingResult",
    "IndependenceCertificate",
    "InvalidN",
    "SignMismatch",
    "InvalidEpsilon",
    "DivergentTail",
    "theta_sample",
    "sample_point",
    "f_b",
    "truncated_series",
    "nonvanishing_check",
    "independence_certificate",
    "certify_full_rank",
]

_EPS = sys.float_info.epsilon
# subnormal floor added to tail bounds so exp() underflow cannot round a
# genuinely positive bound down to zero
_TAIL_FLOOR = 5e-324

DEFAULT_MAX_WORD_LEN = 48
DEFAULT_TRUNCATION_RADIUS = 20.0


class InvalidN(ValueError):
    pass


class SignMismatch(ValueError):
    pass


class InvalidEpsilon(ValueError):
    pass


class DivergentTail(ArithmeticError):
    """The geometric tail majorant does not contract."""


@dataclass(frozen=True)
class SignVector:
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) < 1:
            raise ValueError("need at least one sign")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError(f"signs must be +-1, got {self.signs}")
        object.__setattr__(self, "signs", tuple(self.signs))

    def __len__(self):
        return len(self.signs)

    @staticmethod
    def for_coefficients(b: Sequence[float]) -> "SignVector":
        return SignVector(tuple(1 if v >= 0 else -1 for v in b))


def _chi(sign: int) -> int:
    return 0 if sign == 1 else 1


def theta_sample(a: SignVector, N: int) -> float:
    """pi * sum_i (chi(a_i) - chi(a_{i-1})) N^{-i}, with a_{-1} = +1."""
    if N < 3 or N % 2 == 0:
        raise InvalidN(f"N must be an odd integer >= 3, got {N}")
    total = 0.0
    prev = 1
    scale = 1.0
    for s in a.signs:
        total += (_chi(s) - _chi(prev)) * scale
        prev = s
        scale /= N
    return math.pi * total


def sample_point(a: SignVector, eps: float) -> AdS3Point:
    """k(theta/2) a(eps) k(theta/2)^{-1} with theta = theta_sample(a, 3).

    Conjugation by a rotation preserves the pseudo-distance, so the point
    has norm exactly 2*eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    half = rotation(theta_sample(a, 3) / 2.0)
    return AdS3Point(half @ boost(eps) @ half.inverse())


def f_b(b: Sequence[float], a: SignVector, u: float) -> float:
    """sum_j b_j cos(3^j theta_{a,3}) u^{3^j}; all coefficients are
    nonnegative when a is the sign vector of b."""
    if len(b) != len(a):
        raise SignMismatch(f"coefficient vector has length {len(b)}, signs {len(a)}")
    for bj, aj in zip(b, a.signs):
        if (1 if bj >= 0 else -1) != aj:
            raise SignMismatch(f"signs {a.signs} do not match coefficients {tuple(b)}")
    theta = theta_sample(a, 3)
    total = 0.0
    for j, bj in enumerate(b):
        total += bj * math.cos(3**j * theta) * u ** (3**j)
    return total


@dataclass(frozen=True)
class CertifiedValue:
    """A numeric value with a rigorous error radius."""

    value: complex
    error_radius: float

    def __post_init__(self):
        if self.error_radius < 0:
            raise ValueError("error radius must be nonnegative")

    def __add__(self, other: "CertifiedValue") -> "CertifiedValue":
        return CertifiedValue(self.value + other.value, self.error_radius + other.error_radius)

    def scaled(self, c: float) -> "CertifiedValue":
        return CertifiedValue(self.value * c, self.error_radius * abs(c))

    @property
    def real(self) -> "CertifiedValue":
        return CertifiedValue(complex(self.value).real, self.error_radius)


def _log_cosh(t: float) -> float:
    t = abs(t)
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)


def _geometric_tail(A: float, a: float, m: int, R0: float) -> float:
    log_rho = a * R0 - 2.0 * m * _log_cosh(R0 / 2.0)
    if log_rho >= 0.0:
        raise DivergentTail(
            f"tail ratio e^(aR0) cosh^-2m(R0/2) = e^{log_rho:.3g} >= 1 "
            f"(A={A:g}, a={a:g}, m={m}, R0={R0:g})"
        )
    rho = math.exp(log_rho)
    return A * math.exp(a * R0) * rho / (1.0 - rho) * (1.0 + 1e-9) + _TAIL_FLOOR


def _sum_over_ball(ball: OrbitBall, p: SphericalParams) -> tuple[complex, float, int]:
    """Deterministic-order sum of psi over the moved points; returns
    (value, fp allowance, number of terms)."""
    terms = sorted(
        ((e.moved.g.key(), psi(p, e.moved)) for e in ball.elements),
        key=lambda kv: kv[0],
    )
    total = complex(
        math.fsum(t.real for _, t in terms),
        math.fsum(t.imag for _, t in terms),
    )
    peak = max((abs(t) for _, t in terms), default=0.0)
    allowance = 10.0 * _EPS * max(len(terms) - 1, 0) * peak
    return total, allowance, len(terms)


def truncated_series(
    pres: GroupPresentation,
    p: SphericalParams,
    x: AdS3Point,
    R0: float = DEFAULT_TRUNCATION_RADIUS,
    growth: GrowthConstants | None = None,
    max_word_len: int = DEFAULT_MAX_WORD_LEN,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> CertifiedValue:
    """Certified value of the group average of psi_{m,k} at x.

    Truncation is by orbit: the summation set is the set of orbit points
    inside B(R0), so the value does not depend on which orbit
    representative x is handed in (up to final-bit rounding of the moved
    matrices).  If the search closes on a finite group, the exact finite
    sum is returned with zero tail; otherwise growth constants are
    required for the tail and m must exceed growth.a.
    """
    ball = enumerate_ball(pres, x, R0, max_word_len, node_budget)
    if ball.whole_group:
        # finite group, fully enumerated: sum everything, no tail
        elements = enumerate_elements(pres, max_word_len, node_budget)
        pts = [pair.apply(x) for _, pair in elements]
        terms = sorted(((pt.g.key(), psi(p, pt)) for pt in pts), key=lambda kv: kv[0])
        total = complex(
            math.fsum(t.real for _, t in terms),
            math.fsum(t.imag for _, t in terms),
        )
        peak = max((abs(t) for _, t in terms), default=0.0)
        allowance = 10.0 * _EPS * max(len(terms) - 1, 0) * peak
        return CertifiedValue(total, allowance)
    if growth is None:
        raise ValueError("growth constants are required for an infinite orbit")
    if p.m <= growth.a:
        raise DivergentTail(
            f"m = {p.m} does not exceed the growth rate a = {growth.a:g}; "
            "the average is not guaranteed square-integrable"
        )
    total, allowance, _ = _sum_over_ball(ball, p)
    tail = _geometric_tail(growth.A, growth.a, p.m, R0)
    return CertifiedValue(total, tail + allowance)


def _validate_epsilon(eps: float, eps_gamma: float) -> None:
    if not (eps > 0.0 and eps < eps_gamma / 4.0):
        raise InvalidEpsilon(
            f"need 0 < eps < eps_gamma/4 = {eps_gamma / 4.0:g}, got {eps:g}"
        )


@dataclass(frozen=True)
class NonvanishingResult:
    verdict: str  # "verified" | "inconclusive"
    main_term: float
    tail_bound: float
    margin: float
    shells_summed: int
    params: dict

    @property
    def verified(self) -> bool:
        return self.verdict == "verified"


def nonvanishing_check(
    pres: GroupPresentation,
    m: int,
    b: Sequence[float],
    eps: float,
    growth: GrowthConstants,
    eps_gamma: float,
    shells: int = 64,
) -> NonvanishingResult:
    """Certify (Re psi_{m,b})-average != 0 at the sample point x_{a,eps}.

    Requires 0 < eps < eps_gamma/4 (eps_gamma a certified separation
    lower bound), which forces every nonidentity orbit point of x out of
    B(4 eps).  The main term is cosh^{-2m}(eps) f_b(tanh eps); the rest of
    the series is bounded shell by shell:

        3^{k-1} A sum_{n>=1} e^{4 a eps (n+1)} cosh^{-2m}(2 eps n)
                              f_b(tanh 2 eps (n+1)),

    summed explicitly up to `shells` with a geometric majorant for the
    remainder.  Verified means main > tail strictly (with an fp cushion).
    """
    _validate_epsilon(eps, eps_gamma)
    b = tuple(float(v) for v in b)
    if not any(v != 0.0 for v in b):
        raise ValueError("coefficient vector b must be nonzero")
    if m <= growth.a:
        raise DivergentTail(
            f"m = {m} does not exceed the growth rate a = {growth.a:g}"
        )
    k = len(b)
    a_vec = SignVector.for_coefficients(b)
    A, a = growth.A, growth.a

    main = math.exp(-2.0 * m * _log_cosh(eps)) * f_b(b, a_vec, math.tanh(eps))

    log_rho = 4.0 * a * eps - 2.0 * m * _log_cosh(2.0 * eps)
    if log_rho >= 0.0:
        raise DivergentTail(
            f"shell ratio e^(4 a eps) cosh^-2m(2 eps) = e^{log_rho:.3g} >= 1"
        )
    rho = math.exp(log_rho)
    partial = 0.0
    for n in range(1, shells + 1):
        partial += (
            math.exp(4.0 * a * eps * (n + 1) - 2.0 * m * _log_cosh(2.0 * eps * n))
            * f_b(b, a_vec, math.tanh(2.0 * eps * (n + 1)))
        )
    f_sup = f_b(b, a_vec, 1.0)
    remainder = f_sup * math.exp(4.0 * a * eps) * rho ** (shells + 1) / (1.0 - rho)
    tail = 3 ** (k - 1) * A * (partial + remainder) * (1.0 + 1e-9) + _TAIL_FLOOR

    margin = main - tail
    verified = margin > 1e-12 * (abs(main) + abs(tail))
    return NonvanishingResult(
        verdict="verified" if verified else "inconclusive",
        main_term=main,
        tail_bound=tail,
        margin=margin,
        shells_summed=shells,
        params={
            "label": pres.label,
            "m": m,
            "b": list(b),
            "k": k,
            "eps": eps,
            "eps_gamma": eps_gamma,
            "A": A,
            "a": a,
        },
    )


def certify_full_rank(
    values: np.ndarray, radii: np.ndarray
) -> tuple[float, float, bool]:
    """Certified smallest-singular-value test for a matrix of certified
    values.

    Returns (sigma_lower, total_error, certified).  sigma_lower is the
    computed smallest singular value minus a 1e-10 * ||M||_F rounding
    allowance; total_error = sqrt(#entries) * max radius bounds the
    Frobenius norm of any entrywise perturbation within the radii, so by
    Weyl's inequality sigma_lower > total_error certifies that every
    matrix within the radii has full column rank.
    """
    values = np.asarray(values, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if values.shape != radii.shape:
        raise ValueError("values and radii must have the same shape")
    fro = float(np.linalg.norm(values))
    sigma = float(np.linalg.svd(values, compute_uv=False)[-1])
    sigma_lower = max(sigma - 1e-10 * fro, 0.0)
    total_error = math.sqrt(values.size) * float(np.max(radii)) if values.size else 0.0
    return sigma_lower, total_error, sigma_lower > total_error


@dataclass(frozen=True)
class IndependenceCertificate:
    label: str
    m: int
    k: int
    eps: float
    eps_gamma: float
    growth: GrowthConstants
    truncation_radius: float
    max_word_len: int
    sign_vectors: tuple[tuple[int, ...], ...]
    sample_points: tuple[tuple[float, float, float, float], ...]
    values: tuple[tuple[float, ...], ...]
    radii: tuple[tuple[float, ...], ...]
    sigma_min: float
    svd_allowance: float
    total_error: float
    verdict: str  # "certified" | "inconclusive"
    seed: int

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "label": self.label,
            "m": self.m,
            "k": self.k,
            "eps": self.eps,
            "eps_gamma": self.eps_gamma,
            "growth": {
                "A": self.growth.A,
                "a": self.growth.a,
                "provenance": self.growth.provenance,
            },
            "truncation_radius": self.truncation_radius,
            "max_word_len": self.max_word_len,
            "seed": self.seed,
            "sign_vectors": [list(sv) for sv in self.sign_vectors],
            "sample_points": [list(pt) for pt in self.sample_points],
            "entries": [
                [
                    {"value": v, "error": r}
                    for v, r in zip(row_v, row_r)
                ]
                for row_v, row_r in zip(self.values, self.radii)
            ],
            "sigma_min": self.sigma_min,
            "svd_allowance": self.svd_allowance,
            "total_error": self.total_error,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def independence_certificate(
    pres: GroupPresentation,
    m: int,
    k: int,
    eps: float,
    growth: GrowthConstants,
    eps_gamma: float,
    R0: float = DEFAULT_TRUNCATION_RADIUS,
    max_word_len: int = DEFAULT_MAX_WORD_LEN,
    node_budget: int = DEFAULT_NODE_BUDGET,
    seed: int = 0,
    max_k: int = 12,
) -> IndependenceCertificate:
    """Certificate of linear independence of the k averaged eigenfunctions
    Re psi_{m, 3^j}, j < k, sampled at the 2^k points x_{a, eps}.

    Certified is a rigorous verdict (modulo the declared fp allowances and
    the growth hypothesis carried by `growth`): the entry matrix stays
    full-rank under any perturbation within the error radii, so the
    functions cannot satisfy a nontrivial linear relation.  Inconclusive
    never asserts dependence.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > max_k:
        raise ValueError(f"k = {k} exceeds the sample-set cap {max_k} (2^k points)")
    _validate_epsilon(eps, eps_gamma)
    sign_vectors = [
        SignVector(sv) for sv in itertools.product((1, -1), repeat=k)
    ]
    points = [sample_point(sv, eps) for sv in sign_vectors]
    params = [SphericalParams(m, 3**j) for j in range(k)]

    values = np.zeros((len(points), k))
    radii = np.zeros_like(values)
    for i, x in enumerate(points):
        ball = enumerate_ball(pres, x, R0, max_word_len, node_budget)
        if ball.whole_group:
            elements = enumerate_elements(pres, max_word_len, node_budget)
            pts = [pair.apply(x) for _, pair in elements]
            for j, p in enumerate(params):
                terms = sorted(((pt.g.key(), psi(p, pt)) for pt in pts), key=lambda kv: kv[0])
                values[i, j] = math.fsum(t.real for _, t in terms)
                peak = max((abs(t) for _, t in terms), default=0.0)
                radii[i, j] = 10.0 * _EPS * max(len(terms) - 1, 0) * peak
        else:
            if m <= growth.a:
                raise DivergentTail(
                    f"m = {m} does not exceed the growth rate a = {growth.a:g}"
                )
            for j, p in enumerate(params):
                total, allowance, _ = _sum_over_ball(ball, p)
                values[i, j] = total.real
                radii[i, j] = _geometric_tail(growth.A, growth.a, m, R0) + allowance

    sigma_lower, total_error, ok = certify_full_rank(values, radii)
    sigma_raw = float(np.linalg.svd(values, compute_uv=False)[-1])
    return IndependenceCertificate(
        label=pres.label,
        m=m,
        k=k,
        eps=eps,
        eps_gamma=eps_gamma,
        growth=growth,
        truncation_radius=R0,
        max_word_len=max_word_len,
        sign_vectors=tuple(sv.signs for sv in sign_vectors),
        sample_points=tuple(x.four_vector for x in points),
        values=tuple(tuple(float(v) for v in row) for row in values),
        radii=tuple(tuple(float(r) for r in row) for row in radii),
        sigma_min=sigma_lower,
        svd_allowance=sigma_raw - sigma_lower,
        total_error=total_error,
        verdict="certified" if ok else "inconclusive",
        seed=seed,
    )
