"""Independent verification machinery: finite differences, exhaustive
combinatorial checks, and randomized fuzzers.

Everything here recomputes its target from scratch (own stencils, own
angle sums, own matrix products) rather than calling the code path it is
meant to validate, so a bug would have to appear twice, identically, to
slip through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .eigenfunctions import SphericalParams, ambient_harmonic, psi
from .psl2 import AdS3Point, GroupElement, boost, random_element, rotation

__all__ = [
    "FDConfig",
    "NearCone",
    "fd_ambient_laplacian",
    "fd_second_derivatives",
    "harmonicity_residual",
    "laplacian_eigen_check",
    "check_koukou",
    "check_sekoi",
    "check_coefficient_bound",
    "check_sin_inequality",
    "fuzz_displacement_inequality",
    "check_computation_lemma",
    "arithmetic_progression_probe",
    "brute_force_ball_count",
    "radial_norm_quadrature",
    "run_suite",
]

_SIGNS = (1.0, 1.0, -1.0, -1.0)  # signature of d1^2 + d2^2 - d3^2 - d4^2


class NearCone(ValueError):
    """Stencil too close to the light cone Q = 0."""


@dataclass(frozen=True)
class FDConfig:
    h: float = 1e-3
    point_budget: int = 100_000

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step size must be positive")


def _q(x) -> float:
    return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]


def fd_second_derivatives(
    F: Callable[[tuple[float, float, float, float]], complex],
    x,
    cfg: FDConfig = FDConfig(),
) -> list[complex]:
    """Central second differences of F along the four axes."""
    x = tuple(float(v) for v in x)
    q = _q(x)
    if q <= 0 or q < 10.0 * cfg.h * math.sqrt(sum(v * v for v in x)):
        raise NearCone(f"Q(x) = {q:g} too small for step h = {cfg.h:g}")
    h = cfg.h
    center = F(x)
    out = []
    for i in range(4):
        xp = list(x)
        xm = list(x)
        xp[i] += h
        xm[i] -= h
        out.append((F(tuple(xp)) - 2.0 * center + F(tuple(xm))) / (h * h))
    return out

def fd_ambient_laplacian(
    F: Callable[[tuple[float, float, float, float]], complex],
    x,
    cfg: FDConfig = FDConfig(),
) -> complex:
    """d1^2 F + d2^2 F - d3^2 F - d4^2 F by central differences, O(h^2)."""
    d = fd_second_derivatives(F, x, cfg)
    return sum(s * v for s, v in zip(_SIGNS, d))


def harmonicity_residual(
    p: SphericalParams, x, cfg: FDConfig = FDConfig(), part: str = "re"
) -> float:
    """Relative wave-operator residual of Re/Im of the ambient extension.

    The four second-derivative terms cancel exactly for the true function,
    so the meaningful relative measure is |sum| / sum of |terms|.
    """
    if part == "re":
        F = lambda y: ambient_harmonic(p, y).real
    elif part == "im":
        F = lambda y: ambient_harmonic(p, y).imag
    else:
        raise ValueError(f"part must be 're' or 'im', got {part!r}")
    d = fd_second_derivatives(F, x, cfg)
    total = abs(sum(s * v for s, v in zip(_SIGNS, d)))
    scale = sum(abs(v) for v in d)
    return total / scale if scale > 0 else total


def laplacian_eigen_check(
    p: SphericalParams, x: AdS3Point, cfg: FDConfig = FDConfig()
) -> float:
    """|box psi - lambda psi| / (1 + |psi|) at a point of the quadric.

    The intrinsic Laplacian is assembled from the ambient one: for the
    degree -2m homogeneous extension F, the radial part contributes
    (r d/dr)^2 + 2 r d/dr acting on r^-2m, i.e. exactly 4m^2 - 4m =
    lambda_m, so box psi = -box_ambient F + lambda psi on Q = 1.
    """
    lam = p.eigenvalue()
    ps = psi(p, x)
    lap_ambient = fd_ambient_laplacian(lambda y: ambient_harmonic(p, y), x.four_vector, cfg)
    box_psi = -lap_ambient + lam * ps
    return abs(box_psi - lam * ps) / (1.0 + abs(ps))


# ---------------------------------------------------------------------------
# combinatorial lemmas
# ---------------------------------------------------------------------------


def _theta(signs: Sequence[int], N: int) -> float:
    # independent re-derivation of the sample angle
    chi = {1: 0, -1: 1}
    total = 0.0
    prev = 1
    for i, s in enumerate(signs):
        total += (chi[s] - chi[prev]) / N**i
        prev = s
    return math.pi * total


def check_sekoi(k: int, N: int) -> tuple[bool, float]:
    """Exhaustively verify a_j cos(N^j theta_a) > 0 over all sign vectors
    of length k; returns (all positive, minimal margin)."""
    if k < 1 or k > 16:
        raise ValueError("k must be in 1..16")
    if N < 3 or N % 2 == 0:
        raise ValueError("N must be an odd integer >= 3")
    worst = math.inf
    for bits in range(2**k):
        signs = [1 if (bits >> j) & 1 == 0 else -1 for j in range(k)]
        theta = _theta(signs, N)
        for j, aj in enumerate(signs):
            worst = min(worst, aj * math.cos(N**j * theta))
    return worst > 0.0, worst


def check_coefficient_bound(k: int) -> tuple[bool, float]:
    """Exhaustively verify |cos(3^j theta_a)| >= 3^-(k-1) for all sign
    vectors of length k; returns (holds, minimal slack)."""
    if k < 1 or k > 14:
        raise ValueError("k must be in 1..14")
    floor = 3.0 ** (-(k - 1))
    worst = math.inf
    for bits in range(2**k):
        signs = [1 if (bits >> j) & 1 == 0 else -1 for j in range(k)]
        theta = _theta(signs, 3)
        for j in range(k):
            worst = min(worst, abs(math.cos(3**j * theta)) - floor)
    return worst >= 0.0, worst


def check_sin_inequality(grid: int = 10_000) -> tuple[bool, float]:
    """sin(pi x / 2) >= x on [0, 1], the source of the coefficient bound."""
    xs = np.linspace(0.0, 1.0, grid)
    slack = np.sin(0.5 * math.pi * xs) - xs
    return bool(np.min(slack) >= 0.0), float(np.min(slack))


def arithmetic_progression_probe(
    signs: Sequence[int] = (1, 1, 1, -1, 1),
    start: int = 1,
    step: int = 1,
    grid: int = 1_000_000,
) -> bool:
    """Grid search for theta with a_j cos(m_j theta) > 0 for the arithmetic
    progression m_j = start + j*step.

    Returns True when no grid point satisfies all sign conditions.  This
    is evidence of nonexistence, not a proof: a grid cannot certify a
    negative over the continuum.
    """
    ms = np.array([start + j * step for j in range(len(signs))], dtype=float)
    thetas = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    ok = np.ones(grid, dtype=bool)
    for aj, mj in zip(signs, ms):
        ok &= aj * np.cos(mj * thetas) > 0.0
        if not ok.any():
            return True
    return not ok.any()


def check_koukou(
    C: float,
    a: float,
    eps: float,
    s: int,
    m: int,
    n_random: int = 3,
    seed: int = 0,
    shells: int = 64,
) -> tuple[bool, float]:
    """Shell-sum inequality for polynomials with nonnegative coefficients:

        C sum_{n>=1} e^{4a(n+1)eps} cosh^-m(2 n eps) f(tanh 2(n+1) eps)
            <  cosh^-m(eps) f(tanh eps).

    Checked for every monomial x^j, j <= s, and `n_random` random
    nonnegative-coefficient polynomials; the left side carries a certified
    geometric remainder.  Returns (all hold, minimal relative margin).
    """
    if C <= 0 or a <= 0 or eps <= 0 or s < 0:
        raise ValueError("need C, a, eps > 0 and s >= 0")
    log_rho = 4.0 * a * eps - m * _log_cosh(2.0 * eps)
    if log_rho >= 0.0:
        return False, -math.inf
    rho = math.exp(log_rho)

    rng = np.random.default_rng(seed)
    polys = [np.eye(s + 1)[j] for j in range(s + 1)]
    polys += [rng.uniform(0.0, 1.0, s + 1) for _ in range(n_random)]

    worst = math.inf
    for coeffs in polys:

        def f(u: float) -> float:
            return float(np.polyval(coeffs[::-1], u))

        lhs = 0.0
        for n in range(1, shells + 1):
            lhs += math.exp(4.0 * a * eps * (n + 1) - m * _log_cosh(2.0 * eps * n)) * f(
                math.tanh(2.0 * eps * (n + 1))
            )
        remainder = f(1.0) * math.exp(4.0 * a * eps) * rho ** (shells + 1) / (1.0 - rho)
        lhs = C * (lhs + remainder)
        rhs = math.exp(-m * _log_cosh(eps)) * f(math.tanh(eps))
        if rhs <= 0.0:
            return False, -math.inf
        worst = min(worst, (rhs - lhs) / rhs)
    return worst > 0.0, worst


def _log_cosh(t: float) -> float:
    t = abs(t)
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)


# ---------------------------------------------------------------------------
# geometry fuzzers and grids
# ---------------------------------------------------------------------------


def fuzz_displacement_inequality(
    trials: int = 100_000, seed: int = 0, slack: float = 1e-9
) -> tuple[bool, float]:
    """Randomized check of ||g1 x g2^-1|| >= | ||g1|| - ||g2|| | - ||x||."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(trials):
        g1 = random_element(rng, 3.0)
        g2 = random_element(rng, 3.0)
        x = AdS3Point(random_element(rng, 2.0))
        moved = AdS3Point(g1 @ x.g @ g2.inverse()).norm()
        bound = abs(g1.norm() - g2.norm()) - x.norm()
        worst = min(worst, moved - bound)
    return worst >= -slack, worst


def check_computation_lemma(n: int, r: float) -> tuple[bool, float]:
    """||a(r/8)^-1 k(j pi/n) a(r/8)|| >= eta_n for j = 1..n-1, with
    cosh eta_n = 1 + 2 (sinh(r/4) sin(pi/n))^2 recomputed inline."""
    if n < 2:
        raise ValueError("n must be >= 2")
    eta_n = math.acosh(1.0 + 2.0 * (math.sinh(r / 4.0) * math.sin(math.pi / n)) ** 2)
    inner = boost(r / 8.0).inverse()
    outer = boost(r / 8.0)
    worst = math.inf
    for j in range(1, n):
        g = inner @ rotation(j * math.pi / n) @ outer
        worst = min(worst, g.norm() - eta_n)
    return worst >= -1e-12, worst


def brute_force_ball_count(pres, x: AdS3Point, R: float, depth: int) -> int:
    """Unpruned word enumeration counting orbit points in the pseudo-ball.

    Deliberately reimplements the matrix walk with raw tuples (entries,
    products, norms) so it shares no code with the pruned search it
    oracles.  Exponential in depth; meant for desk-scale cross-checks.
    """
    gens = []
    for g in pres.generators:
        gens.append((g.first.entries, g.second.entries))
        gens.append((_inv(g.first.entries), _inv(g.second.entries)))

    xg = x.g.entries
    tol = 1e-9
    dedup = pres.strategy == "hash"
    e4 = (1.0, 0.0, 0.0, 1.0)
    seen = {(_round4(e4), _round4(e4))} if dedup else None

    def in_ball(m1, m2) -> bool:
        moved = _mul(_mul(m1, xg), _inv(m2))
        ssq = 0.5 * (moved[0] ** 2 + moved[1] ** 2 + moved[2] ** 2 + moved[3] ** 2)
        nrm = math.acosh(ssq) if ssq > 1.0 else 0.0
        return nrm <= R + tol

    count = 1 if in_ball((1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, 1.0)) else 0
    level = [((1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, 1.0), -1)]
    for _ in range(depth):
        nxt = []
        for m1, m2, last in level:
            for idx, (h1, h2) in enumerate(gens):
                # generators are interleaved (g0, g0^-1, g1, g1^-1, ...),
                # so the inverse of letter idx is idx ^ 1
                if not dedup and last >= 0 and idx == last ^ 1:
                    continue
                c1 = _mul(m1, h1)
                c2 = _mul(m2, h2)
                if dedup:
                    key = (_round4(c1), _round4(c2))
                    if key in seen:
                        continue
                    seen.add(key)
                if in_ball(c1, c2):
                    count += 1
                nxt.append((c1, c2, idx))
        level = nxt
    return count


def _mul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def _inv(p):
    a, b, c, d = p
    return (d, -b, -c, a)


def _round4(p):
    r = [round(v, 9) + 0.0 for v in p]
    for v in r:
        if v != 0.0:
            if v < 0.0:
                r = [-u + 0.0 for u in r]
            break
    return tuple(r)


def radial_norm_quadrature(m: int, k: int) -> float:
    """Adaptive quadrature of int_0^inf tanh^2k(t) cosh^-4m(t) sinh(2t) dt,
    written from the integrand alone (no Beta shortcut)."""

    def integrand(t: float) -> float:
        return math.tanh(t) ** (2 * k) * math.cosh(t) ** (-4 * m) * math.sinh(2.0 * t)

    value, _ = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


# ---------------------------------------------------------------------------
# suite runner (CLI `verify`)
# ---------------------------------------------------------------------------

SUITES = (
    "sekoi",
    "coefficient",
    "sin-inequality",
    "koukou",
    "displacement",
    "computation",
    "harmonicity",
    "eigen",
    "quadrature",
)


def run_suite(selectors: Sequence[str] | None = None, seed: int = 0) -> dict:
    """Run the named check suites (all by default); returns a JSON-ready
    report with one entry per check, each carrying its margin."""
    chosen = list(SUITES) if not selectors else list(selectors)
    unknown = [s for s in chosen if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite selector(s): {', '.join(unknown)}")

    report: dict = {"seed": seed, "checks": {}}
    rng = np.random.default_rng(seed)

    if "sekoi" in chosen:
        worst = math.inf
        for k in range(1, 13):
            for N in (3, 5, 7):
                ok, margin = check_sekoi(k, N)
                worst = min(worst, margin)
                if not ok:
                    break
        report["checks"]["sekoi"] = {"pass": worst > 0.0, "min_margin": worst}

    if "coefficient" in chosen:
        worst = math.inf
        for k in range(1, 13):
            ok, margin = check_coefficient_bound(k)
            worst = min(worst, margin)
        report["checks"]["coefficient"] = {"pass": worst >= 0.0, "min_margin": worst}

    if "sin-inequality" in chosen:
        ok, margin = check_sin_inequality()
        report["checks"]["sin-inequality"] = {"pass": ok, "min_margin": margin}

    if "koukou" in chosen:
        from .thresholds import ThresholdInputs, m_threshold

        worst = math.inf
        ok_all = True
        for C in (0.5, 1.0, 10.0):
            for a in (0.5, 1.0, 2.0):
                for eps in (0.1, 0.5, 1.0):
                    for s in (1, 3, 9):
                        mt = m_threshold(ThresholdInputs(C, a, eps, s))
                        for bump in (1, 5):
                            m = math.ceil(mt) + bump
                            ok, margin = check_koukou(C, a, eps, s, m, seed=seed)
                            ok_all &= ok
                            worst = min(worst, margin)
        report["checks"]["koukou"] = {"pass": ok_all and worst > 0.0, "min_margin": worst}

    if "displacement" in chosen:
        ok, worst = fuzz_displacement_inequality(100_000, seed)
        report["checks"]["displacement"] = {"pass": ok, "min_slack": worst}

    if "computation" in chosen:
        worst = math.inf
        ok_all = True
        for n in range(2, 13):
            for r in (0.1, 0.5, 1.0, 2.0):
                ok, margin = check_computation_lemma(n, r)
                ok_all &= ok
                worst = min(worst, margin)
        report["checks"]["computation"] = {"pass": ok_all, "min_margin": worst}

    if "harmonicity" in chosen:
        cfg = FDConfig()
        worst = 0.0
        for _ in range(20):
            x = _random_ambient_point(rng)
            p = SphericalParams(int(rng.integers(1, 5)), int(rng.integers(0, 5)))
            worst = max(worst, harmonicity_residual(p, x, cfg, "re"))
            worst = max(worst, harmonicity_residual(p, x, cfg, "im"))
        report["checks"]["harmonicity"] = {"pass": worst < 1e-4, "max_residual": worst}

    if "eigen" in chosen:
        cfg = FDConfig()
        worst = 0.0
        for _ in range(20):
            x = AdS3Point(random_element(rng, 1.5))
            p = SphericalParams(int(rng.integers(1, 4)), int(rng.integers(0, 3)))
            worst = max(worst, laplacian_eigen_check(p, x, cfg))
        report["checks"]["eigen"] = {"pass": worst < 1e-4, "max_residual": worst}

    if "quadrature" in chosen:
        from .eigenfunctions import l2_radial_norm_sq

        worst = 0.0
        for m in range(1, 7):
            for k in range(0, 10):
                exact = l2_radial_norm_sq(SphericalParams(m, k))
                approx = radial_norm_quadrature(m, k)
                worst = max(worst, abs(approx - exact) / exact)
        report["checks"]["quadrature"] = {"pass": worst < 1e-8, "max_rel_error": worst}

    report["pass"] = all(c["pass"] for c in report["checks"].values())
    return report


def _random_ambient_point(rng: np.random.Generator, q_min: float = 0.5):
    while True:
        x = rng.normal(0.0, 1.0, 4)
        if _q(x) >= q_min:
            return tuple(float(v) for v in x)
