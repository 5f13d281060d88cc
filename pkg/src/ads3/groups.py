"""Finitely generated isometry groups of AdS^3 and orbit combinatorics.

A group element is a pair (g1, g2) of PSL(2,R) matrices acting on
AdS^3 = PSL(2,R) by x -> g1 x g2^{-1}.  A presentation is a finite list
of generating pairs together with a word-combinatorics strategy:

  * "free"  -- enumerate freely reduced words, no cancellation search
               (correct and fastest when the generators generate freely);
  * "hash"  -- deduplicate by canonical matrix hashing at 1e-9, required
               for presentations with relations (e.g. torsion factors).

Orbit-ball search is a breadth-first walk over words pruned by the
displacement bound  ||(g1,g2)x|| >= | ||g1|| - ||g2|| | - ||x||  combined
with per-letter subadditivity slack: a prefix w is abandoned once

    | ||w1|| - ||w2|| | - ||x|| - (remaining letters) * S  >  R,

S = max over generators of ||g1|| + ||g2||.  The bound is conservative,
so a completed search provably lists every word of length <= max_word_len
whose orbit point lies in the pseudo-ball; that word-length frontier is
what the `exhaustive` flag certifies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .psl2 import (
    AdS3Point,
    GroupElement,
    boost,
    identity,
    norm_lower_bound,
    random_element,
    rotation,
)

__all__ = [
    "IsometryPair",
    "GroupPresentation",
    "OrbitBall",
    "OrbitElement",
    "GrowthConstants",
    "BudgetExceeded",
    "SearchFailed",
    "InvalidCertificateInput",
    "NoHyperbolicWords",
    "GroupFileError",
    "enumerate_ball",
    "count",
    "enumerate_elements",
    "epsilon_upper",
    "epsilon_lower_certified",
    "separating_conjugation",
    "fit_growth",
    "alpha_contraction_check",
    "standard_class_n",
    "lipschitz_lower_bound",
    "load_presentation",
    "save_presentation",
]

DEFAULT_NODE_BUDGET = 10_000_000

# moved-norm comparisons get this much slack so that boundary orbits
# (norm exactly R up to rounding) are counted stably
BALL_TOL = 1e-9


class BudgetExceeded(RuntimeError):
    """Node budget exhausted; the ball is too large or the action is
    insufficiently proper for this search."""


class SearchFailed(RuntimeError):
    """Conjugation search exhausted its trials; carries the best candidate."""

    def __init__(self, message: str, best: "IsometryPair", best_gap: float):
        super().__init__(message)
        self.best = best
        self.best_gap = best_gap


class InvalidCertificateInput(ValueError):
    pass


class NoHyperbolicWords(RuntimeError):
    pass


class GroupFileError(ValueError):
    """Presentation file rejected; names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class IsometryPair:
    first: GroupElement
    second: GroupElement

    def mu(self) -> tuple[float, float]:
        return (self.first.norm(), self.second.norm())

    def inverse(self) -> "IsometryPair":
        return IsometryPair(self.first.inverse(), self.second.inverse())

    def compose(self, other: "IsometryPair") -> "IsometryPair":
        return IsometryPair(self.first @ other.first, self.second @ other.second)

    __matmul__ = compose

    def apply(self, x: AdS3Point) -> AdS3Point:
        return x.moved_by(self.first, self.second)

    def is_identity(self, tol: float = 1e-9) -> bool:
        return self.first.is_identity(tol) and self.second.is_identity(tol)

    def key(self) -> tuple:
        return (self.first.key(), self.second.key())

    @staticmethod
    def identity() -> "IsometryPair":
        return IsometryPair(identity(), identity())


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[IsometryPair, ...]
    strategy: str = "free"
    label: str = ""
    kernel_order: int | None = None  # set by standard_class_n

    def __post_init__(self):
        if self.strategy not in ("free", "hash"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        for i, g in enumerate(self.generators):
            if g.is_identity():
                raise ValueError(f"generator {i} is the identity pair")
        object.__setattr__(self, "generators", tuple(self.generators))

    def alphabet(self) -> list[tuple[int, IsometryPair]]:
        """Generators followed by their formal inverses; letter i >= n is
        the inverse of letter i - n."""
        n = len(self.generators)
        letters = [(i, g) for i, g in enumerate(self.generators)]
        letters += [(n + i, g.inverse()) for i, g in enumerate(self.generators)]
        return letters

    def conjugated(self, g: IsometryPair) -> "GroupPresentation":
        gens = tuple(
            IsometryPair(
                g.first.inverse() @ p.first @ g.first,
                g.second.inverse() @ p.second @ g.second,
            )
            for p in self.generators
        )
        return GroupPresentation(gens, self.strategy, self.label + "~conj", self.kernel_order)


class _DedupIndex:
    """Scale-aware near-duplicate index for isometry pairs.

    Entries are compared at tolerance 1e-9, absolute at unit scale and
    relative beyond (matrix entries of long words reach 1e15, where an
    absolute grid would stop catching recomputed copies of the same
    element).  Lookup buckets on a rounded log of the total entry mass and
    probes neighboring buckets, so quantization edges cannot split a pair
    of copies.
    """

    __slots__ = ("buckets",)

    def __init__(self):
        self.buckets: dict[int, list[tuple[float, ...]]] = {}

    @staticmethod
    def _flat(pair: IsometryPair) -> tuple[float, ...]:
        return pair.first.entries + pair.second.entries

    def add_if_new(self, pair: IsometryPair) -> bool:
        flat = self._flat(pair)
        mass = sum(abs(v) for v in flat)
        q = round(math.log1p(mass) * 1e6)
        for b in (q - 1, q, q + 1):
            for cand in self.buckets.get(b, ()):
                if all(
                    abs(u - v) <= 1e-9 * max(1.0, abs(u), abs(v))
                    for u, v in zip(cand, flat)
                ):
                    return False
        self.buckets.setdefault(q, []).append(flat)
        return True


def word_str(word: tuple[int, ...], n_gens: int) -> str:
    if not word:
        return "e"
    parts = []
    for letter in word:
        if letter < n_gens:
            parts.append(f"g{letter}")
        else:
            parts.append(f"g{letter - n_gens}^-1")
    return "*".join(parts)


@dataclass(frozen=True)
class OrbitElement:
    word: tuple[int, ...]
    pair: IsometryPair
    moved: AdS3Point
    moved_norm: float


@dataclass(frozen=True)
class OrbitBall:
    center: AdS3Point
    radius: float
    elements: tuple[OrbitElement, ...]
    exhaustive: bool
    max_word_len: int
    explored_nodes: int
    pruned_branches: int
    whole_group: bool  # search closed with nothing pruned: the group is finite
    n_gens: int

    def count(self) -> int:
        return len(self.elements)

    def words(self) -> list[str]:
        return [word_str(e.word, self.n_gens) for e in self.elements]


def _inverse_letter(letter: int, n: int) -> int:
    return letter + n if letter < n else letter - n


def _bfs(
    pres: GroupPresentation,
    max_word_len: int,
    node_budget: int,
    *,
    x: AdS3Point | None = None,
    radius: float = math.inf,
):
    """Shared word walk.  With a center x and finite radius it performs the
    pruned ball search, collecting only ball members; otherwise it
    enumerates the group to depth and collects everything."""
    alphabet = pres.alphabet()
    n = len(pres.generators)
    slack_per_letter = max((g.first.norm() + g.second.norm() for _, g in alphabet), default=0.0)
    ball_mode = x is not None and math.isfinite(radius)
    norm_x = x.norm() if x is not None else 0.0
    xg = x.g if x is not None else None

    root = IsometryPair.identity()
    seen = None
    if pres.strategy == "hash":
        seen = _DedupIndex()
        seen.add_if_new(root)
    frontier: list[tuple[tuple[int, ...], IsometryPair]] = [((), root)]
    out: list = []
    if ball_mode:
        if norm_x <= radius + BALL_TOL:
            out.append(OrbitElement((), root, x, norm_x))
    else:
        out.append(((), root))
    explored = 1
    pruned = 0

    for depth in range(1, max_word_len + 1):
        remaining_after = max_word_len - depth
        next_frontier = []
        for word, pair in frontier:
            last = word[-1] if word else None
            for letter, gen in alphabet:
                if (
                    pres.strategy == "free"
                    and last is not None
                    and letter == _inverse_letter(last, n)
                ):
                    continue
                explored += 1
                if explored > node_budget:
                    raise BudgetExceeded(
                        f"node budget {node_budget} exceeded at word length {depth}"
                    )
                child = pair @ gen
                if seen is not None and not seen.add_if_new(child):
                    continue
                cw = word + (letter,)
                if ball_mode:
                    gap = abs(child.first.norm() - child.second.norm())
                    if gap - norm_x <= radius + BALL_TOL:
                        moved = AdS3Point(child.first @ xg @ child.second.inverse())
                        mn = moved.norm()
                        if mn <= radius + BALL_TOL:
                            out.append(OrbitElement(cw, child, moved, mn))
                    if gap - norm_x - remaining_after * slack_per_letter > radius:
                        pruned += 1
                        continue
                else:
                    out.append((cw, child))
                next_frontier.append((cw, child))
        frontier = next_frontier
        if not frontier:
            break
    return out, explored, pruned, not frontier


def enumerate_ball(
    pres: GroupPresentation,
    x: AdS3Point,
    R: float,
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> OrbitBall:
    """All group elements of word length <= max_word_len moving x into the
    pseudo-ball of radius R, with the pruning certificate described in the
    module docstring."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    members, explored, pruned, closed = _bfs(
        pres, max_word_len, node_budget, x=x, radius=R
    )
    members.sort(key=lambda e: (len(e.word), e.word))
    return OrbitBall(
        center=x,
        radius=R,
        elements=tuple(members),
        exhaustive=True,
        max_word_len=max_word_len,
        explored_nodes=explored,
        pruned_branches=pruned,
        whole_group=closed and pruned == 0,
        n_gens=len(pres.generators),
    )


def count(
    pres: GroupPresentation,
    x: AdS3Point,
    R: float,
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> int:
    ball = enumerate_ball(pres, x, R, max_word_len, node_budget)
    return ball.count()


def enumerate_elements(
    pres: GroupPresentation,
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> list[tuple[tuple[int, ...], IsometryPair]]:
    """Group elements as (word, pair), identity first, in BFS order."""
    nodes, _, _, _ = _bfs(pres, max_word_len, node_budget)
    return nodes


def epsilon_upper(
    pres: GroupPresentation,
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """min over enumerated nonidentity elements of |n1 - n2| / 3.

    An upper bound for the group's separation constant (the infimum over
    the whole group can only be smaller); +inf for the trivial group.
    """
    best = math.inf
    for word, pair in enumerate_elements(pres, max_word_len, node_budget):
        if not word or pair.is_identity():
            continue
        n1, n2 = pair.mu()
        best = min(best, abs(n1 - n2) / 3.0)
    return best


def epsilon_lower_certified(
    pres: GroupPresentation, alpha: float, systole: float
) -> float:
    """systole * (1 - alpha) / 3, valid when every nonidentity element
    satisfies ||g2|| <= alpha ||g1|| and ||g1|| >= systole.

    The hypotheses are the caller's to certify (alpha_contraction_check
    provides empirical support); under them,

        3 eps >= inf | ||g1|| - ||g2|| | >= (1 - alpha) inf ||g1||.
    """
    if not (0.0 <= alpha < 1.0):
        raise InvalidCertificateInput(f"alpha must lie in [0, 1), got {alpha}")
    if systole <= 0.0:
        raise InvalidCertificateInput(f"systole must be positive, got {systole}")
    return systole * (1.0 - alpha) / 3.0


def separating_conjugation(
    pres: GroupPresentation,
    depth: int,
    trials: int,
    seed: int,
    gap_tol: float = 1e-8,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> IsometryPair:
    """A pair g with all depth-bounded nonidentity elements of g^-1 pres g
    having distinct factor norms (gap > gap_tol).

    Norm-equal pairs form a measure-zero wall, so random conjugation
    almost surely works; the search is deterministic given the seed.  The
    identity is tried first so that already-separated groups pass through
    untouched.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    elements = [
        p for w, p in enumerate_elements(pres, depth, node_budget) if w and not p.is_identity()
    ]

    def min_gap(g: IsometryPair) -> float:
        if not elements:
            return math.inf
        g1i, g2i = g.first.inverse(), g.second.inverse()
        gap = math.inf
        for p in elements:
            c1 = g1i @ p.first @ g.first
            c2 = g2i @ p.second @ g.second
            gap = min(gap, abs(c1.norm() - c2.norm()))
        return gap

    rng = np.random.default_rng(seed)
    best_pair = IsometryPair.identity()
    best_gap = min_gap(best_pair)
    if best_gap > gap_tol:
        return best_pair
    for _ in range(trials):
        cand = IsometryPair(random_element(rng, 1.0), random_element(rng, 1.0))
        gap = min_gap(cand)
        if gap > gap_tol:
            return cand
        if gap > best_gap:
            best_pair, best_gap = cand, gap
    raise SearchFailed(
        f"no separating conjugation found in {trials} trials (best gap {best_gap:.3e})",
        best_pair,
        best_gap,
    )


@dataclass(frozen=True)
class GrowthConstants:
    """Validated constants for the orbit-count bound N(x, R) < A e^{a R}."""

    A: float
    a: float
    provenance: str = "user"  # "fitted" | "user" | "fact(alpha)"
    alpha: float | None = None
    probes: tuple[tuple[float, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.A <= 0 or self.a <= 0:
            raise ValueError("growth constants must be strictly positive")

    def dominates(self, probes: Iterable[tuple[float, int]]) -> bool:
        return all(n < self.A * math.exp(self.a * r) for r, n in probes)

    @staticmethod
    def user(A: float, a: float) -> "GrowthConstants":
        return GrowthConstants(A, a, "user")

    @staticmethod
    def from_alpha(alpha: float, c: float) -> "GrowthConstants":
        """A = c, a = 8/(1-alpha): the counting bound for alpha-contractive
        groups meeting the torsion-free ball condition.  The prefactor c is
        not pinned down by theory here and is a configuration input."""
        if not (0.0 <= alpha < 1.0):
            raise InvalidCertificateInput(f"alpha must lie in [0, 1), got {alpha}")
        if c <= 0:
            raise InvalidCertificateInput("c must be positive")
        return GrowthConstants(c, 8.0 / (1.0 - alpha), f"fact(alpha={alpha})", alpha)


def fit_growth(
    pres: GroupPresentation,
    x: AdS3Point,
    r_max: float,
    grid_step: float,
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> GrowthConstants:
    """Least-squares fit of log N(x, R) against R, with A inflated so the
    bound strictly dominates every probed count.

    The result is flagged "fitted": it is empirical, not certified, and
    the downstream tail bounds inherit that caveat.
    """
    if grid_step <= 0 or r_max < grid_step:
        raise ValueError("need 0 < grid_step <= r_max")
    ball = enumerate_ball(pres, x, r_max, max_word_len, node_budget)
    norms = sorted(e.moved_norm for e in ball.elements)
    radii = [grid_step * i for i in range(1, int(r_max / grid_step) + 1)]
    probes = []
    for r in radii:
        n = sum(1 for v in norms if v <= r + BALL_TOL)
        probes.append((r, n))
    rs = np.array([r for r, n in probes if n > 0])
    ns = np.array([n for _, n in probes if n > 0])
    if len(rs) < 2:
        a_fit = 1e-6
        intercept = 0.0
    else:
        a_fit, intercept = np.polyfit(rs, np.log(ns.astype(float)), 1)
        a_fit = max(float(a_fit), 1e-6)
    A0 = math.exp(float(intercept))
    ratio = max((n / (A0 * math.exp(a_fit * r)) for r, n in probes), default=1.0)
    A = A0 * max(ratio, 1e-12) * (1.0 + 1e-9)
    gc = GrowthConstants(A, a_fit, "fitted", probes=tuple(probes))
    assert gc.dominates(probes)
    return gc


def alpha_contraction_check(
    pres: GroupPresentation,
    alpha: float,
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[bool, float]:
    """Does every enumerated nonidentity element satisfy
    ||g2|| <= alpha ||g1|| or ||g1|| <= alpha ||g2||?

    Returns (verdict, worst ratio), the ratio being
    max over elements of min(||g2||/||g1||, ||g1||/||g2||); a pair of
    rotations (both norms zero) counts as ratio 1.
    """
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    worst = 0.0
    for word, pair in enumerate_elements(pres, max_word_len, node_budget):
        if not word or pair.is_identity():
            continue
        n1, n2 = pair.mu()
        if n1 == 0.0 and n2 == 0.0:
            ratio = 1.0
        elif n1 == 0.0 or n2 == 0.0:
            ratio = 0.0
        else:
            ratio = min(n1 / n2, n2 / n1)
        worst = max(worst, ratio)
    return worst <= alpha, worst


def standard_class_n(
    fuchsian_gens: Sequence[GroupElement],
    n: int,
    r: float,
    label: str | None = None,
) -> GroupPresentation:
    """Standard presentation of torsion class n in conjugated position.

    First-factor generators (gamma, E) from the given Fuchsian group
    (caller asserts discreteness and systole >= r); for n >= 2 a second
    factor generator (E, a(r/8)^-1 k(pi/n) a(r/8)) realizing the cyclic
    kernel of order n, whose norm is at least eta_n and at most r/2.
    """
    from .thresholds import InvalidClass

    if n < 1:
        raise InvalidClass(f"class must be a positive integer, got {n}")
    if r <= 0:
        raise ValueError("r must be positive")
    e = identity()
    gens = [IsometryPair(g, e) for g in fuchsian_gens]
    if n >= 2:
        c = boost(r / 8.0).inverse() @ rotation(math.pi / n) @ boost(r / 8.0)
        gens.append(IsometryPair(e, c))
    if label is None:
        label = f"class-{n}(r={r:g})"
    return GroupPresentation(tuple(gens), "hash", label, kernel_order=n)


def lipschitz_lower_bound(
    j_gens: Sequence[GroupElement],
    rho_gens: Sequence[GroupElement],
    max_word_len: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """sup over enumerated words w with j(w) hyperbolic of
    translation_length(rho(w)) / translation_length(j(w)).

    Translation lengths are conjugation invariants, so this is a lower
    bound for the equivariant Lipschitz constant of (j, rho); it is a
    heuristic (non-certified) one because the sup runs over finitely many
    words.
    """
    if len(j_gens) != len(rho_gens):
        raise ValueError("j and rho must be given on the same generators")
    pres = GroupPresentation(
        tuple(IsometryPair(j, p) for j, p in zip(j_gens, rho_gens)),
        "free",
        "lip-probe",
    )
    best = None
    for word, pair in enumerate_elements(pres, max_word_len, node_budget):
        if not word:
            continue
        lj = pair.first.translation_length()
        if lj <= 0.0:
            continue
        lr = pair.second.translation_length()
        ratio = lr / lj
        best = ratio if best is None else max(best, ratio)
    if best is None:
        raise NoHyperbolicWords(
            f"no word of length <= {max_word_len} has |tr j(w)| > 2"
        )
    return best


# ---------------------------------------------------------------------------
# presentation files:
# {"label": str, "strategy": "free"|"hash",
#  "generators": [{"first": [a,b,c,d], "second": [a,b,c,d]}, ...]}
# ---------------------------------------------------------------------------


def _element_from_json(value, field_name: str) -> GroupElement:
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise GroupFileError(field_name, "expected a list of 4 numbers [a, b, c, d]")
    try:
        entries = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise GroupFileError(field_name, "entries must be numbers") from None
    try:
        return GroupElement(entries)
    except ValueError as exc:
        raise GroupFileError(field_name, str(exc)) from None


def presentation_from_dict(data: dict) -> GroupPresentation:
    if not isinstance(data, dict):
        raise GroupFileError("<root>", "expected a JSON object")
    label = data.get("label", "")
    if not isinstance(label, str):
        raise GroupFileError("label", "expected a string")
    strategy = data.get("strategy", "free")
    if strategy not in ("free", "hash"):
        raise GroupFileError("strategy", f"expected 'free' or 'hash', got {strategy!r}")
    gens_json = data.get("generators")
    if not isinstance(gens_json, list):
        raise GroupFileError("generators", "expected a list")
    gens = []
    for i, item in enumerate(gens_json):
        if not isinstance(item, dict):
            raise GroupFileError(f"generators[{i}]", "expected an object")
        for side in ("first", "second"):
            if side not in item:
                raise GroupFileError(f"generators[{i}].{side}", "missing")
        first = _element_from_json(item["first"], f"generators[{i}].first")
        second = _element_from_json(item["second"], f"generators[{i}].second")
        pair = IsometryPair(first, second)
        if pair.is_identity():
            raise GroupFileError(f"generators[{i}]", "generator is the identity pair")
        gens.append(pair)
    return GroupPresentation(tuple(gens), strategy, label)


def presentation_to_dict(pres: GroupPresentation) -> dict:
    return {
        "label": pres.label,
        "strategy": pres.strategy,
        "generators": [
            {"first": list(g.first.entries), "second": list(g.second.entries)}
            for g in pres.generators
        ],
    }


def load_presentation(path: str | Path) -> GroupPresentation:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GroupFileError("<file>", str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GroupFileError("<json>", f"invalid JSON: {exc}") from None
    return presentation_from_dict(data)


def save_presentation(pres: GroupPresentation, path: str | Path) -> None:
    Path(path).write_text(json.dumps(presentation_to_dict(pres), indent=2) + "\n")


def cyclic_boost_presentation(s: float, label: str | None = None) -> GroupPresentation:
    """The cyclic group generated by (a(s), E), the basic worked example:
    orbit points of the origin sit at pseudo-distance 2|n|s."""
    if label is None:
        label = f"cyclic-boost(s={s:g})"
    return GroupPresentation((IsometryPair(boost(s), identity()),), "free", label)
