"""Lower bounds via repulsive pairs.

An optimal set B satisfies mu(B) >= |B|^s / H for any upper bound H.  If two
level-k cubes have corner separation at least L and |B| < L, B carries at
most one cube's worth of measure from the pair, so a matching of M such
pairs among T cubes caps mu(B) at (T - M) / 2^{kd}.  Whenever that cap falls
below the measure B must have, |B| >= L follows.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .lattice import (
    DEFAULT_MAX_ENUM,
    EnumerationBudgetExceeded,
    SymbolString,
    canonical_quadrant_classes,
    corner_of,
    min_quadrant_distance,
    pair_distance_sq,
)
from .matching import Matching, edmonds_matching, greedy_matching, hopcroft_karp
from .numerics import (
    ROUNDING_UNIT,
    WORK_PREC,
    BoundResult,
    dimension_exact,
    pow_directed,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 4096
EXACT_MATCHING_LIMIT = 2048

SEED_FIVE_NINTHS = Fraction(25, 81)
SEED_ONE_THIRD = Fraction(1, 9)


class ReplayError(RuntimeError):
    """A recomputed quantity contradicts the replayed chain.

    ``chain`` holds the steps verified before the failure.
    """

    def __init__(self, step: int, message: str, chain: "LowerBoundChain | None" = None):
        super().__init__(f"replay step {step}: {message}")
        self.step = step
        self.chain = chain


@dataclass(frozen=True)
class RepulsiveGraph:
    d: int
    k: int
    quadrants: tuple[int, ...]
    threshold: Fraction
    vertices: tuple[SymbolString, ...]
    edges: tuple[tuple[int, int], ...]
    strict: bool = False

    def index(self, word: SymbolString | Sequence[int]) -> int:
        if not isinstance(word, SymbolString):
            word = SymbolString(self.d, tuple(word))
        return self.vertices.index(word)

    def has_edge(self, a, b) -> bool:
        u, v = sorted((self.index(a), self.index(b)))
        return (u, v) in set(self.edges)


@dataclass
class RefinementStep:
    assumed_classes: list[tuple[int, ...]]
    threshold: Fraction
    matching_sizes: dict[tuple[int, ...], int]
    measure_cap: Fraction
    mu_min: float
    conclusion: Fraction
    label: str = ""
    notes: list[str] = field(default_factory=list)


@dataclass
class LowerBoundChain:
    d: int
    k: int
    steps: list[RefinementStep]
    H_used: float
    seed: Fraction
    final_L2: Fraction
    final_value: float
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_bound(self) -> BoundResult:
        return BoundResult(
            direction="lower",
            value=self.final_value,
            d=self.d,
            k=self.k,
            witness={"final_L2": self.final_L2, "seed_L2": self.seed, "H_used": self.H_used},
            chain=self.steps,
            rounding_budget=self.final_value * ROUNDING_UNIT,
            notes=list(self.notes),
        )


class _ClassGraph:
    """Cross-quadrant corner distances for one set of quadrants, computed once."""

    def __init__(self, d: int, k: int, quadrants: Sequence[int], max_vertices: int | None):
        self.d, self.k = d, k
        self.quadrants = tuple(quadrants)
        if len(set(self.quadrants)) != len(self.quadrants):
            raise ValueError(f"repeated quadrant in {self.quadrants}")
        per = 1 << ((k - 1) * d)
        n = per * len(self.quadrants)
        if max_vertices is not None and n > max_vertices:
            raise EnumerationBudgetExceeded(f"repulsive graph d={d} k={k} Q={self.quadrants}", n, max_vertices)
        top = 1 << d
        suffixes = list(itertools.product(range(1, top + 1), repeat=k - 1))
        self.vertices = tuple(SymbolString(d, (q,) + sfx) for q in self.quadrants for sfx in suffixes)
        self.block = np.repeat(np.arange(len(self.quadrants)), per)
        coords = np.array([corner_of(w).coords for w in self.vertices], dtype=np.int64)
        self.dist = np.empty((n, n), dtype=np.int64)
        for lo in range(0, n, 256):
            diff = coords[lo : lo + 256, None, :] - coords[None, :, :]
            self.dist[lo : lo + 256] = (diff * diff).sum(axis=2)
        # same-quadrant pairs never form edges
        self.dist[self.block[:, None] == self.block[None, :]] = -1
        self._cache: dict[tuple[int, bool], Matching] = {}

    @property
    def size(self) -> int:
        return len(self.vertices)

    def cutoff(self, threshold: Fraction, strict: bool) -> int:
        scaled = Fraction(threshold) * 9**self.k
        return math.floor(scaled) + 1 if strict else math.ceil(scaled)

    def edges(self, threshold: Fraction, strict: bool = False) -> list[tuple[int, int]]:
        cut = self.cutoff(threshold, strict)
        iu, iv = np.nonzero(np.triu(self.dist >= cut, k=1))
        return list(zip(iu.tolist(), iv.tolist()))

    def matching(self, threshold: Fraction, strict: bool = False, exact_limit: int = EXACT_MATCHING_LIMIT) -> Matching:
        key = (self.cutoff(threshold, strict), strict)
        if key not in self._cache:
            self._cache[key] = _solve(self.size, len(self.quadrants), self.edges(threshold, strict), exact_limit)
        return self._cache[key]

    def cross_distances(self) -> set[int]:
        return set(np.unique(self.dist[self.dist >= 0]).tolist())


def _solve(n: int, nq: int, edges: list[tuple[int, int]], exact_limit: int) -> Matching:
    if nq == 2:
        half = n // 2
        return hopcroft_karp(half, half, [(u, v - half) for u, v in edges])
    if n <= exact_limit:
        return edmonds_matching(n, edges)
    log.warning("graph with %d vertices above exact limit; using greedy matching", n)
    return greedy_matching(n, edges)


def build_repulsive_graph(
    d: int,
    k: int,
    quadrants: Iterable[int],
    threshold: Fraction,
    strict: bool = False,
    max_vertices: int | None = DEFAULT_MAX_VERTICES,
) -> RepulsiveGraph:
    """Graph on depth-k cubes inside the given quadrants.

    Two cubes in different quadrants are joined when their squared corner
    distance is at least ``threshold`` (strictly above it when ``strict``).
    """
    quadrants = tuple(quadrants)
    if len(quadrants) < 2:
        raise ValueError("need at least two quadrants")
    cg = _ClassGraph(d, k, quadrants, max_vertices)
    return RepulsiveGraph(d, k, quadrants, Fraction(threshold), cg.vertices, tuple(cg.edges(threshold, strict)), strict)


def max_matching(g: RepulsiveGraph, exact_limit: int = EXACT_MATCHING_LIMIT) -> Matching:
    return _solve(len(g.vertices), len(g.quadrants), list(g.edges), exact_limit)


def _cap(total: int, matched: int, d: int, k: int) -> Fraction:
    return Fraction(total - matched, 1 << (k * d))


def measure_cap(
    d: int,
    k: int,
    quadrants: Iterable[int],
    threshold: Fraction,
    max_vertices: int | None = DEFAULT_MAX_VERTICES,
) -> Fraction:
    """Upper bound on mu(B) for B inside the given quadrants with |B|^2 < threshold."""
    cg = _ClassGraph(d, k, tuple(quadrants), max_vertices)
    return _cap(cg.size, cg.matching(threshold).size, d, k)


def pair_count_measure(d: int, k: int, n_pairs: int) -> Fraction:
    """N_k(x) 2^{d-kd-1}: the measure removed by n_pairs in every antipodal quadrant pair."""
    return Fraction(n_pairs * (1 << d), 1 << (k * d + 1))


def antipodal_matching_size(d: int, k: int, x_sq: Fraction, max_vertices: int | None = DEFAULT_MAX_VERTICES) -> int:
    """N_k(x): maximum matching between D_1 and D_{2^d} at separation > x."""
    cg = _ClassGraph(d, k, (1, 1 << d), max_vertices)
    return cg.matching(x_sq, strict=True).size


def W_eval(d: int, k: int, x_sq: Fraction, H: float, max_vertices: int | None = DEFAULT_MAX_VERTICES) -> float:
    """(H (1 - N_k(x) 2^{d-kd-1}))^{1/s_d}, rounded down.  Returns 0 when the cap reaches 1."""
    removed = pair_count_measure(d, k, antipodal_matching_size(d, k, x_sq, max_vertices))
    if removed >= 1:
        return 0.0
    with mpmath.workprec(WORK_PREC):
        inv_s = 1 / dimension_exact(d)
    return pow_directed(Fraction(H) * (1 - removed), inv_s, "down")


def mu_min(L2: Fraction, d: int, H: float) -> float:
    """Smallest measure an optimal set of squared diameter >= L2 can carry, rounded down."""
    with mpmath.workprec(WORK_PREC):
        half = dimension_exact(d) / 2
    return pow_directed(Fraction(L2), half, "down", scale=1 / Fraction(H))


def final_lower_value(L2: Fraction, d: int) -> float:
    with mpmath.workprec(WORK_PREC):
        half = dimension_exact(d) / 2
    return pow_directed(Fraction(L2), half, "down")


def realized_thresholds(d: int, k: int, max_vertices: int | None = DEFAULT_MAX_VERTICES) -> list[Fraction]:
    """Distinct squared corner distances between depth-k cubes of different quadrants."""
    cg = _ClassGraph(d, k, tuple(range(1, (1 << d) + 1)), max_vertices)
    nine_k = 9**k
    return sorted(Fraction(v, nine_k) for v in cg.cross_distances())


def _h_value(H) -> float:
    return H.value if isinstance(H, BoundResult) else float(H)


def _spread(d: int, quadrants: Sequence[int]) -> Fraction:
    return max(
        (min_quadrant_distance(d, i, j).value for i, j in itertools.combinations(quadrants, 2)),
        default=Fraction(0),
    )


def refine_lower_bound(
    d: int,
    k: int,
    H,
    seed: Fraction = SEED_FIVE_NINTHS,
    max_vertices: int | None = DEFAULT_MAX_VERTICES,
    max_work: int | None = DEFAULT_MAX_ENUM,
) -> LowerBoundChain:
    """Push the squared diameter bound of an optimal set up by contradiction.

    At each round every quadrant class that a convex set of diameter below a
    candidate L' could meet is checked; L' is accepted when all of them cap
    mu(B) below the current mu_min.  Acceptance is monotone in L' (caps only
    grow with the threshold and more classes become feasible), so the scan
    runs upward and stops at the first rejection.
    """
    Hv = _h_value(H)
    top = 1 << d
    classes = [c for q in range(2, top + 1) for c in canonical_quadrant_classes(d, q, max_work)]
    spreads = {c: _spread(d, c) for c in classes}
    graphs: dict[tuple[int, ...], _ClassGraph] = {}

    def graph(c):
        if c not in graphs:
            graphs[c] = _ClassGraph(d, k, c, max_vertices)
        return graphs[c]

    ladder = realized_thresholds(d, k, max_vertices)
    L2 = Fraction(seed)
    steps: list[RefinementStep] = []
    while True:
        mu = mu_min(L2, d, Hv)
        mu_q = Fraction(mu)
        accepted = None
        for cand in (t for t in ladder if t > L2):
            feasible = [c for c in classes if spreads[c] < cand]
            sizes, worst = {}, Fraction(0)
            ok = True
            for c in feasible:
                g = graph(c)
                m = g.matching(cand)
                cap = _cap(g.size, m.size, d, k)
                sizes[c] = m.size
                worst = max(worst, cap)
                if cap >= mu_q:
                    ok = False
                    break
            if not ok:
                break
            accepted = RefinementStep(feasible, cand, sizes, worst, mu, cand, label=f"|B|^2 >= {cand}")
        if accepted is None:
            break
        log.info("d=%d k=%d: |B|^2 >= %s (mu_min %.6f)", d, k, accepted.conclusion, mu)
        steps.append(accepted)
        L2 = accepted.conclusion
    return LowerBoundChain(d, k, steps, Hv, Fraction(seed), L2, final_lower_value(L2, d))


# Dimension-3 chain as printed, pairs are (quadrant, sub-quadrant) symbol strings.
PUBLISHED_H3 = 2.352741546983966
PUBLISHED_PAIRS = {
    "2sqrt11/9": [((1, 1), (2, 7)), ((1, 2), (2, 8)), ((1, 3), (2, 5)), ((1, 4), (2, 5)),
                  ((1, 5), (2, 4)), ((1, 6), (2, 3)), ((1, 7), (2, 1)), ((1, 8), (2, 2))],
    "2sqrt2/3": [((1, 1), (2, 8)), ((1, 3), (2, 6)), ((1, 5), (2, 4)), ((1, 7), (2, 2))],
    "face": [((1, 1), (4, 7)), ((1, 2), (4, 8)), ((1, 3), (4, 5)), ((1, 4), (4, 5)),
             ((1, 5), (4, 4)), ((1, 6), (4, 3)), ((1, 7), (4, 1)), ((1, 8), (4, 2))],
    "span": [((2, 1), (5, 7)), ((2, 2), (5, 8)), ((2, 3), (5, 6)), ((2, 4), (5, 5)),
             ((2, 6), (3, 1)), ((2, 8), (3, 2)), ((3, 3), (5, 1)), ((3, 4), (5, 2))],
}
PUBLISHED_MU = {
    "seed": Fraction("0.139716"),
    "2sqrt11/9": Fraction("0.238561"),
    "2sqrt2/3": Fraction("0.380202"),
    "2sqrt26/9": Fraction("0.538462"),
}
PUBLISHED_FINAL = "1.811621"


def _audit_pairs(name: str, pairs, threshold: Fraction) -> tuple[int, list[str]]:
    """Check printed pairs against the threshold; return (valid disjoint count, errata)."""
    errata = []
    used: set[tuple[int, ...]] = set()
    valid = 0
    for a, b in pairs:
        u, v = SymbolString(3, a), SymbolString(3, b)
        dist = pair_distance_sq(u, v).value
        if dist != threshold:
            errata.append(f"{name}: {{{u}, {v}}} has squared distance {dist}, printed as {threshold}")
        repeated = [w for w in (a, b) if w in used]
        if repeated:
            errata.append(f"{name}: {{{u}, {v}}} reuses {', '.join(str(SymbolString(3, w)) for w in repeated)}")
        if dist >= threshold and not repeated:
            valid += 1
            used.update((a, b))
    return valid, errata


def replay_d3(H, max_vertices: int | None = DEFAULT_MAX_VERTICES) -> LowerBoundChain:
    """Re-derive the published dimension-3 lower-bound chain at depth 2.

    Every quantity is recomputed exactly: threshold distances, maximum
    matchings, measure caps and the directed mu_min values.  Printed pair
    lists that do not survive the check are reported as errata; the chain's
    conclusions rest on the computed maximum matchings.  Any inequality that
    fails raises ReplayError naming the step.
    """
    d, k = 3, 2
    Hv = _h_value(H)
    checks: list[tuple[str, bool, str]] = []
    notes: list[str] = []
    steps: list[RefinementStep] = []

    def check(step: int, name: str, ok: bool, detail: str = ""):
        checks.append((name, bool(ok), detail))
        if not ok:
            last = steps[-1].conclusion if steps else SEED_FIVE_NINTHS
            partial = LowerBoundChain(d, k, list(steps), Hv, SEED_FIVE_NINTHS, last,
                                      final_lower_value(last, d), checks, notes)
            raise ReplayError(step, f"{name} failed {detail}".strip(), partial)

    check(0, "H_3 at most the published upper bound", Hv <= PUBLISHED_H3 + 1e-9, f"(H_3 = {Hv!r})")

    def mu_check(step: int, L2: Fraction, key: str, beats: Fraction) -> float:
        mu = mu_min(L2, d, Hv)
        printed = PUBLISHED_MU[key]
        check(step, f"mu_min({L2}) > {float(printed)}", Fraction(mu) > printed, f"(mu_min = {mu!r})")
        check(step, f"{float(printed)} > {beats}", printed > beats)
        return mu

    def two_quadrant(step: int, L2_prev: Fraction, key_prev: str, key: str, L2: Fraction,
                     printed_m: int, printed_cap: Fraction) -> RefinementStep:
        mu = mu_check(step, L2_prev, key_prev, printed_cap)
        cg = _ClassGraph(d, k, (1, 2), max_vertices)
        m = cg.matching(L2)
        cap = _cap(cg.size, m.size, d, k)
        a, b = PUBLISHED_PAIRS[key][0]
        check(step, f"threshold {L2} realised", pair_distance_sq(SymbolString(3, a), SymbolString(3, b)).value == L2)
        check(step, f"maximum matching at {L2} is {printed_m}", m.size == printed_m, f"(got {m.size})")
        check(step, f"measure cap at {L2} is {printed_cap}", cap == printed_cap, f"(got {cap})")
        check(step, "cap below mu_min", cap < Fraction(mu))
        valid, errata = _audit_pairs(key, PUBLISHED_PAIRS[key], L2)
        notes.extend(errata)
        st = RefinementStep([(1, 2)], L2, {(1, 2): m.size}, cap, mu, L2, label=key)
        st.notes.append(f"{valid} of {len(PUBLISHED_PAIRS[key])} printed pairs form a valid matching")
        st.notes.extend(errata)
        return st

    steps.append(two_quadrant(1, SEED_FIVE_NINTHS, "seed", "2sqrt11/9", Fraction(44, 81), 8, Fraction(1, 8)))
    steps.append(two_quadrant(2, Fraction(44, 81), "2sqrt11/9", "2sqrt2/3", Fraction(8, 9), 4, Fraction(3, 16)))

    # at least four quadrants: two or three of them cannot carry mu_min
    L2_prev, L2 = Fraction(8, 9), Fraction(104, 81)
    mu = mu_check(3, L2_prev, "2sqrt2/3", Fraction(3, 8))
    check(3, "two quadrants hold measure 1/4 < mu_min", Fraction(1, 4) < Fraction(mu))
    three = _ClassGraph(d, k, (1, 2, 3), max_vertices)
    cap3 = _cap(three.size, three.matching(L2_prev).size, d, k)
    check(3, "three quadrants capped below mu_min", cap3 <= Fraction(3, 8) < Fraction(mu), f"(cap {cap3})")

    sizes, caps = {}, {}
    for key, Q in (("face", (1, 2, 3, 4)), ("span", (1, 2, 3, 5))):
        cg = _ClassGraph(d, k, Q, max_vertices)
        m = cg.matching(L2)
        sizes[Q], caps[Q] = m.size, _cap(cg.size, m.size, d, k)
        valid, errata = _audit_pairs(key, PUBLISHED_PAIRS[key], L2)
        notes.extend(errata)
        notes.append(f"{key}: {valid} of {len(PUBLISHED_PAIRS[key])} printed pairs form a valid matching")
        check(3, f"maximum matching on {Q} at {L2} at least 8", m.size >= 8, f"(got {m.size})")
        check(3, f"measure cap on {Q} at most 3/8", caps[Q] <= Fraction(3, 8), f"(got {caps[Q]})")
    a, b = PUBLISHED_PAIRS["face"][0]
    check(3, f"threshold {L2} realised", pair_distance_sq(SymbolString(3, a), SymbolString(3, b)).value == L2)
    check(3, "cap 3/8 below mu_min", Fraction(3, 8) < Fraction(mu))
    st = RefinementStep(list(sizes), L2, sizes, max(caps.values()), mu, L2, label="2sqrt26/9")
    st.notes.append(f"three-quadrant cap {cap3}; printed cap 3/8 uses 8 pairs, exact caps {dict((q, str(c)) for q, c in caps.items())}")
    steps.append(st)

    mu_check(4, L2, "2sqrt26/9", Fraction(1, 2))
    final = final_lower_value(L2, d)
    with mpmath.workprec(WORK_PREC):
        wrong_exp = (mpmath.mpf(104) / 81) ** (3 * mpmath.log(3) / mpmath.log(2) / 2)
    notes.append(
        f"printed final bound {PUBLISHED_FINAL} equals (2 sqrt 26 / 9)^(3 log_2 3) = {mpmath.nstr(wrong_exp, 10)}; "
        f"with s_3 = 3 log_3 2 the bound is {final!r}"
    )
    return LowerBoundChain(d, k, steps, Hv, SEED_FIVE_NINTHS, L2, final, checks, notes)
