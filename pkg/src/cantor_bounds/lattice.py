"""Exact lattice geometry of the level-k basic cubes of C^d.

Cubes are addressed by symbol strings over {1..2^d}.  Every geometric
quantity is carried as a scaled integer: corners in units of 3^-k, pair
distances in units of 3^-2k and distances to the centre of [0,1]^d in
units of (2*3^k)^-2.  Nothing in here touches floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

DEFAULT_MAX_ENUM = 2**26

BitVector = tuple[int, ...]


class EnumerationBudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed the configured budget."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: {needed} items exceeds budget {budget}")
        self.needed = needed
        self.budget = budget


@dataclass(frozen=True)
class SymbolString:
    dim: int
    symbols: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if not self.symbols:
            raise ValueError("a symbol string needs at least one symbol")
        top = 1 << self.dim
        for s in self.symbols:
            if not 1 <= s <= top:
                raise ValueError(f"symbol {s} outside 1..{top}")

    @property
    def depth(self) -> int:
        return len(self.symbols)

    def __str__(self):
        return "D_{" + ",".join(map(str, self.symbols)) + "}"


@dataclass(frozen=True)
class LatticeCorner:
    dim: int
    depth: int
    coords: tuple[int, ...]


@dataclass(frozen=True)
class SquaredDistance:
    """An exact squared length ``numerator / unit**2``."""

    numerator: int
    unit: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.unit * self.unit)

    def __float__(self):
        return self.numerator / (self.unit * self.unit)

    def __eq__(self, other):
        if isinstance(other, SquaredDistance):
            return self.value == other.value
        return self.value == other

    def __lt__(self, other):
        return self.value < _as_fraction(other)

    def __le__(self, other):
        return self.value <= _as_fraction(other)

    def __gt__(self, other):
        return self.value > _as_fraction(other)

    def __ge__(self, other):
        return self.value >= _as_fraction(other)

    def __hash__(self):
        return hash(self.value)


def _as_fraction(x) -> Fraction:
    if isinstance(x, SquaredDistance):
        return x.value
    return Fraction(x)


def kappa(v: Sequence[int]) -> int:
    """Lexicographic position (1-based) of a 0/1 vector."""
    i = 0
    for bit in v:
        if bit not in (0, 1):
            raise ValueError(f"bit vector entries must be 0 or 1, got {bit}")
        i = (i << 1) | bit
    return i + 1


def kappa_inv(i: int, d: int) -> BitVector:
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if not 1 <= i <= (1 << d):
        raise ValueError(f"index {i} outside 1..{1 << d}")
    i -= 1
    return tuple((i >> (d - 1 - j)) & 1 for j in range(d))


def corner_of(word: SymbolString) -> LatticeCorner:
    """Integer corner S_I(0) * 3^k of the basic cube D_I."""
    d, k = word.dim, word.depth
    coords = [0] * d
    for t, s in enumerate(word.symbols):
        scale = 2 * 3 ** (k - 1 - t)
        bits = kappa_inv(s, d)
        for j in range(d):
            coords[j] += bits[j] * scale
    return LatticeCorner(d, k, tuple(coords))


def pair_distance_sq(a: SymbolString, b: SymbolString) -> SquaredDistance:
    if a.dim != b.dim or a.depth != b.depth:
        raise ValueError(
            f"mismatched symbol strings: dim {a.dim}/{b.dim}, depth {a.depth}/{b.depth}"
        )
    ca, cb = corner_of(a).coords, corner_of(b).coords
    return SquaredDistance(sum((x - y) ** 2 for x, y in zip(ca, cb)), 3**a.depth)


def center_distance_sq(c: LatticeCorner) -> SquaredDistance:
    """Squared distance from the corner to (1/2, ..., 1/2)."""
    side = 3**c.depth
    return SquaredDistance(sum((side - 2 * x) ** 2 for x in c.coords), 2 * side)


def axis_values(k: int) -> np.ndarray:
    """Restricted corner coordinates along one axis, in lexicographic bit order.

    Entry b is sum_p bit_p(b) * 2 * 3^p, so the most significant bit carries
    the second base-3 digit and the leading digit is always 0.
    """
    if k < 1:
        raise ValueError(f"depth must be positive, got {k}")
    vals = np.zeros(1 << (k - 1), dtype=np.int64)
    for p in range(k - 1):
        vals[(np.arange(vals.size) >> p) & 1 == 1] += 2 * 3**p
    return vals


def restricted_count(d: int, k: int) -> int:
    return 1 << ((k - 1) * d)


def _check_budget(what: str, needed: int, max_enum: int | None):
    if max_enum is not None and needed > max_enum:
        raise EnumerationBudgetExceeded(what, needed, max_enum)


def restricted_corner_block(
    d: int, k: int, start: int = 0, stop: int | None = None, max_enum: int | None = DEFAULT_MAX_ENUM
) -> np.ndarray:
    """Corners with index in [start, stop) as an (n, d) integer array.

    Index bits are packed axis-major: axis 0 owns the top k-1 bits.
    """
    total = restricted_count(d, k)
    _check_budget(f"restricted corners d={d} k={k}", total, max_enum)
    stop = total if stop is None else min(stop, total)
    start = max(0, start)
    idx = np.arange(start, max(start, stop), dtype=np.int64)
    vals = axis_values(k)
    mask = (1 << (k - 1)) - 1
    out = np.empty((idx.size, d), dtype=np.int64)
    for j in range(d):
        shift = (d - 1 - j) * (k - 1)
        out[:, j] = vals[(idx >> shift) & mask]
    return out


def restricted_corner_stream(
    d: int, k: int, start: int = 0, stop: int | None = None, max_enum: int | None = DEFAULT_MAX_ENUM
) -> Iterator[LatticeCorner]:
    """Yield corners of the level-k cubes inside [0, 1/3]^d.

    There are 2^((k-1)d) of them.  ``start``/``stop`` select a contiguous
    index range so several consumers can split the stream.
    """
    if d < 1 or k < 1:
        raise ValueError(f"need d >= 1 and k >= 1, got d={d} k={k}")
    block = 1 << 16
    total = restricted_count(d, k)
    _check_budget(f"restricted corners d={d} k={k}", total, max_enum)
    stop = total if stop is None else min(stop, total)
    for lo in range(start, stop, block):
        arr = restricted_corner_block(d, k, lo, min(lo + block, stop), max_enum=None)
        for row in arr.tolist():
            yield LatticeCorner(d, k, tuple(row))


def min_quadrant_distance(d: int, i: int, j: int) -> SquaredDistance:
    """Squared gap between level-1 cubes D_i and D_j (Hamming distance / 9)."""
    a, b = kappa_inv(i, d), kappa_inv(j, d)
    return SquaredDistance(sum(x != y for x, y in zip(a, b)), 3)


def _symmetry_group(d: int) -> list[tuple[tuple[int, ...], int]]:
    # (coordinate permutation, flip mask) pairs acting on packed corner bits
    return [(perm, mask) for perm in itertools.permutations(range(d)) for mask in range(1 << d)]


def _act(d: int, perm: tuple[int, ...], mask: int, v: int) -> int:
    out = 0
    for j in range(d):
        bit = (v >> (d - 1 - perm[j])) & 1
        out |= bit << (d - 1 - j)
    return out ^ mask


def canonical_quadrant_classes(d: int, q: int, max_work: int | None = DEFAULT_MAX_ENUM) -> list[tuple[int, ...]]:
    """One representative per symmetry orbit of q-subsets of level-1 quadrants.

    The group is the full symmetry group of the cube (axis permutations and
    reflections).  Each representative is the lexicographically smallest
    sorted tuple of its orbit, given as 1-based quadrant indices.
    """
    n = 1 << d
    if not 1 <= q <= n:
        raise ValueError(f"class size {q} outside 1..{n}")
    group = _symmetry_group(d)
    _check_budget(f"quadrant classes d={d} q={q}", math.comb(n, q) * len(group), max_work)
    images = [[_act(d, perm, mask, v) for v in range(n)] for perm, mask in group]
    seen: set[tuple[int, ...]] = set()
    reps = []
    for subset in itertools.combinations(range(n), q):
        if subset in seen:
            continue
        reps.append(tuple(v + 1 for v in subset))
        for img in images:
            seen.add(tuple(sorted(img[v] for v in subset)))
    return reps
