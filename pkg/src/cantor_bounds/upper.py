"""Upper bounds from centred balls.

A ball centred at (1/2, ..., 1/2) whose radius reaches a restricted corner
fully contains every cube whose corner it reaches (that corner is the cube's
farthest point from the centre).  Counting such cubes gives a lower bound on
the natural measure of the ball, and (diameter^s) / measure is an upper bound
on the Hausdorff measure.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .lattice import (
    DEFAULT_MAX_ENUM,
    EnumerationBudgetExceeded,
    axis_values,
    restricted_corner_block,
    restricted_count,
)
from .numerics import ROUNDING_UNIT, WORK_PREC, BoundResult, dimension_exact, naive_upper, pow_directed

log = logging.getLogger(__name__)

_BLOCK = 1 << 20
_INT64_LIMIT = 2**62


@dataclass(frozen=True)
class DistanceHistogram:
    """Cumulative counts of restricted corners by squared distance to the centre.

    ``sq_dist`` holds numerators in units of (2*3^k)^-2.
    """

    d: int
    k: int
    sq_dist: np.ndarray
    cum_count: np.ndarray

    @property
    def unit(self) -> int:
        return 2 * 3**self.k

    @property
    def entries(self) -> list[tuple[Fraction, int]]:
        den = self.unit**2
        return [(Fraction(int(n), den), int(c)) for n, c in zip(self.sq_dist, self.cum_count)]

    def __len__(self):
        return int(self.sq_dist.size)

    def __eq__(self, other):
        if not isinstance(other, DistanceHistogram):
            return NotImplemented
        return (
            self.d == other.d
            and self.k == other.k
            and np.array_equal(self.sq_dist, other.sq_dist)
            and np.array_equal(self.cum_count, other.cum_count)
        )


def _sum_by(inv: np.ndarray, counts: np.ndarray, size: int) -> np.ndarray:
    # float weights are exact: every count stays below the 2^53 mantissa
    return np.bincount(inv, weights=counts, minlength=size).astype(np.int64)


def _merge(keys: list[np.ndarray], counts: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    if len(keys) == 1:
        return keys[0], counts[0]
    allk = np.concatenate(keys)
    allc = np.concatenate(counts)
    uk, inv = np.unique(allk, return_inverse=True)
    return uk, _sum_by(inv, allc, uk.size)


def _axis_sq(k: int) -> np.ndarray:
    return (3**k - 2 * axis_values(k)) ** 2


def _enumerate_block(d: int, k: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    corners = restricted_corner_block(d, k, lo, hi, max_enum=None)
    dist = ((3**k - 2 * corners) ** 2).sum(axis=1)
    return np.unique(dist, return_counts=True)


def _convolve_block(keys: np.ndarray, counts: np.ndarray, axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = (keys[:, None] + axis[None, :]).ravel()
    c = np.repeat(counts, axis.size)
    uk, inv = np.unique(s, return_inverse=True)
    return uk, _sum_by(inv, c, uk.size)


def _map(threads: int, fn, jobs):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def build_histogram(
    d: int,
    k: int,
    method: str = "convolve",
    threads: int | None = None,
    max_enum: int | None = DEFAULT_MAX_ENUM,
) -> DistanceHistogram:
    """Exact distance histogram over the 2^((k-1)d) restricted corners.

    ``method="enumerate"`` streams every corner; ``method="convolve"`` builds
    the same histogram by convolving the per-axis distance multiset d times.
    Both respect the same lattice-point budget and give identical results
    for any thread count.
    """
    if d < 1 or k < 1:
        raise ValueError(f"need d >= 1 and k >= 1, got d={d} k={k}")
    total = restricted_count(d, k)
    if max_enum is not None and total > max_enum:
        raise EnumerationBudgetExceeded(f"histogram d={d} k={k}", total, max_enum)
    if d * 9**k >= _INT64_LIMIT:
        raise ValueError(f"d={d} k={k} overflows 64-bit squared distances")
    threads = threads or os.cpu_count() or 1

    if method == "enumerate":
        jobs = [(d, k, lo, min(lo + _BLOCK, total)) for lo in range(0, total, _BLOCK)]
        parts = _map(threads, _enumerate_block, jobs)
    elif method == "convolve":
        axis = _axis_sq(k)
        keys = np.zeros(1, dtype=np.int64)
        counts = np.ones(1, dtype=np.int64)
        for _ in range(d):
            rows = max(1, _BLOCK // axis.size)
            jobs = [(keys[i : i + rows], counts[i : i + rows], axis) for i in range(0, keys.size, rows)]
            parts = _map(threads, _convolve_block, jobs)
            keys, counts = _merge([p[0] for p in parts], [p[1] for p in parts])
        parts = [(keys, counts)]
    else:
        raise ValueError(f"unknown histogram method {method!r}")

    keys, counts = _merge([p[0] for p in parts], [p[1] for p in parts])
    return DistanceHistogram(d, k, keys.astype(np.int64), np.cumsum(counts).astype(np.int64))


def upper_bound(
    d: int,
    k: int,
    histogram: DistanceHistogram | None = None,
    method: str = "convolve",
    threads: int | None = None,
    max_enum: int | None = DEFAULT_MAX_ENUM,
) -> BoundResult:
    """Certified upper bound on H^{s_d}(C^d) from centred balls at depth k."""
    hist = histogram or build_histogram(d, k, method=method, threads=threads, max_enum=max_enum)
    nine_k = 9**k
    keys = hist.sq_dist
    # 4 r^2 = key / 9^k; admissible diameters are 1/3 <= 2r <= sqrt(d)
    ok = (keys >= nine_k // 9) & (keys <= d * nine_k)
    assert ok.any(), "no admissible radius"
    total = restricted_count(d, k)
    s = dimension_exact(d)
    s_float = float(s)
    approx = np.full(keys.size, np.inf)
    approx[ok] = (keys[ok] / nine_k) ** (s_float / 2) * (total / hist.cum_count[ok])
    best = approx.min()
    # re-evaluate every near-minimal candidate rigorously
    candidates = np.flatnonzero(approx <= best * (1 + 1e-9))
    with mpmath.workprec(WORK_PREC):
        half = s / 2
    chosen = None
    for i in candidates.tolist():
        diam_sq = Fraction(int(keys[i]), nine_k)
        mu_low = Fraction(int(hist.cum_count[i]), total)
        value = pow_directed(diam_sq, half, "up", scale=1 / mu_low)
        if chosen is None or value < chosen[0]:
            chosen = (value, i, diam_sq, mu_low)
    value, i, diam_sq, mu_low = chosen
    witness = {
        "diameter_sq": diam_sq,
        "radius_sq": diam_sq / 4,
        "covered": int(hist.cum_count[i]) << d,
        "restricted_covered": int(hist.cum_count[i]),
        "mu_low": mu_low,
    }
    log.debug("upper d=%d k=%d value=%r witness=%s", d, k, value, witness)
    return BoundResult(
        direction="upper",
        value=value,
        d=d,
        k=k,
        witness=witness,
        rounding_budget=value * ROUNDING_UNIT,
    )


def max_depth(d: int, max_enum: int = DEFAULT_MAX_ENUM) -> int:
    """Largest depth whose restricted lattice fits in ``max_enum`` points."""
    k = 1
    while restricted_count(d, k + 1) <= max_enum and d * 9 ** (k + 1) < _INT64_LIMIT:
        k += 1
    return k


__all__ = [
    "DistanceHistogram",
    "build_histogram",
    "upper_bound",
    "max_depth",
    "naive_upper",
]
