"""Independent reference computations used by the tests.

None of these share code with the package: they work in exact rationals
built straight from the iterated function system.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import mpmath


def ifs_maps(d):
    """The 2^d similarity maps x -> x/3 + (2/3) v, v in {0,1}^d, lexicographic."""
    return [tuple(Fraction(2, 3) * b for b in bits) for bits in itertools.product((0, 1), repeat=d)]


def apply_word(word, d):
    """S_{i1} o ... o S_{ik} applied to the origin, in exact rationals."""
    shifts = ifs_maps(d)
    x = (Fraction(0),) * d
    for sym in reversed(word):
        t = shifts[sym - 1]
        x = tuple(xi / 3 + ti for xi, ti in zip(x, t))
    return x


def left_endpoints(k):
    """Left endpoints of the level-k Cantor intervals, by iterating the maps on {0}."""
    pts = [Fraction(0)]
    for _ in range(k):
        pts = [p / 3 for p in pts] + [p / 3 + Fraction(2, 3) for p in pts]
    return sorted(pts)


def brute_histogram(d, k):
    """(squared distance to the centre, cumulative count) over restricted corners."""
    axis = [p for p in left_endpoints(k) if p < Fraction(1, 3)]
    half = Fraction(1, 2)
    counts = Counter(sum((x - half) ** 2 for x in pt) for pt in itertools.product(axis, repeat=d))
    out, run = [], 0
    for dist in sorted(counts):
        run += counts[dist]
        out.append((dist, run))
    return out


def brute_covered(d, k, r2):
    """Level-k cubes (over all of [0,1]^d) whose farthest point lies within the ball."""
    side = Fraction(1, 3**k)
    half = Fraction(1, 2)
    axis = left_endpoints(k)
    far = [max((x - half) ** 2, (x + side - half) ** 2) for x in axis]
    return sum(1 for pt in itertools.product(far, repeat=d) if sum(pt) <= r2)


def brute_max_matching(n, edges):
    """Maximum matching size by exhaustive search over vertex subsets.

    The lowest free vertex is either left unmatched or matched to each of its
    free neighbours in turn; results are memoised per free set and a branch
    stops once it reaches floor(|free| / 2).
    """
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    memo = {0: 0}

    def best(free):
        if free in memo:
            return memo[free]
        low = free & -free
        v = low.bit_length() - 1
        rest = free ^ low
        cap = bin(free).count("1") // 2
        top = 0
        nbrs = adj[v] & rest
        while nbrs and top < cap:
            w = nbrs & -nbrs
            nbrs ^= w
            top = max(top, 1 + best(rest ^ w))
        if top < cap:
            top = max(top, best(rest))
        memo[free] = top
        return top

    return best((1 << n) - 1)


def hp_pow(base, exponent_fn, prec=200):
    """base ** exponent at ``prec`` bits; exponent_fn builds the exponent inside that precision."""
    with mpmath.workprec(prec):
        b = mpmath.mpf(Fraction(base).numerator) / Fraction(base).denominator
        return b ** exponent_fn()


def log3_2(prec=200):
    with mpmath.workprec(prec):
        return mpmath.log(2) / mpmath.log(3)
