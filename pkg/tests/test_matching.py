import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantor_bounds.matching import edmonds_matching, greedy_matching, hopcroft_karp, is_matching

from .oracles import brute_max_matching


def random_graph(rng, n, p):
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def test_edmonds_against_brute_force():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(1, 16)
        edges = random_graph(rng, n, rng.uniform(0.05, 0.6))
        m = edmonds_matching(n, edges)
        assert m.maximum
        assert is_matching(m.pairs, edges)
        assert m.size == len(m.pairs) == brute_max_matching(n, edges)


def test_odd_cycle_blossom():
    # a triangle hanging off a path forces blossom contraction
    edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]
    assert edmonds_matching(6, edges).size == 3


def test_petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    assert edmonds_matching(10, outer + inner + spokes).size == 5


@settings(max_examples=100)
@given(st.integers(1, 7), st.integers(1, 7), st.data())
def test_hopcroft_karp_against_brute_force(a, b, data):
    pairs = [(u, v) for u in range(a) for v in range(b)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    m = hopcroft_karp(a, b, edges)
    shifted = [(u, a + v) for u, v in edges]
    assert is_matching(m.pairs, shifted)
    assert m.size == brute_max_matching(a + b, shifted)


def test_greedy_is_flagged():
    m = greedy_matching(4, [(0, 1), (1, 2), (2, 3)])
    assert not m.maximum
    assert is_matching(m.pairs, [(0, 1), (1, 2), (2, 3)])


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        edmonds_matching(2, [(1, 1)])


def test_is_matching_rejects_shared_vertex():
    assert not is_matching([(0, 1), (1, 2)], [(0, 1), (1, 2)])
    assert not is_matching([(0, 2)], [(0, 1)])
