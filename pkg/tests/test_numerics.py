import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_bounds.numerics import (
    BoundContext,
    dimension,
    fraction_directed,
    naive_upper,
    pow_directed,
    round_directed,
)

from .oracles import hp_pow, log3_2


def test_dimension_values():
    assert dimension(1) == pytest.approx(0.6309297535714574, abs=1e-15)
    assert dimension(3) == pytest.approx(1.8927892607143724, abs=1e-15)
    assert dimension(3, "down") <= dimension(3) <= dimension(3, "up")


def test_dimension_rejects_zero():
    with pytest.raises(ValueError):
        dimension(0)


@pytest.mark.parametrize(
    "d,expected",
    [(1, 1.0), (2, 1.5485), (3, 2.8284), (4, 5.7506), (5, 12.6620), (6, 29.7081)],
)
def test_naive_values(d, expected):
    # the published points carry the first four decimals, truncated
    assert math.floor(naive_upper(d) * 10**4) == round(expected * 10**4)


def test_naive_d1_exact():
    assert naive_upper(1) == 1.0


def test_naive_is_above_true_value():
    for d in range(1, 12):
        with mpmath.workprec(200):
            ref = mpmath.mpf(d) ** (d * log3_2() / 2)
            assert mpmath.mpf(naive_upper(d)) >= ref


def test_directed_sandwich():
    rng = random.Random(7)
    for _ in range(10_000):
        base = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        p = rng.randint(1, 12)
        with mpmath.workprec(200):
            expo = p * log3_2() / 2
        lo = pow_directed(base, expo, "down")
        hi = pow_directed(base, expo, "up")
        ref = hp_pow(base, lambda: p * log3_2() / 2)
        with mpmath.workprec(200):
            assert mpmath.mpf(lo) <= ref <= mpmath.mpf(hi)
        assert hi - lo <= 4 * math.ulp(hi)


def test_exact_power_paths():
    assert pow_directed(1, 0.7, "up", scale=Fraction(1, 3)) >= 1 / 3
    assert Fraction(pow_directed(1, 0.7, "down", scale=Fraction(1, 3))) <= Fraction(1, 3)
    assert pow_directed(Fraction(5, 7), 0, "up") == 1.0


@given(st.fractions(min_value=Fraction(1, 10**9), max_value=10**9))
def test_fraction_directed(q):
    assert Fraction(fraction_directed(q, "down")) <= q <= Fraction(fraction_directed(q, "up"))


def test_round_directed_bad_direction():
    with pytest.raises(ValueError):
        round_directed(mpmath.mpf(1), "sideways")


def test_pow_rejects_nonpositive_base():
    with pytest.raises(ValueError):
        pow_directed(0, 1, "up")


def test_bound_context():
    ctx = BoundContext.for_dimension(3)
    assert ctx.min_separation == Fraction(1, 3)
    ctx.charge(2.0, ops=3)
    assert ctx.rounding_budget > 0
