"""Dimension formulas and direction-certified evaluation of real powers.

Transcendental values are evaluated with mpmath at WORK_PREC bits and then
rounded to a double on the requested side.  The guard ``_SLACK`` covers the
mpmath evaluation error with a wide margin, so a result rounded "up" is never
below the true value and one rounded "down" is never above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Union

import mpmath

WORK_PREC = 160
_SLACK = mpmath.mpf(2) ** -110

# one ulp of relative error per directed result, plus one for the nudge
ROUNDING_UNIT = 2.0**-51

Direction = Literal["up", "down"]
Real = Union[int, float, Fraction, mpmath.mpf]

MIN_SEPARATION = Fraction(1, 3)


def _mpf(x: Real) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _check_direction(direction):
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")


def round_directed(x: mpmath.mpf, direction: Direction) -> float:
    """Round a high-precision value to a double on the requested side."""
    _check_direction(direction)
    with mpmath.workprec(WORK_PREC):
        if direction == "up":
            target = x + abs(x) * _SLACK
            f = float(target)
            while mpmath.mpf(f) < target:
                f = math.nextafter(f, math.inf)
        else:
            target = x - abs(x) * _SLACK
            f = float(target)
            while mpmath.mpf(f) > target:
                f = math.nextafter(f, -math.inf)
    return f


def fraction_directed(q: Fraction, direction: Direction) -> float:
    """Exact rational to double, rounded on the requested side."""
    _check_direction(direction)
    q = Fraction(q)
    f = float(q)
    if direction == "up":
        while Fraction(f) < q:
            f = math.nextafter(f, math.inf)
    else:
        while Fraction(f) > q:
            f = math.nextafter(f, -math.inf)
    return f


def log3_2() -> mpmath.mpf:
    with mpmath.workprec(WORK_PREC):
        return mpmath.log(2) / mpmath.log(3)


def dimension_exact(d: int) -> mpmath.mpf:
    """s_d = d log_3 2 at working precision."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    with mpmath.workprec(WORK_PREC):
        return d * mpmath.log(2) / mpmath.log(3)


def dimension(d: int, direction: Direction | None = None) -> float:
    s = dimension_exact(d)
    if direction is None:
        with mpmath.workprec(WORK_PREC):
            return float(s)
    return round_directed(s, direction)


def pow_directed(base: Real, exponent: Real, direction: Direction, scale: Real = 1) -> float:
    """``scale * base**exponent`` rounded to a double on the requested side.

    ``base`` and ``scale`` should be exact (int or Fraction) when the result
    has to be certified; ``exponent`` may be a high-precision mpf.
    """
    _check_direction(direction)
    if base <= 0:
        raise ValueError(f"base must be positive, got {base}")
    if base == 1 or exponent == 0:
        # exact power; only the scale needs rounding
        if isinstance(scale, mpmath.mpf):
            return round_directed(scale, direction)
        return fraction_directed(Fraction(scale), direction)
    with mpmath.workprec(WORK_PREC):
        x = _mpf(scale) * mpmath.power(_mpf(base), _mpf(exponent))
    return round_directed(x, direction)


def naive_upper(d: int) -> float:
    """d^(s_d/2): the cover by all level-k cubes, independent of k."""
    with mpmath.workprec(WORK_PREC):
        half = dimension_exact(d) / 2
    return pow_directed(d, half, "up")


@dataclass
class BoundContext:
    d: int
    s: float
    min_separation: Fraction = MIN_SEPARATION
    ambient_diameter: float = 0.0
    rounding_budget: float = 0.0

    @classmethod
    def for_dimension(cls, d: int) -> "BoundContext":
        return cls(d=d, s=dimension(d), ambient_diameter=math.sqrt(d))

    def charge(self, value: float, ops: int = 1) -> None:
        self.rounding_budget += abs(value) * ROUNDING_UNIT * ops


@dataclass
class BoundResult:
    """A certified bound on the d log_3 2 dimensional Hausdorff measure of C^d.

    ``witness`` holds the upper-bound radius data; lower bounds carry their
    derivation in ``chain`` instead.
    """

    direction: Literal["upper", "lower"]
    value: float
    d: int
    k: int
    witness: dict | None = None
    chain: list = field(default_factory=list)
    certified: bool = True
    rounding_budget: float = 0.0
    notes: list[str] = field(default_factory=list)
