"""Exact dyadic-rational helpers shared across modules.

Measures and cover costs are kept as :class:`fractions.Fraction` whenever the
value is exactly representable; everything else degrades to float with the
documented precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Number = Union[Fraction, float]


def pow2(num: int, den: int = 1) -> Number:
    """2**(num/den); exact Fraction when the exponent is an integer."""
    if num % den == 0:
        e = num // den
        return Fraction(2**e) if e >= 0 else Fraction(1, 2**-e)
    return math.pow(2.0, num / den)


def floor_log2(x: Fraction) -> int:
    """Exact floor(log2(x)) for a positive rational."""
    if x <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    p, q = x.numerator, x.denominator
    e = p.bit_length() - q.bit_length()
    if e >= 0:
        ok = p >= q << e
    else:
        ok = p << -e >= q
    return e if ok else e - 1


def is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def format_dyadic(x: Fraction) -> str:
    """Render a dyadic rational as ``p/2^q`` (plain integer when q = 0)."""
    if not is_dyadic(x):
        raise ValueError(f"{x} is not dyadic")
    q = x.denominator.bit_length() - 1
    if q == 0:
        return str(x.numerator)
    return f"{x.numerator}/2^{q}"


def parse_dyadic(s: str) -> Fraction:
    if "/2^" in s:
        p, q = s.split("/2^")
        return Fraction(int(p), 2 ** int(q))
    return Fraction(int(s))


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)
