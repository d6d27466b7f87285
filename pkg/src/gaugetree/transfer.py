"""Measure-controlled transfer between binary sequences and the unit cube.

Bit interleaving splits one sequence into n residue-class subsequences; each
component expands to a dyadic interval endpoint.  The four-interval covering
construction and the gauge conjugation carry cover costs across exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .dyadic import Number, floor_log2, format_dyadic
from .errors import DegenerateIntervalError
from .gauge import Gauge
from .tree import check_node


@dataclass(frozen=True)
class DyadicInterval:
    """[index/2^level, (index+1)/2^level]."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.index < 2**self.level:
            raise ValueError(f"invalid dyadic interval level={self.level} index={self.index}")

    @property
    def left(self) -> Fraction:
        return Fraction(self.index, 2**self.level)

    @property
    def right(self) -> Fraction:
        return Fraction(self.index + 1, 2**self.level)

    @property
    def diameter(self) -> Fraction:
        return Fraction(1, 2**self.level)

    def to_json_dict(self) -> dict:
        return {"m": self.level, "p": self.index}


@dataclass(frozen=True)
class CubePoint:
    coords: Tuple[Fraction, ...]
    precision: int

    def __post_init__(self):
        if any(not 0 <= c <= 1 for c in self.coords):
            raise ValueError("cube coordinates must lie in [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "coords": [format_dyadic(c) for c in self.coords],
            "precision": self.precision,
        }


@dataclass(frozen=True)
class CoverTransferRule:
    """Multiplicity k and scale map (identity or t -> t^(1/root))."""

    multiplicity: int = 1
    root: int = 1

    def __post_init__(self):
        if self.multiplicity < 1 or self.root < 1:
            raise ValueError("multiplicity and root must be >= 1")

    def to_json_dict(self) -> dict:
        return {"k": self.multiplicity, "h": "identity" if self.root == 1 else f"t^(1/{self.root})"}


def supmetric_to_euclidean_multiplicity(n: int) -> int:
    """A sup-diameter-r cube in n dimensions splits into ceil(sqrt(n))^n
    subcubes of Euclidean diameter <= r."""
    c = math.isqrt(n)
    if c * c < n:
        c += 1
    return c**n


def expand(node: str) -> DyadicInterval:
    """Interval whose binary digits are the node's bits."""
    check_node(node)
    index = int(node, 2) if node else 0
    return DyadicInterval(level=len(node), index=index)


def interleave(node: str, n: int) -> Tuple[str, ...]:
    """Component i gets the bits at positions congruent to i mod n."""
    check_node(node)
    if n < 1:
        raise ValueError("need n >= 1")
    return tuple(node[i::n] for i in range(n))


def deinterleave(components: Sequence[str], n: int = None) -> str:
    if n is None:
        n = len(components)
    if n != len(components):
        raise ValueError("component count mismatch")
    length = sum(len(c) for c in components)
    out = []
    for j in range((length + n - 1) // n):
        for i in range(n):
            if j < len(components[i]):
                out.append(components[i][j])
    return "".join(out)


@dataclass(frozen=True)
class MetricCheck:
    first_difference: int
    expected: Fraction
    observed: Fraction


def interleave_metric_check(x: str, y: str, n: int) -> MetricCheck:
    """Distance law under interleaving: 2^-k maps to 2^-floor(k/n)."""
    check_node(x)
    check_node(y)
    if x == y:
        raise DegenerateIntervalError("distance undefined for equal strings")
    if len(x) != len(y):
        raise ValueError("strings must have equal length")
    k = next(i for i in range(len(x)) if x[i] != y[i])
    expected = Fraction(1, 2 ** (k // n))
    xs, ys = interleave(x, n), interleave(y, n)
    dists = []
    for xc, yc in zip(xs, ys):
        diff = next((i for i in range(len(xc)) if xc[i] != yc[i]), None)
        if diff is not None:
            dists.append(Fraction(1, 2**diff))
    observed = max(dists)
    return MetricCheck(first_difference=k, expected=expected, observed=observed)


def to_cube(node: str, n: int) -> CubePoint:
    """Interleave, then take the left endpoint of each component interval."""
    comps = interleave(node, n)
    precision = max(len(c) for c in comps) if node else 0
    return CubePoint(
        coords=tuple(expand(c).left for c in comps),
        precision=precision,
    )


def dyadic_four_cover(a: Fraction, b: Fraction) -> List[DyadicInterval]:
    """At most four level-m dyadic intervals covering [a, b], following the
    grid-point construction; the least valid grid index keeps it total."""
    a, b = Fraction(a), Fraction(b)
    if not 0 <= a < b <= 1:
        if a >= b:
            raise DegenerateIntervalError(f"need a < b, got [{a}, {b}]")
        raise ValueError("interval must lie inside [0, 1]")
    diam = b - a
    if diam > Fraction(1, 2):
        return [DyadicInterval(level=0, index=0)]
    # unique m with 2^-m < diam <= 2^-(m-1)
    e = floor_log2(diam)
    m = -e + 1 if diam == Fraction(2) ** e else -e
    scale = 2**m
    p = (a * scale).numerator // (a * scale).denominator + 1
    intervals = []
    for idx in range(p - 2, p + 2):
        if 0 <= idx < scale:
            intervals.append(DyadicInterval(level=m, index=idx))
    return intervals


def pushforward_cover(
    diameter_exponents: Sequence[int], rule: CoverTransferRule, g: Gauge
) -> Number:
    """Certified cover-cost bound for the image: k * sum g(diam_i), since the
    conjugated gauge at the distorted scale gives back g at the original."""
    total = sum(g.at_scale(e) for e in diameter_exponents)
    return rule.multiplicity * total


def gauge_conjugate(g: Gauge, n: int) -> Gauge:
    """Gauge evaluating the original at the n-th root scale; exact power-law
    exponent division for power gauges."""
    return Gauge.conjugate(g, n)
