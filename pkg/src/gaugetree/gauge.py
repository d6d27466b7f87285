"""Gauge functions at dyadic scales, order comparison, and sparsity schedules.

A gauge is only ever evaluated at scales t = 2^-n.  Power gauges with integer
exponent results come back as exact Fractions; everything else is float with
relative error well below 2^-40.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dyadic import Number, floor_log2, format_rational, parse_rational, pow2
from .errors import InsufficientDataError, OutOfRangeError

# Conservative slack subtracted from floating log2 values before flooring,
# so rounding can never inflate an integer sparsity bound.
GUARD_EXP = 20
_GUARD = 2.0**-GUARD_EXP

FIRST_LOWER_ORDER = "first_lower_order"
SECOND_LOWER_ORDER = "second_lower_order"
INCONCLUSIVE = "inconclusive"

POWER = "power"
POWER_LOG = "power_log"
TABLE = "table"
CONJUGATE = "conjugate"


@dataclass(frozen=True)
class Gauge:
    """An evaluable gauge function, represented at dyadic scales only.

    Kinds:
      power      t^s for rational s > 0
      power_log  t^s * log2(1/t)^c for t < 1, value 0 at t = 1
      table      finite list of (exponent, value) pairs
      conjugate  base gauge precomposed with t -> t^(1/root)
    """

    kind: str
    s: Optional[Fraction] = None
    c: Optional[Fraction] = None
    entries: Optional[Tuple[Tuple[int, Number], ...]] = None
    base: Optional["Gauge"] = None
    root: Optional[int] = None
    description: str = ""

    @staticmethod
    def power(s) -> "Gauge":
        s = Fraction(s)
        if s <= 0:
            raise ValueError("power gauge needs s > 0")
        return Gauge(kind=POWER, s=s, description=f"t^{format_rational(s)}")

    @staticmethod
    def power_log(s, c) -> "Gauge":
        s, c = Fraction(s), Fraction(c)
        if s <= 0:
            raise ValueError("power_log gauge needs s > 0")
        return Gauge(
            kind=POWER_LOG,
            s=s,
            c=c,
            description=f"t^{format_rational(s)}*log2(1/t)^{format_rational(c)}",
        )

    @staticmethod
    def table(entries: Sequence[Tuple[int, Number]], description: str = "table") -> "Gauge":
        ents = tuple((int(n), v) for n, v in entries)
        if not ents:
            raise ValueError("table gauge needs at least one entry")
        for (n0, v0), (n1, v1) in zip(ents, ents[1:]):
            if n1 <= n0:
                raise ValueError("table exponents must be strictly increasing")
            if v1 > v0:
                raise ValueError("table values must be non-increasing in the exponent")
        if any(v <= 0 for _, v in ents):
            raise ValueError("table values must be positive")
        return Gauge(kind=TABLE, entries=ents, description=description)

    @staticmethod
    def conjugate(base: "Gauge", root: int) -> "Gauge":
        if root < 1:
            raise ValueError("conjugation root must be >= 1")
        if root == 1:
            return base
        if base.kind == POWER:
            return Gauge.power(base.s / root)
        return Gauge(
            kind=CONJUGATE,
            base=base,
            root=root,
            description=f"({base.description}) at t^(1/{root})",
        )

    # -- evaluation ------------------------------------------------------

    def at_scale(self, exponent: int) -> Number:
        """Value g(2^-exponent)."""
        n = int(exponent)
        if n < 0:
            raise ValueError("scale exponent must be >= 0")
        if self.kind == POWER:
            return pow2(-n * self.s.numerator, self.s.denominator)
        if self.kind == POWER_LOG:
            if n == 0:
                return Fraction(0)
            v = pow2(-n * self.s.numerator, self.s.denominator)
            if self.c.denominator == 1 and self.c >= 0:
                return v * n ** self.c.numerator
            return float(v) * n ** float(self.c)
        if self.kind == TABLE:
            i = bisect_left([e for e, _ in self.entries], n)
            if i < len(self.entries) and self.entries[i][0] == n:
                return self.entries[i][1]
            raise OutOfRangeError(f"table gauge has no entry at exponent {n}")
        if self.kind == CONJUGATE:
            q, r = divmod(n, self.root)
            if r == 0:
                return self.base.at_scale(q)
            # geometric interpolation between the two neighboring base scales
            lo = float(self.base.at_scale(q)) if q > 0 else float(self.base.at_scale(1))
            hi = float(self.base.at_scale(q + 1))
            f = r / self.root
            if q == 0:
                # base value at scale 0 may be 0 (power_log); anchor at scale 1
                return hi ** f * lo ** (1 - f) if lo > 0 else hi**f
            return math.exp((1 - f) * math.log(lo) + f * math.log(hi))
        raise ValueError(f"unknown gauge kind {self.kind!r}")

    def log2_at_scale(self, exponent: int) -> float:
        """log2 of the value, computed without under/overflow."""
        n = int(exponent)
        if self.kind == POWER:
            return -n * float(self.s)
        if self.kind == POWER_LOG:
            if n == 0:
                return -math.inf
            return -n * float(self.s) + float(self.c) * math.log2(n)
        if self.kind == CONJUGATE:
            q, r = divmod(n, self.root)
            if r == 0:
                return self.base.log2_at_scale(q)
            lo = self.base.log2_at_scale(max(q, 1))
            hi = self.base.log2_at_scale(q + 1)
            f = r / self.root
            return (1 - f) * lo + f * hi
        v = self.at_scale(n)
        if isinstance(v, Fraction):
            return math.log2(v.numerator) - math.log2(v.denominator)
        return math.log2(v)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.kind == POWER:
            return {"kind": POWER, "s": format_rational(self.s)}
        if self.kind == POWER_LOG:
            return {"kind": POWER_LOG, "s": format_rational(self.s), "c": format_rational(self.c)}
        if self.kind == TABLE:
            return {
                "kind": TABLE,
                "entries": [
                    [n, format_rational(v) if isinstance(v, Fraction) else float(v)]
                    for n, v in self.entries
                ],
            }
        return {"kind": CONJUGATE, "base": self.base.to_json_dict(), "n": self.root}

    @staticmethod
    def from_json_dict(d: dict) -> "Gauge":
        kind = d["kind"]
        if kind == POWER:
            return Gauge.power(parse_rational(d["s"]))
        if kind == POWER_LOG:
            return Gauge.power_log(parse_rational(d["s"]), parse_rational(d["c"]))
        if kind == TABLE:
            entries = [
                (int(n), parse_rational(v) if isinstance(v, str) else float(v))
                for n, v in d["entries"]
            ]
            return Gauge.table(entries)
        if kind == CONJUGATE:
            return Gauge.conjugate(Gauge.from_json_dict(d["base"]), int(d["n"]))
        raise ValueError(f"unknown gauge kind {kind!r}")


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of the numerical order comparison, with its audit trace."""

    relation: str
    ratio_trace: Tuple[Tuple[int, float], ...]


@dataclass(frozen=True)
class BranchSchedule:
    """The set of forced (non-splitting) levels of a splitting tree."""

    depth: int
    indices: Tuple[int, ...]
    n0: int = 0

    def __post_init__(self):
        if any(i >= self.depth or i < 0 for i in self.indices):
            raise ValueError("every schedule index must lie in [0, depth)")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("schedule indices must be strictly increasing")

    def count_below(self, n: int) -> int:
        """|A ∩ n|: how many forced levels lie strictly below n."""
        return bisect_left(self.indices, n)

    def __contains__(self, n: int) -> bool:
        i = bisect_left(self.indices, n)
        return i < len(self.indices) and self.indices[i] == n

    def to_json_dict(self, gauge: Optional[Gauge] = None) -> dict:
        d = {"depth": self.depth, "indices": list(self.indices), "n0": self.n0}
        if gauge is not None:
            d["gauge"] = gauge.to_json_dict()
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "BranchSchedule":
        return BranchSchedule(
            depth=int(d["depth"]),
            indices=tuple(int(i) for i in d["indices"]),
            n0=int(d.get("n0", 0)),
        )


def compare_order(
    f: Gauge, g: Gauge, max_exponent: int, decay_threshold: float = 0.01
) -> OrderVerdict:
    """Falsification-style check of the order relation between two gauges.

    Computes g(2^-n)/f(2^-n) up to max_exponent.  Declares f of lower order
    (f before g) when the ratio is non-increasing over the tail, strictly
    smaller at the end of the tail than at its start, and ends below the
    threshold; symmetrically for the other direction.  Anything else is
    inconclusive.  The trace is returned so callers can audit the verdict.
    """
    if max_exponent < 4:
        raise InsufficientDataError("need max_exponent >= 4 for an order verdict")
    trace = []
    for n in range(1, max_exponent + 1):
        # ratio via log2 so deep scales cannot underflow
        lr = g.log2_at_scale(n) - f.log2_at_scale(n)
        trace.append((n, 2.0**lr))
    tail = [r for n, r in trace if n > max_exponent // 2]

    def decays(seq):
        return (
            all(b <= a for a, b in zip(seq, seq[1:]))
            and seq[-1] < seq[0]
            and seq[-1] < decay_threshold
        )

    if decays(tail):
        relation = FIRST_LOWER_ORDER
    elif decays([1.0 / r for r in tail]):
        relation = SECOND_LOWER_ORDER
    else:
        relation = INCONCLUSIVE
    return OrderVerdict(relation=relation, ratio_trace=tuple(trace))


def bound_table(g: Gauge, depth: int) -> List[int]:
    """Per-level sparsity caps c(n) = floor(log2(g(2^-n) * 2^n)), guarded.

    The floor is computed exactly when the gauge value is an exact rational;
    on the floating path a slack of 2^-20 is subtracted first so the integer
    bound is never overstated by rounding.
    """
    caps = []
    for n in range(depth):
        v = g.at_scale(n)
        if isinstance(v, Fraction):
            x = v * 2**n
            caps.append(max(0, floor_log2(x)) if x > 0 else 0)
        else:
            l = g.log2_at_scale(n) + n
            caps.append(max(0, math.floor(l - _GUARD)))
    return caps


def sparsity_schedule(g: Gauge, depth: int) -> BranchSchedule:
    """Greedy maximal forced-level set compatible with the gauge's caps.

    Level n is included whenever the incremented counting function still
    respects c(m) at every later level m <= depth.  The result satisfies the
    sparsity inequality at every level, so the certified threshold is 0.
    """
    caps = bound_table(g, depth + 1)
    # suffix minima: including n requires count+1 <= c(m) for all m in (n, depth]
    suffix_min = [0] * (depth + 2)
    suffix_min[depth + 1] = 10**9
    for m in range(depth, -1, -1):
        suffix_min[m] = min(caps[m], suffix_min[m + 1])
    indices = []
    count = 0
    for n in range(depth):
        if count + 1 <= suffix_min[n + 1]:
            indices.append(n)
            count += 1
    return BranchSchedule(depth=depth, indices=tuple(indices), n0=0)
