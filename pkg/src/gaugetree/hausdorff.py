"""Certified gauge-measure bounds for tree-represented sets.

Lower bounds come from the mass-distribution inequality; upper bounds from an
exact optimal-cover computation over cylinder covers, which on binary strings
loses nothing and reduces the cover infimum to a tree DP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import List, Optional, Tuple

from .dyadic import Number, format_dyadic
from .errors import EnumerationBudgetError, FrostmanConditionError
from .gauge import Gauge
from .tree import ExplicitTree, SplittingTree

BRUTE_FORCE_NODE_LIMIT = 64
WITNESS_NODE_LIMIT = 2**12


def _cylinder_log2(tree: SplittingTree, n: int) -> int:
    return -n + tree.schedule.count_below(n)


def frostman_lower(tree: SplittingTree, g: Gauge) -> Tuple[Fraction, int]:
    """Least threshold from which every cylinder measure is below the gauge.

    Returns (1, n0): the full branch set then has gauge measure at least its
    own total mass for covers at scales finer than 2^-n0.  The comparison is
    non-strict, which is all the lower-bound chain needs.
    """
    violations = []
    worst = None
    for n in range(tree.depth + 1):
        e = _cylinder_log2(tree, n)
        v = g.at_scale(n)
        if isinstance(v, Fraction):
            ok = v > 0 and Fraction(2) ** e <= v
            excess = e - (g.log2_at_scale(n) if v > 0 else -math.inf)
        else:
            lg = g.log2_at_scale(n)
            ok = e <= lg
            excess = e - lg
        if not ok:
            violations.append(n)
            if worst is None or excess > worst[1]:
                worst = (n, excess)
    if violations and violations[-1] == tree.depth:
        raise FrostmanConditionError(worst[0], worst[1])
    n0 = violations[-1] + 1 if violations else 0
    return Fraction(1), n0


def optimal_cover_cost(
    etree: ExplicitTree, g: Gauge, delta_exponent: int
) -> Tuple[Number, Tuple[str, ...]]:
    """Exact infimum over cylinder covers with depths in [k, tree depth].

    Node-level DP: at each trie node, either pay the cylinder at this depth
    (when allowed) or recurse into both children.  Returns the minimizing
    antichain as witness.
    """
    k = int(delta_exponent)
    if k > etree.depth:
        raise ValueError(f"delta exponent {k} > tree depth {etree.depth}")

    def solve(prefix: str, leaves: Tuple[str, ...]):
        n = len(prefix)
        if n == etree.depth:
            return g.at_scale(n), (prefix,)
        left = tuple(l for l in leaves if l[n] == "0")
        right = tuple(l for l in leaves if l[n] == "1")
        parts = []
        for part in (left, right):
            if part:
                parts.append(solve(prefix + part[0][n], part))
        child_cost = sum(c for c, _ in parts)
        child_witness = tuple(w for _, ws in parts for w in ws)
        if n >= k:
            cut = g.at_scale(n)
            if cut <= child_cost:
                return cut, (prefix,)
        return child_cost, child_witness

    return solve("", etree.leaves)


def level_dp_cost(
    tree: SplittingTree, g: Gauge, delta_exponent: int, depth: Optional[int] = None
) -> Number:
    """Same value as the node DP, in O(depth), using level homogeneity."""
    k = int(delta_exponent)
    n_max = tree.depth if depth is None else int(depth)
    if not k <= n_max <= tree.depth:
        raise ValueError(f"need delta exponent {k} <= depth {n_max} <= {tree.depth}")
    cost = g.at_scale(n_max)
    for n in range(n_max - 1, -1, -1):
        branching = 1 if n in tree.schedule else 2
        through = branching * cost
        if n >= k:
            cut = g.at_scale(n)
            cost = cut if cut <= through else through
        else:
            cost = through
    return cost


def level_dp_witness_level(
    tree: SplittingTree, g: Gauge, delta_exponent: int, depth: Optional[int] = None
) -> int:
    """Shallowest level at which the level DP cuts; the witness cover is the
    full set of tree nodes at that level."""
    k = int(delta_exponent)
    n_max = tree.depth if depth is None else int(depth)
    costs = [None] * (n_max + 1)
    costs[n_max] = g.at_scale(n_max)
    for n in range(n_max - 1, -1, -1):
        branching = 1 if n in tree.schedule else 2
        through = branching * costs[n + 1]
        if n >= k and g.at_scale(n) <= through:
            costs[n] = g.at_scale(n)
        else:
            costs[n] = through
    for n in range(max(k, 0), n_max + 1):
        branching = 1 if n in tree.schedule else 2
        if n == n_max or g.at_scale(n) <= branching * costs[n + 1]:
            return n
    return n_max


def brute_force_cover_cost(etree: ExplicitTree, g: Gauge, delta_exponent: int) -> Number:
    """Enumerate every cylinder antichain covering the leaves; test oracle only."""
    k = int(delta_exponent)
    if k > etree.depth:
        raise ValueError(f"delta exponent {k} > tree depth {etree.depth}")
    nodes = set()
    for leaf in etree.leaves:
        for n in range(k, etree.depth + 1):
            nodes.add(leaf[:n])
    if len(nodes) > BRUTE_FORCE_NODE_LIMIT:
        raise EnumerationBudgetError(
            f"{len(nodes)} candidate nodes exceed the bound {BRUTE_FORCE_NODE_LIMIT}"
        )

    def covers(prefix: str, leaves: Tuple[str, ...]):
        result = []
        n = len(prefix)
        if n >= k:
            result.append((prefix,))
        if n < etree.depth:
            parts = []
            for b in ("0", "1"):
                part = tuple(l for l in leaves if l[n] == b)
                if part:
                    parts.append(covers(prefix + b, part))
            if parts:
                combined = parts[0]
                for nxt in parts[1:]:
                    combined = [a + b for a in combined for b in nxt]
                # avoid duplicating the singleton cut when n < k produced nothing
                if n >= k:
                    result.extend(combined)
                else:
                    result = combined
        return result

    all_covers = covers("", etree.leaves)
    return min(sum(g.at_scale(len(t)) for t in cover) for cover in all_covers)


@dataclass(frozen=True)
class DimensionEstimate:
    s_lo: float
    s_hi: float
    depth: int
    conclusive: bool
    box_profile: Tuple[float, ...]

    @property
    def width(self) -> float:
        return self.s_hi - self.s_lo


def dimension_estimate(
    tree: SplittingTree,
    tolerance: float,
    depth: Optional[int] = None,
    decay_threshold: float = 1.0,
) -> DimensionEstimate:
    """Bisection bracket for the branch set's dimension at finite depth.

    s is certified from below when the mass-distribution bound succeeds for
    the power gauge t^s, and from above when the optimal cover cost at this
    depth drops below the decay threshold (strictly below the certified
    mass floor 1).
    """
    if tolerance < 2.0**-20:
        raise ValueError("tolerance must be >= 2^-20")
    n_max = tree.depth if depth is None else int(depth)

    def lower_ok(s: Fraction) -> bool:
        if s == 0:
            return True
        try:
            frostman_lower(
                SplittingTree(tree.schedule, tree.selector, n_max), Gauge.power(s)
            )
            return True
        except FrostmanConditionError:
            return False

    def upper_ok(s: Fraction) -> bool:
        if s == 0:
            return 1 < decay_threshold
        return level_dp_cost(tree, Gauge.power(s), 0, n_max) < decay_threshold

    # lower bisection: largest s with mass-distribution evidence
    lo, hi = Fraction(0), Fraction(1)
    if lower_ok(hi):
        s_lo = Fraction(1)
    else:
        while hi - lo > tolerance:
            mid = (lo + hi) / 2
            if lower_ok(mid):
                lo = mid
            else:
                hi = mid
        s_lo = lo

    # upper bisection: smallest s with cover-decay evidence
    lo, hi = Fraction(0), Fraction(1)
    if not upper_ok(hi):
        s_hi = Fraction(1)
    else:
        while hi - lo > tolerance:
            mid = (lo + hi) / 2
            if upper_ok(mid):
                hi = mid
            else:
                lo = mid
        s_hi = hi

    profile = tuple(
        (n - tree.schedule.count_below(n)) / n for n in range(1, n_max + 1)
    )
    return DimensionEstimate(
        s_lo=float(s_lo),
        s_hi=float(s_hi),
        depth=n_max,
        conclusive=float(s_lo) <= float(s_hi) + tolerance,
        box_profile=profile,
    )


@dataclass(frozen=True)
class MeasureCertificate:
    """Finite-depth sandwich for the gauge measure of a tree's branch set."""

    gauge: Gauge
    delta_exponent: int
    lower: Optional[Fraction]
    frostman_threshold: Optional[int]
    upper: Number
    witness: Optional[Tuple[str, ...]]
    witness_level: int
    failure_level: Optional[int] = None

    def to_json_dict(self) -> dict:
        d = {
            "gauge": self.gauge.to_json_dict(),
            "delta_exp": self.delta_exponent,
            "upper": {
                "value": format_dyadic(self.upper)
                if isinstance(self.upper, Fraction)
                else float(self.upper),
                "provenance": "optimal_cover",
                "witness_level": self.witness_level,
            },
        }
        if self.lower is not None:
            d["lower"] = {
                "value": format_dyadic(self.lower),
                "provenance": "frostman",
                "n0": self.frostman_threshold,
            }
        else:
            d["lower"] = {"value": None, "violating_level": self.failure_level}
        if self.witness is not None:
            d["witness"] = list(self.witness)
        return d


def measure_certificate(
    tree: SplittingTree, g: Gauge, delta_exponent: int, depth: Optional[int] = None
) -> MeasureCertificate:
    """Bundle the Frostman floor and the optimal-cover ceiling at one scale."""
    n_max = tree.depth if depth is None else int(depth)
    try:
        lower, n0 = frostman_lower(SplittingTree(tree.schedule, tree.selector, n_max), g)
        failure = None
    except FrostmanConditionError as err:
        lower, n0 = None, None
        failure = err.worst_level
    upper = level_dp_cost(tree, g, delta_exponent, n_max)
    w_level = level_dp_witness_level(tree, g, delta_exponent, n_max)
    witness = None
    if tree.level_count(w_level) <= WITNESS_NODE_LIMIT:
        witness = tree.materialize(w_level).leaves if w_level > 0 else ("",)
    return MeasureCertificate(
        gauge=g,
        delta_exponent=delta_exponent,
        lower=lower,
        frostman_threshold=n0,
        upper=upper,
        witness=witness,
        witness_level=w_level,
        failure_level=failure,
    )
