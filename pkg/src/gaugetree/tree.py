"""Splitting trees on binary strings and their uniform cylinder measures.

A tree is determined by a schedule of forced levels and a selector picking
the surviving bit at each forced node.  Membership, level counts, and
cylinder measures are all exact; nothing is materialized unless asked.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import NodeBudgetError, NotInTreeError, TruncationError
from .gauge import BranchSchedule

NODE_BUDGET = 2**22


def check_node(bits: str) -> str:
    if any(ch not in "01" for ch in bits):
        raise ValueError(f"not a binary string: {bits!r}")
    return bits


def compatible(a: str, b: str) -> bool:
    """True when one string is a prefix of the other."""
    return a.startswith(b) or b.startswith(a)


class BranchSelector:
    """Total assignment of a surviving bit to every finite binary string."""

    kind = "abstract"

    def bit(self, node: str) -> int:
        raise NotImplementedError

    def decided_levels(self, schedule: BranchSchedule) -> Tuple[int, ...]:
        """Forced levels whose values this selector actively pins down."""
        return schedule.indices

    def to_json_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantSelector(BranchSelector):
    value: int = 0
    kind = "constant"

    def bit(self, node: str) -> int:
        return self.value

    def to_json_dict(self) -> dict:
        return {"kind": "constant", "bit": self.value}


@dataclass(frozen=True)
class SeededSelector(BranchSelector):
    """Deterministic pseudo-random selector keyed by (seed, node)."""

    seed: int = 0
    kind = "seeded"

    def bit(self, node: str) -> int:
        digest = hashlib.blake2b(
            f"{self.seed}:{node}".encode(), digest_size=8
        ).digest()
        return digest[-1] & 1

    def to_json_dict(self) -> dict:
        return {"kind": "seeded", "seed": self.seed}


class ExplicitSelector(BranchSelector):
    kind = "explicit"

    def __init__(self, assignments: Dict[str, int], default: int = 0):
        self.assignments = {check_node(k): int(v) for k, v in assignments.items()}
        self.default = int(default)

    def bit(self, node: str) -> int:
        return self.assignments.get(node, self.default)

    def to_json_dict(self) -> dict:
        return {
            "kind": "explicit",
            "default": self.default,
            "assignments": sorted([k, v] for k, v in self.assignments.items()),
        }

    def __eq__(self, other):
        return (
            isinstance(other, ExplicitSelector)
            and self.assignments == other.assignments
            and self.default == other.default
        )


@dataclass(frozen=True)
class Layer:
    """One decided level: every node incomparable with the root gets `bit`,
    nodes compatible with the root fall back to the default rule."""

    level: int
    root: str
    bit: int


class GameBuiltSelector(BranchSelector):
    kind = "game_built"

    def __init__(self, layers: Sequence[Layer], default: int = 0):
        by_level = {}
        for layer in layers:
            if layer.level in by_level:
                raise ValueError(f"two layers decide level {layer.level}")
            by_level[layer.level] = layer
        self.layers = tuple(sorted(layers, key=lambda l: l.level))
        self.by_level = by_level
        self.default = int(default)

    def bit(self, node: str) -> int:
        layer = self.by_level.get(len(node))
        if layer is None or compatible(node, layer.root):
            return self.default
        return layer.bit

    def decided_levels(self, schedule: BranchSchedule) -> Tuple[int, ...]:
        return tuple(l.level for l in self.layers)

    def to_json_dict(self) -> dict:
        return {
            "kind": "game_built",
            "default": self.default,
            "layers": [[l.level, l.root, l.bit] for l in self.layers],
        }

    def __eq__(self, other):
        return (
            isinstance(other, GameBuiltSelector)
            and self.layers == other.layers
            and self.default == other.default
        )


def selector_from_json_dict(d: dict) -> BranchSelector:
    kind = d["kind"]
    if kind == "constant":
        return ConstantSelector(int(d["bit"]))
    if kind == "seeded":
        return SeededSelector(int(d["seed"]))
    if kind == "explicit":
        return ExplicitSelector(
            {k: v for k, v in d.get("assignments", [])}, int(d.get("default", 0))
        )
    if kind == "game_built":
        return GameBuiltSelector(
            [Layer(int(n), r, int(b)) for n, r, b in d.get("layers", [])],
            int(d.get("default", 0)),
        )
    raise ValueError(f"unknown selector kind {kind!r}")


@dataclass(frozen=True)
class ExplicitTree:
    """Materialized truncation: the sorted leaf set at a fixed depth."""

    depth: int
    leaves: Tuple[str, ...]

    def __post_init__(self):
        if not self.leaves:
            raise ValueError("explicit tree needs at least one leaf")
        if any(len(l) != self.depth for l in self.leaves):
            raise ValueError("all leaves must have the tree depth")


@dataclass(frozen=True)
class SplittingTree:
    """Tree with forced levels from the schedule and free (splitting) levels
    elsewhere; carries its uniform branch measure."""

    schedule: BranchSchedule
    selector: BranchSelector
    depth: int

    def contains(self, node: str) -> bool:
        check_node(node)
        if len(node) > self.depth:
            raise TruncationError(f"node length {len(node)} > depth {self.depth}")
        for n in self.schedule.indices:
            if n >= len(node):
                break
            if int(node[n]) != self.selector.bit(node[:n]):
                return False
        return True

    def cylinder_measure(self, node: str) -> Fraction:
        if not self.contains(node):
            raise NotInTreeError(f"node {node!r} is not in the tree")
        n = len(node)
        return Fraction(1, 2 ** (n - self.schedule.count_below(n)))

    def level_count(self, n: int) -> int:
        if n > self.depth:
            raise TruncationError(f"level {n} > depth {self.depth}")
        return 2 ** (n - self.schedule.count_below(n))

    def sample(self, seed: int, count: int) -> List[str]:
        """Draw `count` depth-length branches distributed as the uniform
        branch measure; deterministic per seed."""
        if count < 1:
            raise ValueError("count must be >= 1")
        rng = random.Random(seed)
        out = []
        forced = set(self.schedule.indices)
        for _ in range(count):
            bits = []
            prefix = ""
            for n in range(self.depth):
                if n in forced:
                    b = self.selector.bit(prefix)
                else:
                    b = rng.getrandbits(1)
                bits.append(str(b))
                prefix += bits[-1]
            out.append(prefix)
        return out

    def materialize(self, depth: Optional[int] = None, budget: int = NODE_BUDGET) -> ExplicitTree:
        d = self.depth if depth is None else depth
        if d > self.depth:
            raise TruncationError(f"materialize depth {d} > tree depth {self.depth}")
        count = self.level_count(d)
        if count > budget:
            raise NodeBudgetError(count, budget)
        forced = set(self.schedule.indices)
        level = [""]
        for n in range(d):
            if n in forced:
                level = [t + str(self.selector.bit(t)) for t in level]
            else:
                level = [t + b for t in level for b in ("0", "1")]
        return ExplicitTree(depth=d, leaves=tuple(sorted(level)))

    def to_json_dict(self) -> dict:
        return {
            "schedule": self.schedule.to_json_dict(),
            "selector": self.selector.to_json_dict(),
            "depth": self.depth,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "SplittingTree":
        return SplittingTree(
            schedule=BranchSchedule.from_json_dict(d["schedule"]),
            selector=selector_from_json_dict(d["selector"]),
            depth=int(d["depth"]),
        )
