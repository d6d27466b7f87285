"""Finite-stage antichain forcing against a family of monotone node maps.

The construction decides the selector one forced level at a time.  At each
stage the current "bad" leaves (those whose image under an adversary map is
still consistent with the tree) are split by the image bit at a fresh forced
level, the thinner half is kept alive, and the other is killed by the level
assignment.  All measures are exact dyadic rationals, so the halving
guarantee in the certificate is an equality, not an estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dyadic import format_dyadic
from .errors import (
    DepthExhaustedError,
    GameInvariantError,
    InfeasibleError,
    UndefinedNodeError,
)
from .gauge import BranchSchedule
from .tree import (
    GameBuiltSelector,
    Layer,
    SplittingTree,
    check_node,
    compatible,
)

DEFAULT_SCAN_DEPTH_BUDGET = 2**12
MAX_SCAN_LEAVES = 2**18


# ---------------------------------------------------------------------------
# adversary maps


class TreeMap:
    """Monotone map on finite binary strings with a bounded length lag."""

    kind = "abstract"
    lag = 0

    def apply(self, node: str) -> str:
        raise NotImplementedError

    def to_json_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class BitFlipMap(TreeMap):
    kind = "bit_flip"
    lag = 0

    def apply(self, node: str) -> str:
        return "".join("1" if b == "0" else "0" for b in check_node(node))

    def to_json_dict(self) -> dict:
        return {"kind": "bit_flip"}


@dataclass(frozen=True)
class ShiftMap(TreeMap):
    kind = "shift"
    lag = 1

    def apply(self, node: str) -> str:
        return check_node(node)[1:]

    def to_json_dict(self) -> dict:
        return {"kind": "shift"}


class TransducerMap(TreeMap):
    """Finite-state transducer: each input bit moves the state and emits an
    output chunk.  `lag` must bound |len(output) - len(input)| over prefixes."""

    kind = "transducer"

    def __init__(self, start, delta: Dict[Tuple[object, int], Tuple[object, str]], lag: int):
        self.start = start
        self.delta = dict(delta)
        self.lag = int(lag)

    def apply(self, node: str) -> str:
        state = self.start
        out = []
        for b in check_node(node):
            state, emitted = self.delta[(state, int(b))]
            out.append(emitted)
        return "".join(out)

    @staticmethod
    def identity() -> "TransducerMap":
        return TransducerMap(start=0, delta={(0, 0): (0, "0"), (0, 1): (0, "1")}, lag=0)

    def to_json_dict(self) -> dict:
        return {
            "kind": "transducer",
            "start": self.start,
            "delta": [[s, b, s2, out] for (s, b), (s2, out) in sorted(
                self.delta.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])
            )],
            "lag": self.lag,
        }

    def __eq__(self, other):
        return (
            isinstance(other, TransducerMap)
            and self.start == other.start
            and self.delta == other.delta
            and self.lag == other.lag
        )


class ExplicitNodeMap(TreeMap):
    kind = "explicit"

    def __init__(self, entries: Dict[str, str], lag: int):
        self.entries = {check_node(k): check_node(v) for k, v in entries.items()}
        self.lag = int(lag)
        keys = sorted(self.entries, key=len)
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                if b.startswith(a) and not self.entries[b].startswith(self.entries[a]):
                    raise ValueError(f"map entries not monotone at {a!r} < {b!r}")

    def apply(self, node: str) -> str:
        check_node(node)
        if node not in self.entries:
            raise UndefinedNodeError(f"no image recorded for node {node!r}")
        return self.entries[node]

    def to_json_dict(self) -> dict:
        return {
            "kind": "explicit",
            "entries": sorted([k, v] for k, v in self.entries.items()),
            "lag": self.lag,
        }


def map_from_json_dict(d: dict) -> TreeMap:
    kind = d["kind"]
    if kind == "bit_flip":
        return BitFlipMap()
    if kind == "shift":
        return ShiftMap()
    if kind == "transducer":
        delta = {(s, int(b)): (s2, out) for s, b, s2, out in d["delta"]}
        return TransducerMap(start=d["start"], delta=delta, lag=int(d["lag"]))
    if kind == "explicit":
        return ExplicitNodeMap({k: v for k, v in d["entries"]}, int(d["lag"]))
    raise ValueError(f"unknown map kind {kind!r}")


def apply_map(m: TreeMap, node: str) -> str:
    return m.apply(node)


# ---------------------------------------------------------------------------
# requirements, bad sets, game state


@dataclass(frozen=True)
class Requirement:
    map_index: int
    root: str


@dataclass(frozen=True)
class BadSet:
    requirement: Requirement
    depth: int
    leaves: Tuple[str, ...]
    measure: Fraction


@dataclass
class GameState:
    schedule: BranchSchedule
    maps: Sequence[TreeMap]
    requirements: List[Requirement]
    depth: int
    scan_depth: int
    default_bit: int = 0
    layers: List[Layer] = field(default_factory=list)
    bounds: Dict[int, Fraction] = field(default_factory=dict)
    initial: Dict[int, Fraction] = field(default_factory=dict)
    stage_counts: Dict[int, int] = field(default_factory=dict)
    consulted: Dict[int, int] = field(default_factory=dict)
    stage_log: List[dict] = field(default_factory=list)

    def selector(self) -> GameBuiltSelector:
        return GameBuiltSelector(self.layers, default=self.default_bit)

    def tree(self, depth: Optional[int] = None) -> SplittingTree:
        return SplittingTree(self.schedule, self.selector(), depth or self.depth)

    def decided(self) -> set:
        return {l.level for l in self.layers}


def _image_consistent(state: GameState, image: str) -> bool:
    """Image obeys the selector at every currently decided forced level."""
    selector = state.selector()
    decided = state.decided()
    for n in state.schedule.indices:
        if n >= len(image):
            break
        if n in decided and int(image[n]) != selector.bit(image[:n]):
            return False
    return True


def bad_set(state: GameState, req: Requirement, depth: Optional[int] = None) -> BadSet:
    """Depth-d leaves above the root whose image is incomparable with the
    root yet still consistent with every decided selector level."""
    d = state.scan_depth if depth is None else depth
    if d > state.depth:
        raise ValueError(f"scan depth {d} > working depth {state.depth}")
    m = state.maps[req.map_index]
    s = req.root
    tree = state.tree(d)
    bad = []
    for leaf in tree.materialize(d).leaves:
        if not leaf.startswith(s):
            continue
        image = m.apply(leaf)
        if compatible(image, s):
            continue
        if _image_consistent(state, image):
            bad.append(leaf)
    unit = Fraction(1, 2 ** (d - state.schedule.count_below(d)))
    return BadSet(requirement=req, depth=d, leaves=tuple(bad), measure=len(bad) * unit)


def _eligible_level(state: GameState, req: Requirement, lag: int) -> Optional[int]:
    """Least fresh forced level whose image bit is visible at the scan depth.

    Growing the scan depth is sound: a depth-d bad set over-approximates all
    deeper ones, so earlier bounds remain valid upper bounds.
    """
    decided = state.decided()
    floor = max(len(req.root), state.consulted.get(_req_key(state, req), -1) + 1)
    for n in state.schedule.indices:
        if n < floor or n in decided:
            continue
        needed = n + lag + 1
        if needed <= state.scan_depth:
            return n
        if needed <= state.depth:
            leaves = 2 ** (needed - state.schedule.count_below(needed))
            if leaves <= MAX_SCAN_LEAVES:
                state.scan_depth = needed
                return n
        return None
    return None


def _req_key(state: GameState, req: Requirement) -> int:
    return state.requirements.index(req)


def stage_step(state: GameState, req: Requirement) -> GameState:
    """One halving stage for a single requirement (mutates and returns state).

    Empty bad sets record their (vacuously halved) bound without consuming a
    schedule level.
    """
    key = _req_key(state, req)
    m = state.maps[req.map_index]
    current = bad_set(state, req)
    state.stage_counts[key] = state.stage_counts.get(key, 0) + 1
    state.bounds[key] = state.initial[key] / 2 ** state.stage_counts[key]

    level = None
    chosen = None
    if current.leaves:
        before = state.scan_depth
        level = _eligible_level(state, req, m.lag)
        if level is None:
            raise DepthExhaustedError(req)
        if state.scan_depth != before:
            current = bad_set(state, req)
        halves = {0: [], 1: []}
        for leaf in current.leaves:
            image = m.apply(leaf)
            if level >= len(image):
                raise GameInvariantError(
                    f"image too short at level {level} for leaf {leaf!r}"
                )
            halves[int(image[level])].append(leaf)
        chosen = 0 if len(halves[0]) <= len(halves[1]) else 1
        state.layers.append(Layer(level=level, root=req.root, bit=chosen))
        state.consulted[key] = level

        after = bad_set(state, req)
        if not set(after.leaves) <= set(halves[chosen]):
            raise GameInvariantError("post-stage bad set escapes the chosen half")
    else:
        after = current

    if after.measure > state.bounds[key]:
        raise GameInvariantError(
            f"recomputed bad measure {after.measure} exceeds bound {state.bounds[key]}"
        )
    # non-interference: no other requirement's bad set may outgrow its bound
    for other_key, other in enumerate(state.requirements):
        if other_key == key or other_key not in state.bounds:
            continue
        recomputed = bad_set(state, other)
        if recomputed.measure > state.bounds[other_key]:
            raise GameInvariantError(
                f"stage for {req} pushed {other} above its bound"
            )

    state.stage_log.append(
        {
            "stage": len(state.stage_log),
            "map": req.map_index,
            "root": req.root,
            "level": level,
            "chosen_bit": chosen,
            "bound": format_dyadic(state.bounds[key]),
        }
    )
    return state


@dataclass(frozen=True)
class RequirementReport:
    map_index: int
    root: str
    initial: Fraction
    final_bound: Fraction
    recomputed: Fraction
    stages: int


@dataclass(frozen=True)
class AntichainCertificate:
    schedule: BranchSchedule
    layers: Tuple[Layer, ...]
    requirements: Tuple[RequirementReport, ...]
    stages_executed: int
    scan_depth: int
    stage_log: Tuple[dict, ...]
    measure_note: str = (
        "bad-set measures are taken with respect to the tree's own uniform "
        "branch measure at the scan depth"
    )

    def to_json_dict(self) -> dict:
        return {
            "requirements": [
                {
                    "map": r.map_index,
                    "root": r.root,
                    "initial": format_dyadic(r.initial),
                    "final_bound": format_dyadic(r.final_bound),
                    "recomputed": format_dyadic(r.recomputed),
                    "stages": r.stages,
                }
                for r in self.requirements
            ],
            "layers": [[l.level, l.root, l.bit] for l in self.layers],
            "stages_executed": self.stages_executed,
            "scan_depth": self.scan_depth,
            "measure_note": self.measure_note,
            "stage_log": list(self.stage_log),
        }


def _pick_scan_depth(schedule: BranchSchedule, depth: int, budget: int) -> int:
    best = 0
    for d in range(depth + 1):
        if 2 ** (d - schedule.count_below(d)) <= budget:
            best = d
    return best


def run_game(
    schedule: BranchSchedule,
    maps: Sequence[TreeMap],
    roots: Sequence[str],
    depth: int,
    stages_per_requirement: int,
    scan_depth: Optional[int] = None,
    leaf_budget: int = DEFAULT_SCAN_DEPTH_BUDGET,
) -> Tuple[SplittingTree, AntichainCertificate]:
    """Round-robin the halving stage over all (map, root) requirements.

    Bad sets are evaluated at a scan depth bounded by the leaf budget; their
    depth-d measures over-approximate the deeper bad sets, so the certified
    bounds are sound for the full working depth.
    """
    if scan_depth is None:
        scan_depth = _pick_scan_depth(schedule, depth, leaf_budget)
    requirements = [
        Requirement(map_index=i, root=check_node(r))
        for i in range(len(maps))
        for r in roots
    ]
    state = GameState(
        schedule=schedule,
        maps=list(maps),
        requirements=requirements,
        depth=depth,
        scan_depth=scan_depth,
    )
    for key, req in enumerate(requirements):
        initial = bad_set(state, req)
        state.initial[key] = initial.measure
        state.bounds[key] = initial.measure
        state.stage_counts[key] = 0

    for round_no in range(stages_per_requirement):
        for req in requirements:
            try:
                stage_step(state, req)
            except DepthExhaustedError as err:
                raise InfeasibleError(stages_per_requirement, round_no) from err

    reports = tuple(
        RequirementReport(
            map_index=req.map_index,
            root=req.root,
            initial=state.initial[key],
            final_bound=state.bounds[key],
            recomputed=bad_set(state, req).measure,
            stages=state.stage_counts[key],
        )
        for key, req in enumerate(requirements)
    )
    certificate = AntichainCertificate(
        schedule=schedule,
        layers=tuple(state.layers),
        requirements=reports,
        stages_executed=len(state.stage_log),
        scan_depth=scan_depth,
        stage_log=tuple(state.stage_log),
    )
    return state.tree(), certificate


# ---------------------------------------------------------------------------
# escape verification


@dataclass(frozen=True)
class EscapeReport:
    per_map: Tuple[dict, ...]
    samples: int
    seed: int

    def to_json_dict(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "per_map": list(self.per_map)}


def verify_escape(
    tree: SplittingTree,
    maps: Sequence[TreeMap],
    samples: int,
    seed: int,
    certificate: Optional[AntichainCertificate] = None,
) -> EscapeReport:
    """Sample branches and classify each image prefix per adversary map.

    escaped: some decided forced level already disagrees with the selector;
    fixed: the image prefix is comparable with the sampled branch;
    undetermined: neither is visible at this depth.  With a certificate, an
    undetermined sample whose divergence root is certified must lie in the
    recomputed bad set of that requirement, else it counts as unaccounted.
    """
    xs = tree.sample(seed, samples)
    decided = set(tree.selector.decided_levels(tree.schedule))

    cert_state = None
    cert_bad = {}
    if certificate is not None:
        cert_state = GameState(
            schedule=certificate.schedule,
            maps=list(maps),
            requirements=[Requirement(r.map_index, r.root) for r in certificate.requirements],
            depth=tree.depth,
            scan_depth=certificate.scan_depth,
            layers=list(certificate.layers),
        )
        for req in cert_state.requirements:
            cert_bad[(req.map_index, req.root)] = set(
                bad_set(cert_state, req).leaves
            )

    per_map = []
    for mi, m in enumerate(maps):
        counts = {"fixed": 0, "escaped": 0, "undetermined": 0, "unaccounted": 0, "uncovered": 0}
        for x in xs:
            u = m.apply(x)
            if compatible(u, x):
                counts["fixed"] += 1
                continue
            escaped = False
            for n in decided:
                if n < len(u) and int(u[n]) != tree.selector.bit(u[:n]):
                    escaped = True
                    break
            if escaped:
                counts["escaped"] += 1
                continue
            counts["undetermined"] += 1
            if certificate is not None:
                p = next(i for i in range(min(len(u), len(x))) if u[i] != x[i])
                root = x[: p + 1]
                key = (mi, root)
                if key not in cert_bad:
                    counts["uncovered"] += 1
                elif x[: certificate.scan_depth] not in cert_bad[key]:
                    counts["unaccounted"] += 1
        per_map.append({"map": mi, "kind": m.kind, **counts})
    return EscapeReport(per_map=tuple(per_map), samples=samples, seed=seed)
