"""Command-line surface: reproducible schedule, measure, antichain, transfer,
and plot runs with deterministic JSON/CSV/SVG outputs.

Exit codes: 0 success (including informative failures inside certificates),
2 usage or parse errors, 3 infeasible configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from typing import List, Optional, Sequence

from .dyadic import format_dyadic, format_rational
from .errors import FrostmanConditionError, InfeasibleError
from .gauge import GUARD_EXP, Gauge, BranchSchedule, bound_table, sparsity_schedule
from .hausdorff import (
    dimension_estimate,
    frostman_lower,
    level_dp_cost,
    measure_certificate,
)
from .game import map_from_json_dict, run_game, verify_escape
from .transfer import (
    dyadic_four_cover,
    interleave_metric_check,
    to_cube,
)
from .tree import NODE_BUDGET, SplittingTree

TOOL_NAME = "gaugetree"
TOOL_VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# manifest and output plumbing


def build_manifest(command: str, args: argparse.Namespace, inputs: Sequence[str]) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "inputs": sorted(inputs),
        "seed": getattr(args, "seed", 0),
        "config": {
            "node_budget": NODE_BUDGET,
            "guard_exp": GUARD_EXP,
            "decay_threshold": 1.0,
        },
    }


def atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gaugetree-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, payload: dict, manifest: dict) -> None:
    payload = {"manifest": manifest, **payload}
    atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_csv(path: str, header: List[str], rows: List[List], manifest: dict) -> None:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write(path, buf.getvalue())


def read_csv_table(path: str):
    with open(path) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    reader = csv.reader(lines)
    rows = list(reader)
    if not rows:
        return [], []
    return rows[0], rows[1:]


# ---------------------------------------------------------------------------
# flag parsing


def parse_gauge_spec(spec: str) -> Gauge:
    try:
        kind, _, rest = spec.partition(":")
        if kind == "power":
            return Gauge.power(Fraction(rest))
        if kind == "power_log":
            s, c = rest.split(",")
            return Gauge.power_log(Fraction(s), Fraction(c))
        if kind == "table":
            entries = [tuple(pair.split("=")) for pair in rest.split(",")]
            return Gauge.table([(int(n), Fraction(v)) for n, v in entries])
        raise ValueError(f"unknown gauge kind {kind!r}")
    except (ValueError, ZeroDivisionError, ArithmeticError) as err:
        raise argparse.ArgumentTypeError(f"bad gauge spec {spec!r}: {err}") from err


def load_maps(path: str):
    with open(path) as fh:
        data = json.load(fh)
    return [map_from_json_dict(d) for d in data]


# ---------------------------------------------------------------------------
# subcommands


def cmd_schedule(args) -> int:
    g = args.gauge
    schedule = sparsity_schedule(g, args.depth)
    manifest = build_manifest("schedule", args, [])
    payload = {"schedule": schedule.to_json_dict(gauge=g)}
    if not schedule.indices:
        payload["warning"] = "empty schedule: the caps are zero on the whole range"
        print("warning: empty schedule (full binary tree)", file=sys.stderr)
    write_json(args.out, payload, manifest)
    if args.csv:
        caps = bound_table(g, args.depth)
        rows = [
            [n, caps[n], int(n in schedule)]
            for n in range(args.depth)
        ]
        write_csv(args.csv, ["n", "cap", "in_schedule"], rows, manifest)
    return 0


def _level_rows(tree: SplittingTree, g: Gauge, k: int, depth: int):
    rows = []
    for n in range(depth + 1):
        count = tree.level_count(n)
        mu = Fraction(1, 2 ** (n - tree.schedule.count_below(n)))
        gv = g.at_scale(n)
        cost = count * gv
        rows.append(
            [
                n,
                count,
                format_dyadic(mu),
                format_dyadic(gv) if isinstance(gv, Fraction) else repr(float(gv)),
                format_dyadic(cost) if isinstance(cost, Fraction) else repr(float(cost)),
            ]
        )
    return rows


def cmd_measure(args) -> int:
    with open(args.tree) as fh:
        tree = SplittingTree.from_json_dict(json.load(fh))
    g = args.gauge
    depth = args.depth or tree.depth
    cert = measure_certificate(tree, g, args.delta_exp, depth)
    manifest = build_manifest("measure", args, [args.tree])
    write_json(args.out, {"certificate": cert.to_json_dict()}, manifest)
    if args.csv:
        write_csv(
            args.csv,
            ["n", "count", "mu_cylinder", "gauge_value", "level_cost"],
            _level_rows(tree, g, args.delta_exp, depth),
            manifest,
        )
    return 0


def cmd_antichain(args) -> int:
    g = args.gauge
    maps = load_maps(args.maps)
    roots = args.roots.split(",")
    schedule = sparsity_schedule(g, args.depth)
    try:
        tree, certificate = run_game(
            schedule, maps, roots, args.depth, args.stages
        )
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return 3
    escape = verify_escape(tree, maps, args.escape_samples, args.seed, certificate)
    try:
        lower, n0 = frostman_lower(tree, g)
        frostman = {"lower": format_dyadic(lower), "n0": n0}
    except FrostmanConditionError as err:
        n0 = 0
        frostman = {"lower": None, "violating_level": err.worst_level}
    # the lower bound only constrains covers finer than 2^-n0
    delta_used = max(args.delta_exp, n0)
    upper = level_dp_cost(tree, g, delta_used, min(args.depth, tree.depth))
    dim = dimension_estimate(tree, tolerance=0.01, depth=min(args.depth, 60))
    manifest = build_manifest("antichain", args, [args.maps])
    report = {
        "gauge": g.to_json_dict(),
        "schedule": schedule.to_json_dict(),
        "tree": tree.to_json_dict(),
        "game_certificate": {
            **certificate.to_json_dict(),
            "escape_report": escape.to_json_dict(),
        },
        "measure_certificate": {
            "frostman": frostman,
            "upper": format_dyadic(upper)
            if isinstance(upper, Fraction)
            else repr(float(upper)),
            "delta_exp": delta_used,
        },
        "dimension": {
            "s_lo": dim.s_lo,
            "s_hi": dim.s_hi,
            "depth": dim.depth,
            "conclusive": dim.conclusive,
        },
    }
    write_json(args.out, report, manifest)
    return 0


def cmd_transfer(args) -> int:
    manifest = build_manifest(f"transfer-{args.mode}", args, [])
    rng = random.Random(args.seed)
    rows = []
    if args.mode == "four-cover":
        for i in range(args.count):
            den = rng.randrange(8, 1 << 16)
            lo = rng.randrange(den - 1)
            hi = rng.randrange(lo + 1, den)
            a, b = Fraction(lo, den), Fraction(hi, den)
            cover = dyadic_four_cover(a, b)
            ok = (
                len(cover) <= 4
                and min(iv.left for iv in cover) <= a
                and max(iv.right for iv in cover) >= b
                and len({iv.level for iv in cover}) == 1
            )
            rows.append(
                [i, format_rational(a), format_rational(b), cover[0].level, len(cover), int(ok)]
            )
        write_csv(args.out, ["item", "a", "b", "level", "intervals", "pass"], rows, manifest)
    elif args.mode == "interleave-check":
        for i in range(args.count):
            n = rng.choice([2, 3, 4])
            length = args.length - args.length % n
            x = "".join(str(rng.getrandbits(1)) for _ in range(length))
            y = x
            while y == x:
                y = "".join(str(rng.getrandbits(1)) for _ in range(length))
            chk = interleave_metric_check(x, y, n)
            rows.append(
                [i, n, chk.first_difference, format_rational(chk.expected),
                 format_rational(chk.observed), int(chk.expected == chk.observed)]
            )
        write_csv(args.out, ["item", "n", "k", "expected", "observed", "pass"], rows, manifest)
    else:  # cube-map
        point = to_cube(args.bits, args.n)
        rows = [
            [i, format_rational(c)] for i, c in enumerate(point.coords)
        ]
        write_csv(args.out, ["coordinate", "value"], rows, manifest)
    return 0


def cmd_plot(args) -> int:
    header, rows = read_csv_table(args.table)
    if not rows:
        print("error: empty table", file=sys.stderr)
        return 2
    y_cols = args.y.split(",")
    for col in [args.x, *y_cols]:
        if col not in header:
            print(f"error: missing column {col!r}", file=sys.stderr)
            return 2
    xi = header.index(args.x)
    xs = [float(r[xi]) for r in rows]
    series = []
    for col in y_cols:
        yi = header.index(col)
        series.append((col, [float(r[yi]) for r in rows]))
    manifest = build_manifest("plot", args, [args.table])
    atomic_write(args.out, render_svg(xs, series, args.x, manifest))
    return 0


def render_svg(xs, series, x_label, manifest) -> str:
    """Standalone SVG 1.1 line plot; byte-deterministic for fixed input."""
    width, height, pad = 640, 420, 50
    all_y = [v for _, ys in series for v in ys]
    x0, x1 = min(xs), max(xs) or 1
    y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- manifest: {json.dumps(manifest, sort_keys=True)} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" font-size="12" text-anchor="middle">{x_label}</text>',
    ]
    for idx, (label, ys) in enumerate(series):
        color = colors[idx % len(colors)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = pad + 16 * idx
        parts.append(
            f'<line x1="{width - pad - 90}" y1="{ly}" x2="{width - pad - 70}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - pad - 64}" y="{ly + 4}" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="compute a sparsity schedule for a gauge")
    p.add_argument("--gauge", type=parse_gauge_spec, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("measure", help="certify gauge-measure bounds for a tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--gauge", type=parse_gauge_spec, required=True)
    p.add_argument("--delta-exp", type=int, default=0)
    p.add_argument("--depth", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("antichain", help="run the full antichain pipeline")
    p.add_argument("--gauge", type=parse_gauge_spec, required=True)
    p.add_argument("--maps", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--roots", default="0,1")
    p.add_argument("--delta-exp", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--escape-samples", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_antichain)

    p = sub.add_parser("transfer", help="batch-check the transfer laws")
    p.add_argument("mode", choices=["four-cover", "interleave-check", "cube-map"])
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--bits", default="")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("plot", help="render a CSV table as an SVG plot")
    p.add_argument("--table", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
