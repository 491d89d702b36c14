"""Command-line interface.

Five commands: `walls` (enumerate the arrangement, optionally scan a weight
segment), `model` (per-fiber states, section degrees, and pseudoelliptic
fates of a model at given weights), `reduce` (walk a weight segment and emit
the transformation trace), `hassett` (reduce a weighted marked curve), and
`volume` (log canonical self-intersection of an irreducible model).

Exit status: 0 success, 1 validation or computation failure on well-formed
input, 2 usage error.  Set MMP_ELLIPTIC_COLOR=0 to disable ANSI styling.
"""

from __future__ import annotations

import argparse
import glob as globmod
import json
import os
import sys
from pathlib import Path

from .curves import (
    WeightVector,
    curve_from_json,
    curve_to_dot,
    curve_to_obj,
    hassett_reduce,
    CurveError,
)
from .dot import emit_dot
from .kodaira import UnsupportedFiberType, parse_fiber_type
from .modeljson import ModelJSONError, model_to_obj, parse_model
from .rationals import rat_from_str, rat_to_str
from .reduction import (
    InconsistentTarget,
    InvalidModel,
    RuleNotApplicable,
    WallNotSatisfied,
    reduce as reduce_model,
)
from .surfaces import (
    UnsupportedConfiguration,
    base_curve,
    pseudo_fate,
    section_degree,
    validate,
    volume,
)
from .walls import enumerate_walls, segment_walls, wall_to_obj, walls_containing

USAGE_ERROR = 2
DATA_ERROR = 1


class CliError(Exception):
    def __init__(self, message: str, status: int) -> None:
        super().__init__(message)
        self.status = status


def _color_enabled() -> bool:
    if os.environ.get("MMP_ELLIPTIC_COLOR", "") == "0":
        return False
    return sys.stdout.isatty()


def _bold(text: str) -> str:
    return f"\033[1m{text}\033[0m" if _color_enabled() else text


def _parse_weights(spec: str) -> WeightVector:
    """Comma-separated rationals, or a JSON file holding a list of them
    (either a plain path or @path)."""

    def from_file(path: Path) -> WeightVector:
        if not path.exists():
            raise CliError(f"weights file not found: {path}", USAGE_ERROR)
        entries = json.loads(path.read_text())
        return WeightVector(tuple(rat_from_str(str(e)) for e in entries))

    try:
        if spec.startswith("@"):
            return from_file(Path(spec[1:]))
        try:
            return WeightVector(tuple(rat_from_str(p) for p in spec.split(",")))
        except ValueError:
            if Path(spec).exists():
                return from_file(Path(spec))
            raise
    except (ValueError, ZeroDivisionError, json.JSONDecodeError) as exc:
        raise CliError(f"bad weight vector {spec!r}: {exc}", USAGE_ERROR)


def _load_model(path_text: str, override: str | None):
    path = Path(path_text)
    if not path.exists():
        raise CliError(f"model file not found: {path}", USAGE_ERROR)
    try:
        model = parse_model(path.read_text())
    except ModelJSONError as exc:
        raise CliError(str(exc), DATA_ERROR)
    if override is not None:
        from .reduction import at_weights

        weights = _parse_weights(override)
        if weights.r != model.weights.r:
            raise CliError(
                f"override has {weights.r} weights; the model has {model.weights.r}",
                USAGE_ERROR,
            )
        model = at_weights(model, weights)
    return model


def _cmd_walls(args: argparse.Namespace) -> int:
    try:
        types = [parse_fiber_type(t.strip()) for t in args.types.split(",")]
    except ValueError as exc:
        raise CliError(str(exc), USAGE_ERROR)
    if len(types) != args.markers:
        raise CliError(
            f"--types lists {len(types)} fiber types but --markers is {args.markers}",
            USAGE_ERROR,
        )
    try:
        walls = enumerate_walls(args.markers, types, args.rational_base)
    except UnsupportedFiberType as exc:
        raise CliError(str(exc), DATA_ERROR)
    if not args.segment:
        print(json.dumps([wall_to_obj(w) for w in walls], indent=2))
        return 0
    A = _parse_weights(args.segment[0])
    B = _parse_weights(args.segment[1])
    if A.r != args.markers or B.r != args.markers:
        raise CliError("segment endpoints must match --markers", USAGE_ERROR)
    try:
        crossings = segment_walls(A, B, walls)
    except ValueError as exc:
        raise CliError(str(exc), USAGE_ERROR)
    out = {
        "crossings": [
            {"t": rat_to_str(c.t), "walls": [wall_to_obj(w) for w in c.walls_hit]}
            for c in crossings
        ],
        "on_walls_at_start": [wall_to_obj(w) for w in walls_containing(B, walls)],
        "on_walls_at_end": [wall_to_obj(w) for w in walls_containing(A, walls)],
    }
    print(json.dumps(out, indent=2))
    return 0


def _model_report(model, fmt: str) -> str:
    if fmt == "dot":
        return emit_dot(model)
    fates = {}
    for t in model.trees:
        fates[t.root.pid] = pseudo_fate(model, t.root.pid)
    if fmt == "json":
        obj = {
            "weights": [rat_to_str(w) for w in model.weights.entries],
            "components": [
                {
                    "id": c.cid,
                    "kind": "elliptic" if model.is_elliptic(c.cid) else "pseudo2",
                    "section_degree": (
                        rat_to_str(section_degree(model, c.cid))
                        if model.is_elliptic(c.cid)
                        else None
                    ),
                    "fibers": [
                        {
                            "id": f.fid,
                            "type": str(f.ftype),
                            "coeff": rat_to_str(f.coeff),
                            "state": str(f.state),
                        }
                        for f in c.fibers
                    ],
                }
                for c in model.components()
            ],
            "pseudo_fates": fates,
            "base_curve": curve_to_obj(base_curve(model)),
        }
        return json.dumps(obj, indent=2) + "\n"
    lines = [_bold("# model report"), ""]
    for c in model.components():
        kind = "elliptic" if model.is_elliptic(c.cid) else "pseudo II"
        head = f"## {c.cid} ({kind}, g={c.genus}, degL={rat_to_str(c.degL)})"
        if model.is_elliptic(c.cid):
            head += f"  section degree {rat_to_str(section_degree(model, c.cid))}"
        lines.append(_bold(head))
        for f in c.fibers:
            lines.append(f"  - {f.fid}: {f.ftype} coeff {rat_to_str(f.coeff)} [{f.state}]")
        lines.append("")
    if fates:
        lines.append(_bold("## pseudoelliptic trees"))
        for pid in sorted(fates):
            lines.append(f"  - {pid}: {fates[pid]}")
        lines.append("")
    return "\n".join(lines)


def _cmd_model(args: argparse.Namespace) -> int:
    paths = [args.model]
    if args.glob:
        paths = sorted(globmod.glob(args.glob))
        if not paths:
            raise CliError(f"--glob {args.glob!r} matched nothing", USAGE_ERROR)

    def build(path: str) -> str:
        return _model_report(_load_model(path, args.weights), args.format)

    if len(paths) > 1:
        # batch mode: models render concurrently, output stays path-ordered
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(8, len(paths))) as pool:
            reports = list(pool.map(build, paths))
    else:
        reports = [build(paths[0])]
    for p, report in zip(paths, reports):
        if len(reports) > 1:
            print(_bold(f"=== {p}"))
        sys.stdout.write(report)
    return 0


def _cmd_reduce(args: argparse.Namespace) -> int:
    model = _load_model(args.model, args.from_weights)
    target = _parse_weights(args.to)
    try:
        trace = reduce_model(model, target)
    except (InvalidModel, InconsistentTarget, RuleNotApplicable, WallNotSatisfied) as exc:
        raise CliError(str(exc), DATA_ERROR)
    if args.check_hassett:
        original = base_curve(model)
        per_step = {}
        for rec in trace.records:  # the check applies once a time-step's batch is done
            per_step[rec.t] = rec
        for rec in per_step.values():
            got = base_curve(rec.snapshot_after)
            want = hassett_reduce(original, rec.snapshot_after.weights)
            if got != want:
                raise CliError(
                    f"base-curve commutativity failed at t = {rat_to_str(rec.t)}",
                    DATA_ERROR,
                )
    if args.dot_dir:
        outdir = Path(args.dot_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "step_000.dot").write_text(emit_dot(model))
        for i, rec in enumerate(trace.records, start=1):
            (outdir / f"step_{i:03d}.dot").write_text(emit_dot(rec.snapshot_after))
        (outdir / "final.dot").write_text(emit_dot(trace.final))
    obj = {
        "start_weights": [rat_to_str(w) for w in model.weights.entries],
        "target_weights": [rat_to_str(w) for w in target.entries],
        "records": [
            {
                "t": rat_to_str(rec.t),
                "kind": str(rec.kind),
                "wall": wall_to_obj(rec.wall),
                "affected": list(rec.affected),
                "note": rec.note,
                "snapshot_after": model_to_obj(rec.snapshot_after),
            }
            for rec in trace.records
        ],
        "final": model_to_obj(trace.final),
        "halted": trace.halted,
    }
    print(json.dumps(obj, indent=2))
    return 0


def _cmd_hassett(args: argparse.Namespace) -> int:
    path = Path(args.curve)
    if not path.exists():
        raise CliError(f"curve file not found: {path}", USAGE_ERROR)
    try:
        curve = curve_from_json(path.read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed-json: {exc}", DATA_ERROR)
    except CurveError as exc:
        raise CliError(str(exc), DATA_ERROR)
    weights = _parse_weights(args.weights)
    try:
        reduced = hassett_reduce(curve, weights)
    except (CurveError, KeyError) as exc:
        raise CliError(str(exc), DATA_ERROR)
    if args.format == "dot":
        sys.stdout.write(curve_to_dot(reduced, weights))
    else:
        print(json.dumps(curve_to_obj(reduced), indent=2))
    return 0


def _cmd_volume(args: argparse.Namespace) -> int:
    model = _load_model(args.model, args.weights)
    try:
        v = volume(model)
    except UnsupportedConfiguration as exc:
        raise CliError(f"unsupported-configuration: {exc}", DATA_ERROR)
    print(rat_to_str(v))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.model)
    if not path.exists():
        raise CliError(f"model file not found: {path}", USAGE_ERROR)
    try:
        model = parse_model(path.read_text(), check=False)
    except ModelJSONError as exc:
        raise CliError(str(exc), DATA_ERROR)
    problems = validate(model)
    for p in problems:
        print(str(p))
    if problems:
        return DATA_ERROR
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmp-elliptic",
        description="wall-crossing engine for weighted broken elliptic surface pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walls", help="enumerate the wall arrangement")
    p.add_argument("--markers", "-r", type=int, required=True, help="number of markers")
    p.add_argument("--types", required=True, help="comma-separated fiber types, e.g. I1,II,I*0")
    p.add_argument("--rational-base", action="store_true", help="include the sum-two wall")
    p.add_argument(
        "--segment",
        nargs=2,
        metavar=("A", "B"),
        help="lower and upper weight vectors; emits the crossings of the segment",
    )
    p.set_defaults(func=_cmd_walls)

    p = sub.add_parser("model", help="report fiber states, section degrees, pseudo fates")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--weights", help="override weights: comma list or @file")
    p.add_argument("--format", choices=["md", "json", "dot"], default="md")
    p.add_argument("--glob", help="report every model matching this pattern instead")
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("reduce", help="walk a weight segment and emit the trace")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--to", required=True, help="target weights: comma list or @file")
    p.add_argument("--from", dest="from_weights", help="override start weights")
    p.add_argument("--dot-dir", help="write per-step DOT snapshots into this directory")
    p.add_argument(
        "--check-hassett",
        action="store_true",
        help="assert base-curve commutativity with the weighted-curve reduction per step",
    )
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("hassett", help="reduce a weighted marked curve")
    p.add_argument("curve", help="curve JSON file")
    p.add_argument("--weights", required=True, help="weights: comma list or @file")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=_cmd_hassett)

    p = sub.add_parser("volume", help="log canonical self-intersection of an irreducible model")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--weights", help="override weights: comma list or @file")
    p.set_defaults(func=_cmd_volume)

    p = sub.add_parser("validate", help="list a model file's invariant violations")
    p.add_argument("model", help="model JSON file")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
