"""Command-line entry point: ``habitminer {ingest,profile,plot,synth}``.

Exit codes: 0 success, 2 malformed or unreadable input, 3 empty result,
4 at least one activity returned a partial result or failed.
"""
from __future__ import annotations

import argparse
import logging
import os
import re
import sys
import tempfile
from collections import OrderedDict
from pathlib import Path
from typing import Optional, Sequence

import jsonschema

from . import ingest
from .errors import EmptyResult, HabitMinerError, InvalidSpec, InvariantViolation, MalformedRow, UnknownColumn
from .habits import error_report, format_report, parse_report, validate_report
from .model import PointSet
from .pipeline import PipelineConfig, profile_activity
from .plot import render_svg
from .synth import PlantedSpec, generate, to_intervals

log = logging.getLogger("habitminer")

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_EMPTY = 3
EXIT_PARTIAL = 4


def atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fail(code: int, message: str) -> int:
    print(f"habitminer: {message}", file=sys.stderr)
    return code


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _default_seed() -> int:
    try:
        return int(os.environ.get("HABITMINER_SEED", "0"))
    except ValueError:
        return 0


def report_filename(activity: str) -> str:
    return (re.sub(r"[^A-Za-z0-9._-]+", "_", activity) or "activity") + ".json"


# --- commands --------------------------------------------------------------

def cmd_ingest(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            if args.format == "refit":
                if not args.appliance:
                    return _fail(EXIT_MALFORMED, "--appliance is required for --format refit")
                config = ingest.IngestConfig(args.threshold_watts, args.merge_gap, args.min_duration)
                intervals = ingest.parse_power_csv(fh, args.appliance, config, args.skip_errors, args.activity)
            elif args.format == "casas":
                if not args.activity:
                    return _fail(EXIT_MALFORMED, "--activity is required for --format casas")
                intervals = ingest.parse_event_log(fh, args.activity, args.skip_errors)
            else:
                intervals = ingest.read_intervals_csv(fh)
                if args.activity:
                    intervals = [iv for iv in intervals if iv.activity == args.activity]
    except EmptyResult as exc:
        return _fail(EXIT_EMPTY, str(exc))
    except (OSError, MalformedRow, UnknownColumn, InvariantViolation, ValueError) as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    atomic_write(Path(args.output), ingest.write_intervals_csv(intervals))
    if not intervals:
        return _fail(EXIT_EMPTY, "no intervals extracted")
    log.info("wrote %d intervals to %s", len(intervals), args.output)
    return EXIT_OK


def cmd_profile(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            intervals = ingest.read_intervals_csv(fh)
    except (OSError, MalformedRow, InvariantViolation) as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    groups: "OrderedDict[str, list]" = OrderedDict()
    for iv in intervals:
        groups.setdefault(iv.activity, []).append(iv)
    if args.activity is not None:
        groups = OrderedDict((a, v) for a, v in groups.items() if a == args.activity)
    if not groups:
        return _fail(EXIT_EMPTY, "no intervals to profile")
    try:
        config = PipelineConfig(
            k_max=args.k_max, tau=args.tau, min_points_v=args.min_points, eps_decay=args.eps_decay,
            seed=args.seed, noise_in_denominator=args.noise_in_denominator, workers=args.workers,
        )
    except ValueError as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    source = {"file": str(args.input), "parameters": config.as_dict()}
    out_dir = Path(args.output)
    code = EXIT_OK
    for activity, ivs in groups.items():
        points = PointSet.from_intervals(ivs, activity)
        try:
            result = profile_activity(points, config)
            data = format_report(result, source)
            if result.partial:
                code = EXIT_PARTIAL
        except HabitMinerError as exc:
            log.warning("%s: %s", activity, exc)
            data = error_report(activity, exc, len(points), source)
            code = EXIT_PARTIAL
        validate_report(parse_report(data))
        atomic_write(out_dir / report_filename(activity), data)
    return code


def cmd_plot(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            intervals = ingest.read_intervals_csv(fh)
        with open(args.report, "rb") as fh:
            report = parse_report(fh.read())
        validate_report(report)
    except (OSError, ValueError, MalformedRow, InvariantViolation, jsonschema.ValidationError) as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    activity = report["activity"]
    if any(iv.activity != activity for iv in intervals):
        intervals = [iv for iv in intervals if iv.activity == activity]
    if not intervals:
        return _fail(EXIT_MALFORMED, f"no intervals for activity {activity!r}")
    labels = report["labels"]
    if len(labels) != len(intervals):
        return _fail(EXIT_MALFORMED, f"report has {len(labels)} labels but input has {len(intervals)} points")
    points = PointSet.from_intervals(intervals, activity).points
    means = [(h["mean_start_hours"], h["mean_end_hours"]) for h in report["habits"]]
    atomic_write(Path(args.output), render_svg(points, labels, means, activity))
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        spec = PlantedSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, InvalidSpec) as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    points, truth = generate(spec)
    out = Path(args.output)
    atomic_write(out, ingest.write_intervals_csv(to_intervals(points)))
    sidecar = "index,label\n" + "".join(f"{i},{int(t)}\n" for i, t in enumerate(truth))
    atomic_write(labels_path(out), sidecar.encode("utf-8"))
    return EXIT_OK


def labels_path(output: Path) -> Path:
    return output.with_name(output.stem + ".labels.csv")


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="habitminer", description="Extract habits from appliance usage logs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert raw logs to the intervals CSV")
    p.add_argument("--format", choices=["refit", "casas", "intervals"], required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--appliance", help="power column (refit)")
    p.add_argument("--activity", help="activity label to extract (casas) or to assign (refit)")
    p.add_argument("--threshold-watts", type=float, default=5.0)
    p.add_argument("--merge-gap", type=int, default=60, help="seconds")
    p.add_argument("--min-duration", type=int, default=120, help="seconds")
    p.add_argument("--skip-errors", action="store_true", help="skip malformed rows instead of failing")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("profile", help="extract habits per activity")
    p.add_argument("--input", required=True)
    p.add_argument("--activity")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--tau", type=float, default=4.0)
    p.add_argument("--min-points", type=int, default=4)
    p.add_argument("--eps-decay", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--noise-in-denominator", type=_bool, default=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", required=True, help="directory for the per-activity reports")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("plot", help="render a report as an SVG scatter")
    p.add_argument("--input", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("synth", help="generate a planted dataset")
    p.add_argument("--spec", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
