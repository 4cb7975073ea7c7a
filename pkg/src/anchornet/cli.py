"""Command-line front end: validate configs, run scenarios, compare reports.

    anchornet validate <scenario.json>
    anchornet run <scenario.json> [--seed N] [--mode baseline|l5] [--out FILE]
    anchornet compare <report_a.json> <report_b.json> [--out FILE]

Reports land in --out, or in $ANCHORNET_OUT_DIR (default: the working
directory) under <scenario>-<mode>-<seed>.json.
"""

from __future__ import annotations

import argparse
import os
import sys

from .metrics import (
    TopologyMismatch,
    canonical_json,
    compare,
    load_report,
    render_compare_table,
    summary_line,
    write_report,
)
from .scenario import (
    MODE_BASELINE,
    MODE_L5,
    ConfigInvalid,
    ParseError,
    load_scenario,
)
from .simnet import Simulation

_MODE_ALIASES = {
    "baseline": MODE_BASELINE,
    MODE_BASELINE: MODE_BASELINE,
    "l5": MODE_L5,
    MODE_L5: MODE_L5,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchornet",
        description="Session-layer overlay simulator: validate, run, compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file")
    p_validate.add_argument("scenario")

    p_run = sub.add_parser("run", help="run a scenario and write a metrics report")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument(
        "--mode", choices=sorted(set(_MODE_ALIASES)), default=None,
        help="override the scenario mode",
    )
    p_run.add_argument("--out", default=None, help="report path (default: derived)")

    p_compare = sub.add_parser("compare", help="compare two metrics reports")
    p_compare.add_argument("report_a")
    p_compare.add_argument("report_b")
    p_compare.add_argument("--out", default=None, help="write the comparison as JSON")
    return parser


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        load_scenario(args.scenario)
    except ParseError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 1
    except ConfigInvalid as exc:
        for diagnostic in exc.diagnostics:
            print(f"{args.scenario}: {diagnostic}", file=sys.stderr)
        return 1
    print(f"{args.scenario}: ok")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_scenario(args.scenario)
    except (ParseError, ConfigInvalid) as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 1
    mode = _MODE_ALIASES[args.mode] if args.mode else None
    try:
        report = Simulation(config, seed=args.seed, mode=mode).run()
    except Exception as exc:  # runtime faults are reported, not swallowed
        print(f"{args.scenario}: simulation fault: {exc}", file=sys.stderr)
        return 2
    out = args.out
    if out is None:
        out_dir = os.environ.get("ANCHORNET_OUT_DIR", ".")
        out = os.path.join(
            out_dir, f"{report['scenario']}-{report['mode']}-{report['seed']}.json"
        )
    write_report(report, out)
    print(summary_line(report))
    print(f"report: {out}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    try:
        result = compare(load_report(args.report_a), load_report(args.report_b))
    except TopologyMismatch as exc:
        print(f"compare: {exc}", file=sys.stderr)
        return 1
    print(render_compare_table(result))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(result))
        print(f"comparison: {args.out}")
    return 0


def main(argv: "list[str] | None" = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_compare(args)


if __name__ == "__main__":
    raise SystemExit(main())
