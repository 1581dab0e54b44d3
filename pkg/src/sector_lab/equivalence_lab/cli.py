"""Command line entry point ``sector-lab``."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import SchemaViolation, UnknownExperiment
from .experiments import CATALOG, list_experiments, run_experiment
from .report import emit_report, to_json


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sector-lab",
        description="Run numerical experiments on sectorial model operators.",
    )
    parser.add_argument("experiment", help="experiment kind, or 'list' to print the catalogue")
    parser.add_argument("--config", help="path to a JSON config; omitted keys take their defaults")
    parser.add_argument("--out", help="output path; the JSON record goes to stdout when omitted")
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    return parser


def _print_catalogue() -> None:
    width = max(len(k) for k in CATALOG)
    for kind, summary in list_experiments():
        print(f"{kind:<{width}}  {summary}")


def main(argv: list[str] | None = None) -> int:
    """Run the CLI; the exit code is 0 iff every verdict of the report passes."""
    args = _parser().parse_args(argv)
    if args.experiment == "list":
        _print_catalogue()
        return 0
    config = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"sector-lab: cannot read config: {exc}", file=sys.stderr)
            return 2
    try:
        report = run_experiment(args.experiment, config, args.seed)
    except (UnknownExperiment, SchemaViolation) as exc:
        print(f"sector-lab: {exc}", file=sys.stderr)
        return 2
    if args.out:
        try:
            emit_report(report, args.format, args.out)
        except OSError as exc:
            print(f"sector-lab: cannot write report: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(to_json(report))
    for name, ok in report.verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
