"""Command line entry point: ``discretegalois analyze`` and ``discretegalois recheck``."""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .analyze import analyze, render_text
from .problem import ProblemError, ProblemSpec
from .recheck import ReportCorrupted, recheck_file

EXIT_OK = 0
EXIT_RECHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _analyze(args) -> int:
    try:
        spec = ProblemSpec.load(args.file)
    except ProblemError as exc:
        print(f"invalid problem: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        report = analyze(spec, seed=args.seed, degree_bound=args.degree_bound, ziglin_budget=args.ziglin_budget)
    except ProblemError as exc:
        print(f"invalid problem: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    text = dump_report(report) if args.format == "json" else render_text(report) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _recheck(args) -> int:
    try:
        res = recheck_file(args.report)
    except ReportCorrupted as exc:
        print(f"corrupted report: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    for name, ok, detail in res.checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
    print("recheck passed" if res.ok else "recheck FAILED")
    return EXIT_OK if res.ok else EXIT_RECHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="discretegalois", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="run the full analysis on a problem file")
    a.add_argument("file")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--degree-bound", type=int, default=None)
    a.add_argument("--ziglin-budget", type=int, default=None)
    a.add_argument("--out", default=None)
    a.set_defaults(func=_analyze)
    r = sub.add_parser("recheck", help="re-verify the witnesses of a JSON report")
    r.add_argument("report")
    r.set_defaults(func=_recheck)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
