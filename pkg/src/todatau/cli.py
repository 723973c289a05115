"""Command-line entry point.

    todatau run [--config PATH] [--pipeline NAME] [--fixture NAME]
                [--report PATH] [--jobs N]
    todatau explain CHECK_ID
    todatau list-fixtures

Exit codes: 0 all requested verdicts pass, 1 at least one fails,
2 inconclusive (window exhausted somewhere, nothing failed), 3 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import TodaTauError
from .runner import FIXTURES, PIPELINES, RunConfig, explain, run


def _build_parser():
    parser = argparse.ArgumentParser(prog="todatau", add_help=True)
    sub = parser.add_subparsers(dest="command")

    p_run = sub.add_parser("run", help="run a verification pipeline")
    p_run.add_argument("--config", default=None, help="configuration file")
    p_run.add_argument("--pipeline", default=None, choices=PIPELINES)
    p_run.add_argument("--fixture", default=None, choices=sorted(FIXTURES))
    p_run.add_argument("--report", default=None, help="write the JSON report here")
    p_run.add_argument("--jobs", type=int, default=None,
                       help="parallel workers for cell sweeps")

    p_explain = sub.add_parser("explain", help="describe a check id")
    p_explain.add_argument("check_id")

    sub.add_parser("list-fixtures", help="list the named fixtures")
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; those are code 3 here, while
        # --help exits 0
        return 0 if exc.code == 0 else 3

    if args.command == "list-fixtures":
        for name in sorted(FIXTURES):
            print("%-20s %s" % (name, FIXTURES[name]))
        return 0

    if args.command == "explain":
        try:
            print(explain(args.check_id))
        except KeyError as exc:
            print(str(exc), file=sys.stderr)
            return 3
        return 0

    if args.command != "run":
        parser.print_help()
        return 3

    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        if args.pipeline:
            cfg.pipeline = args.pipeline
        if args.fixture:
            cfg.fixture = args.fixture
        if args.jobs:
            cfg.jobs = args.jobs
        cfg.__post_init__()
    except (OSError, ValueError, KeyError) as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 3

    try:
        report = run(cfg)
    except TodaTauError as exc:
        print("run failed: %s" % exc, file=sys.stderr)
        return 3

    text = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print("fixture=%s pipeline=%s verdict=%s checks=%d (%.1fs)"
          % (report.fixture, report.pipeline, report.global_verdict,
             len(report.checks), report.seconds))
    for c in report.checks:
        if c.verdict != "pass":
            print("  %-24s %-28s %-12s %s"
                  % (c.check_id, c.params, c.verdict, c.witness[:60]))
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
