"""Command-line entry point.

    whlab run <config.json> [--out DIR] [--seed N]
    whlab validate <config.json>
    whlab list-builtins

``run`` exits 0 exactly when every verdict in the report passes; schema
errors exit 2 with a JSON pointer to the offending field.
"""

from __future__ import annotations

import argparse
import sys

from .config import builtins_text, load_config
from .errors import ConfigError, WhlabError
from .experiments import run_experiment


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="whlab",
        description="numerical laboratory for translation-commuting operators "
                    "on weighted half-line spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="path to the experiment config")
    p_run.add_argument("--out", default="whlab-out", help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")

    p_val = sub.add_parser("validate", help="schema-check a config file")
    p_val.add_argument("config", help="path to the experiment config")

    sub.add_parser("list-builtins", help="print built-in families and experiments")

    args = parser.parse_args(argv)

    if args.command == "list-builtins":
        print(builtins_text())
        return 0

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print("config valid")
        return 0

    try:
        report = run_experiment(cfg, seed=args.seed)
    except WhlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    path = report.write(args.out)
    for v in report.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        extra = "" if v.measured is None else \
            f"  measured={v.measured:.6g} threshold={v.threshold:.6g}"
        print(f"[{mark}] {v.name}{extra}{('  ' + v.detail) if v.detail else ''}")
    print(f"report: {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
