"""Command-line entry point: ``entprop <experiment> --config FILE``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import load_config

EXIT_OK, EXIT_CONFIG, EXIT_ACCEPTANCE = 0, 1, 2

SUBCOMMANDS = [
    "sweep-lambda", "sweep-negativity", "optimal-resource", "avg-vs-p", "robustness",
    "haar-study", "compare-protocols", "verify-recursion", "acceptance",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entprop", description="Entanglement propagation with noisy resources and unsharp measurements.")
    parser.add_argument("experiment", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="key = value configuration file (defaults used when omitted)")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--out", help="output path for the CSV or report ('-' for stdout)")
    parser.add_argument("--threads", type=int, help="worker threads (falls back to ENTPROP_THREADS)")
    parser.add_argument("--criteria", help="acceptance only: comma-separated criterion ids")
    parser.add_argument("--runtime", action="store_true", help="acceptance only: include runtimes in the report")
    return parser


def _threads(args) -> int | None:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("ENTPROP_THREADS")
    return int(env) if env and env.strip().isdigit() else None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "threads": _threads(args)}
    cfg, violations = load_config(args.config, overrides)
    if violations:
        for v in violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output

    if args.experiment == "acceptance":
        from .acceptance import run_acceptance

        try:
            ids = [int(x) for x in args.criteria.split(",")] if args.criteria else None
        except ValueError:
            print(f"config error: bad criteria list {args.criteria!r}", file=sys.stderr)
            return EXIT_CONFIG
        records, report = run_acceptance(ids, args.runtime)
        if out and out != "-":
            Path(out).write_text(report)
        else:
            sys.stdout.write(report)
        return EXIT_OK if all(r.passed for r in records) else EXIT_ACCEPTANCE

    from .experiments import run_experiment

    try:
        result = run_experiment(args.experiment, cfg, out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(result.summary(), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
