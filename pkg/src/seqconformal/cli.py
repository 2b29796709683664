"""Command-line entry point.

    seqconformal run --config scenarios/cryptic.cfg [--output-dir DIR]
                     [--seed N] [--replications N] [--quick]
    seqconformal verify --config scenarios/cryptic.cfg

Exit codes: 0 success, 1 config error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .scenario import (ConfigError, ScenarioConfig, describe_change,
                       run_replications)

QUICK_N = 2000

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqconformal",
        description="Sequential conformal testing scenario runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config end to end")
    run.add_argument("--config", required=True, help="path to a scenario config")
    run.add_argument("--output-dir", default=None, help="override output directory")
    run.add_argument("--seed", type=int, default=None, help="override seed")
    run.add_argument("--replications", type=int, default=None,
                     help="override replication count")
    run.add_argument("--quick", action="store_true",
                     help=f"shrink the stream to {QUICK_N}+{QUICK_N} examples")

    verify = sub.add_parser(
        "verify", help="validate a config and print change-invariance residuals")
    verify.add_argument("--config", required=True)
    return parser


def _load_config(args) -> ScenarioConfig:
    cfg = ScenarioConfig.from_file(args.config)
    overrides = {}
    if getattr(args, "output_dir", None) is not None:
        overrides["output_dir"] = Path(args.output_dir)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "replications", None) is not None:
        if args.replications < 1:
            raise ConfigError("replications", "must be >= 1")
        overrides["replications"] = args.replications
    if getattr(args, "quick", False):
        overrides["n_pre"] = min(cfg.n_pre, QUICK_N)
        overrides["n_post"] = min(cfg.n_post, QUICK_N)
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.command == "verify":
        print(json.dumps(describe_change(cfg), indent=2, sort_keys=True))
        return EXIT_OK

    try:
        summaries = run_replications(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for summary in summaries:
        print(f"seed {summary.seed}: "
              f"final log10 S = {summary.final_log10_capital:.3f}, "
              f"max log10 S = {summary.max_log10_capital:.3f}, "
              f"KS(all) reject = {summary.ks_all.reject}")
    print(f"artifacts written to {cfg.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
