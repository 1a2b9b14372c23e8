"""Command-line interface.

    qtclab run      --config cfg.json --out results/ [--seed N]
                    [--mode noiseless|qtcc] [--attempts N]
    qtclab validate --config cfg.json
    qtclab report   --out results/

`run` executes the configured experiment and writes the report files;
`validate` parses and echoes the resolved config; `report` re-aggregates
summary.csv from an existing attempts.csv. Exit status is 0 on success,
nonzero with a message on stderr otherwise.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import ConfigError, ExperimentConfig, load_config
from .harness import emit_report, reaggregate_summary, run_case


def _resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    if getattr(args, "attempts", None) is not None:
        overrides["attempts"] = args.attempts
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtclab",
                                     description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write reports")
    run.add_argument("--config", help="JSON config path (defaults apply if omitted)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--mode", choices=["noiseless", "qtcc"], help="override mode")
    run.add_argument("--attempts", type=int, help="override attempt count")

    val = sub.add_parser("validate", help="parse a config and echo it resolved")
    val.add_argument("--config", help="JSON config path (defaults apply if omitted)")
    val.add_argument("--seed", type=int, help="override master_seed")

    rep = sub.add_parser("report", help="re-aggregate summary.csv from attempts.csv")
    rep.add_argument("--out", required=True, help="directory holding attempts.csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _resolve_config(args)
            report = run_case(config)
            paths = emit_report(report, args.out)
            print(f"wrote {len(paths)} files to {args.out}")
        elif args.command == "validate":
            config = _resolve_config(args)
            print(config.to_json(), end="")
        else:
            path = reaggregate_summary(args.out)
            print(f"rebuilt {path}")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
