"""Command-line entry point.

Subcommands: constellation, pareto, tradeoff, validate. A JSON config file
supplies the experiment description; --output, --seed, and --format
override the corresponding config fields. --threads is accepted for
compatibility with batch launchers; results never depend on it.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import ExperimentConfig
from .experiments import cmd_constellation, cmd_pareto, cmd_tradeoff, cmd_validate

COMMANDS = {
    "constellation": cmd_constellation,
    "pareto": cmd_pareto,
    "tradeoff": cmd_tradeoff,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isackld",
        description="KL-divergence metrics, constellation shaping, and "
                    "Pareto beamforming experiments for a joint "
                    "sensing/communication link.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("constellation", "optimize constellations over the eta1 grid"),
        ("pareto", "sweep the beamforming trade-off and tabulate KLDs"),
        ("tradeoff", "full pipeline with BER and detection simulation"),
        ("validate", "run the invariant suite and report pass/fail"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a JSON experiment config")
        p.add_argument("--output", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker hint; outputs are independent of it")
        p.add_argument("--format", choices=["csv", "json"],
                       help="output table format (overrides config)")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_json_file(args.config)
    else:
        config = ExperimentConfig()
    if args.output is not None:
        config.output_dir = args.output
    if args.format is not None:
        config.format = args.format
    if args.seed is not None:
        config.scenario = dataclasses.replace(config.scenario, seed=args.seed)
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        ok, lines = cmd_validate(config)
        for line in lines:
            print(line)
        return 0 if ok else 1

    try:
        paths = COMMANDS[args.command](config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
