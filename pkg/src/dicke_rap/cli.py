"""Command-line interface.

Subcommands: simulate, sweep-scaling, robustness, levels, ess-target,
wigner.  Every command takes a JSON config (--config) and an output
directory (--out); outputs are byte-stable for a fixed config and package
version.  Exit codes: 0 success, 2 config error, 3 numerical failure.

Set DICKE_RAP_LOG=debug|info|warning to control log verbosity.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    ContractError,
    DomainError,
    IntegrationError,
    NumericalError,
    TargetNotFoundError,
)
from . import runner

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("dicke_rap")


def _setup_logging():
    level_name = os.environ.get("DICKE_RAP_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke-rap",
        description="Collective-spin rapid-adiabatic-passage simulations")
    parser.add_argument("--seed", type=int, default=None,
                        help="reserved for future stochastic features (unused)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for sweeps")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved for future stochastic features (unused)")
        return p

    add("simulate", "run one protocol, export trace CSV and summary JSON")
    add("sweep-scaling", "metrological gain vs atom number (scaling CSV)")
    add("robustness", "gain loss under mismatched atom-number design")
    add("levels", "instantaneous energy levels along the protocol")
    add("ess-target", "export a squeezed target state as JSON")
    add("wigner", "export the spherical Wigner field of a propagated state")
    return parser


def _dispatch(args) -> int:
    cfg = _load_config(args.config)
    out = Path(args.out)
    if args.command == "simulate":
        runner.run_simulate(runner.parse_scenario_config(cfg), out)
    elif args.command == "sweep-scaling":
        runner.run_sweep_scaling(runner.parse_sweep_config(cfg), out,
                                 jobs=max(1, args.jobs))
    elif args.command == "robustness":
        runner.run_robustness(runner.parse_robustness_config(cfg), out)
    elif args.command == "levels":
        runner.run_levels(runner.parse_levels_config(cfg), out)
    elif args.command == "ess-target":
        runner.run_ess_target(runner.parse_ess_target_config(cfg), out)
    elif args.command == "wigner":
        runner.run_wigner(runner.parse_wigner_config(cfg), out)
    else:  # pragma: no cover
        raise ConfigError(f"unknown command {args.command}")
    return EXIT_OK


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, DomainError, ContractError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, NumericalError, TargetNotFoundError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
