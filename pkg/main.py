"""
Main module for the osdyn command-line tool.

This module serves as the entry point for batch runs: it parses the command
line, configures logging and dispatches to one of the subcommands (simulate,
check, orbit, sweep, reduce).
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from osdyn.cli import COMMANDS, run_command
from osdyn.core.config import settings
from osdyn.utils.logging import configure_logging


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with one subparser per command.

    Returns:
        The configured parser
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, required=True, help="Scenario TOML file")
    common.add_argument(
        "--out",
        type=Path,
        help="Output file (simulate, check, sweep, reduce) or directory (orbit)",
    )
    common.add_argument("--tol", type=float, help="Relative integration tolerance")
    common.add_argument("--scheme", choices=["rk4", "rk45"], help="Integration scheme")
    common.add_argument("--periods", type=float, help="Horizon in periods")
    common.add_argument("--seed-grid", type=int, help="Search orbits from an N x N seed grid")

    parser = argparse.ArgumentParser(description=settings.PROJECT_DESCRIPTION)
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "Integrate a scenario and write t,v,h samples",
        "check": "Evaluate every condition and write the report",
        "orbit": "Locate periodic orbits and their Floquet multipliers",
        "sweep": "Evaluate the conditions over a knob grid",
        "reduce": (
            "Rewrite raw parameters as reduced coefficients. Every reduced"
            " coefficient needs a closed form, so r and K may not both vary in"
            " time (b = r / K); such scenarios still run with raw_params"
        ),
    }
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the command-line tool."""
    args = build_parser().parse_args(argv)
    configure_logging(settings.LOG_LEVEL)
    return run_command(
        args.command,
        args.config,
        out=args.out,
        tol=args.tol,
        scheme=args.scheme,
        periods=args.periods,
        seed_grid_size=args.seed_grid,
    )


if __name__ == "__main__":
    sys.exit(main())
