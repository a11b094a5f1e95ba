"""Command-line front end: scenario files, subcommands and sweeps."""

from osdyn.cli.checks import CheckOutcome, run_checks
from osdyn.cli.commands import (
    COMMANDS,
    ExitCode,
    cmd_check,
    cmd_orbit,
    cmd_reduce,
    cmd_simulate,
    cmd_sweep,
    run_command,
)
from osdyn.cli.scenario import Scenario, SweepSpec, load_scenario

__all__ = [
    "COMMANDS",
    "CheckOutcome",
    "ExitCode",
    "Scenario",
    "SweepSpec",
    "cmd_check",
    "cmd_orbit",
    "cmd_reduce",
    "cmd_simulate",
    "cmd_sweep",
    "load_scenario",
    "run_checks",
    "run_command",
]
