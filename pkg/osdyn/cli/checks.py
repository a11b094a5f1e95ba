"""
The full set of condition checks for one scenario, shared by ``check`` and
``sweep``.
"""

from typing import NamedTuple

from osdyn.analysis import (
    check_gas,
    check_periodic_existence,
    check_permanence_iff,
    check_sufficient_permanence,
    estimate_bounds,
    permanence_variants,
)
from osdyn.cli.scenario import Scenario
from osdyn.core.exceptions import BlowupError, InapplicableError, SingularityError
from osdyn.integrate import integrate
from osdyn.models import BoundsReport, ConditionReport, State


class CheckOutcome(NamedTuple):
    """Everything ``check`` computes for one scenario."""
    report: ConditionReport
    bounds: BoundsReport
    final_state: State


def run_checks(scenario: Scenario) -> CheckOutcome:
    """
    Evaluate every checker for one scenario.

    The bounds come from the initial-state grid; the stability checker uses the
    trajectory started at the scenario's initial state as its reference, and
    that trajectory's end point doubles as the permanence probe.

    Raises:
        InapplicableError: If a checker cannot be evaluated or a long-run
            simulation fails
    """
    p = scenario.params()
    cfg = scenario.integrator
    try:
        bounds = estimate_bounds(p, cfg, scenario.analysis.bound_periods, scenario.t0)
        reference = integrate(p, scenario.initial_state, scenario.t0, scenario.t1, cfg)
    except (SingularityError, BlowupError) as exc:
        raise InapplicableError(
            f"long-run simulation failed: {exc.message}", time=exc.time
        ) from exc
    report = check_sufficient_permanence(p, bounds).merge(
        check_permanence_iff(p),
        permanence_variants(p),
        check_gas(p, reference, bounds),
        check_periodic_existence(p, bounds.M1, bounds.M2),
    )
    return CheckOutcome(report, bounds, reference.final_state)
