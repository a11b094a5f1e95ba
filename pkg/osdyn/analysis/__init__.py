"""Periodic logistic solution, condition checkers, bounds and Lyapunov diagnostics."""

from osdyn.analysis.bounds import (
    comparison_gap,
    estimate_bounds,
    initial_grid,
    lower_bounds,
    upper_bounds,
)
from osdyn.analysis.conditions import (
    average_of,
    check_gas,
    check_herbivore_persistence,
    check_periodic_existence,
    check_permanence_iff,
    check_sufficient_permanence,
    check_vegetation_persistence,
    gas_inf_expressions,
    permanence_variants,
)
from osdyn.analysis.engine import ConditionEngine, Measurement
from osdyn.analysis.logistic import ClosedFormLogistic, reference_logistic, vstar
from osdyn.analysis.lyapunov import lyapunov_W, lyapunov_W_bound, lyapunov_X, max_increase

__all__ = [
    "ClosedFormLogistic",
    "ConditionEngine",
    "Measurement",
    "average_of",
    "check_gas",
    "check_herbivore_persistence",
    "check_periodic_existence",
    "check_permanence_iff",
    "check_sufficient_permanence",
    "check_vegetation_persistence",
    "comparison_gap",
    "estimate_bounds",
    "gas_inf_expressions",
    "initial_grid",
    "lower_bounds",
    "lyapunov_W",
    "lyapunov_W_bound",
    "lyapunov_X",
    "max_increase",
    "permanence_variants",
    "reference_logistic",
    "upper_bounds",
    "vstar",
]
