"""Parameter sets, trajectories and result records."""

from osdyn.models.params import RawParams, SimplifiedParams, State
from osdyn.models.reports import (
    BoundsReport,
    ConditionReport,
    ConditionVerdict,
    PeriodicOrbit,
    PoincareResult,
    SimulationSummary,
)
from osdyn.models.trajectory import IntegratorConfig, Trajectory

__all__ = [
    "BoundsReport",
    "ConditionReport",
    "ConditionVerdict",
    "IntegratorConfig",
    "PeriodicOrbit",
    "PoincareResult",
    "RawParams",
    "SimplifiedParams",
    "SimulationSummary",
    "State",
    "Trajectory",
]
