"""Periodic orbits as fixed points of the period map, and their stability."""

from osdyn.periodic.floquet import (
    boundary_multipliers,
    boundary_orbit,
    build_orbit,
    classify,
    find_orbits,
    monodromy,
)
from osdyn.periodic.poincare import (
    FixedPointOptions,
    find_fixed_point,
    poincare,
    seed_from_simulation,
    shooting_config,
)

__all__ = [
    "FixedPointOptions",
    "boundary_multipliers",
    "boundary_orbit",
    "build_orbit",
    "classify",
    "find_fixed_point",
    "find_orbits",
    "monodromy",
    "poincare",
    "seed_from_simulation",
    "shooting_config",
]
