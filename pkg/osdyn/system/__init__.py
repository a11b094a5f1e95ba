"""The reduced herbivore-vegetation system: reduction and vector field."""

from osdyn.system.reduction import reduce
from osdyn.system.vector_field import (
    equilibrium,
    field,
    percapita_h,
    positivity_integrand,
    rhs,
)

__all__ = ["equilibrium", "field", "percapita_h", "positivity_integrand", "reduce", "rhs"]
