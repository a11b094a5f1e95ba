"""Periodic coefficients, their calculus and lazy expressions."""

from osdyn.coefficients.base import Coefficient
from osdyn.coefficients.calculus import Extrema, QuadratureResult
from osdyn.coefficients.expression import (
    CoefficientExpr,
    Constant,
    SampledCoefficient,
    Shifted,
    combine,
    constant_value,
    fold,
)
from osdyn.coefficients.periodic import Harmonic, PeriodicCoefficient, Segment

__all__ = [
    "Coefficient",
    "CoefficientExpr",
    "Constant",
    "Extrema",
    "Harmonic",
    "PeriodicCoefficient",
    "QuadratureResult",
    "SampledCoefficient",
    "Segment",
    "Shifted",
    "combine",
    "constant_value",
    "fold",
]
