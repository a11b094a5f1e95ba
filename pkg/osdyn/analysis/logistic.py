"""
Closed form of the periodic solution of the seasonal logistic equation.

For v' = v (a - b v) the substitution u = 1/v linearizes the equation. In
scaled form

    1/v*(t) = exp(-A(t)) c* + J(t),   A(t) = int_0^t a,
    J(t) = int_0^t exp(-(A(t) - A(s))) b(s) ds,

and v*(0) = v*(period) forces c* = J(period) / (1 - exp(-A(period))). No
exponent grows with the period, so long seasons stay representable.
"""

import math
from functools import lru_cache
from typing import Any, Dict, Optional, Tuple

import numpy as np
import structlog

from osdyn.coefficients import Coefficient, Constant, constant_value
from osdyn.coefficients.calculus import DiscountedIntegral
from osdyn.core.exceptions import HypothesisError
from osdyn.models.params import SimplifiedParams

logger = structlog.get_logger(__name__)


class ClosedFormLogistic(Coefficient):
    """
    The unique positive periodic solution v* of the logistic subsystem.

    Behaves as a periodic coefficient, so it composes with the model
    coefficients in expressions and quadratures.
    """

    def __init__(self, a: Coefficient, b: Coefficient, period: float) -> None:
        """
        Build v* and cache its quadrature tables.

        Args:
            a: Growth coefficient
            b: Self-limitation coefficient
            period: Shared period

        Raises:
            HypothesisError: If the period average of a or b is not positive
        """
        self.a = a
        self.b = b
        self.period = period
        self._memo: Dict[str, Any] = {}

        mean_a = a.average()
        mean_b = b.average()
        if mean_a <= 0.0 or mean_b <= 0.0:
            raise HypothesisError(
                "the periodic logistic solution needs positive averages of a and b"
                f" (A(a) = {mean_a}, A(b) = {mean_b})",
                average_a=mean_a,
                average_b=mean_b,
            )

        self._breaks = tuple(
            sorted({*(a.breakpoints() if a.period else ()), *(b.breakpoints() if b.period else ())})
        )
        value_a = constant_value(a)
        value_b = constant_value(b)
        self._constant: Optional[float] = None
        self._table: Optional[DiscountedIntegral] = None
        if value_a is not None and value_b is not None:
            self._constant = value_a / value_b
            self.cstar = value_b / value_a
            return

        self._table = DiscountedIntegral(self.b.evaluate, self.a.integral, period, self._breaks)
        growth = self._table.growth
        self.cstar = -self._table.total / math.expm1(-growth)
        logger.debug("periodic logistic solution built", cstar=self.cstar, growth=growth)

    @property
    def constant(self) -> Optional[float]:
        """a/b when both coefficients are time-independent, else None."""
        return self._constant

    def as_coefficient(self) -> Coefficient:
        """An exact ``Constant`` in the time-independent case, else v* itself."""
        if self._constant is not None:
            return Constant(self._constant)
        return self

    def breakpoints(self) -> Tuple[float, ...]:
        return self._breaks

    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self._constant is not None:
            return np.full(t.shape, self._constant)
        assert self._table is not None
        tau = np.mod(t, self.period)
        return 1.0 / (np.exp(-self.a.integral(tau)) * self.cstar + self._table(tau))

    def evaluate_scalar(self, t: float, side: int = 1) -> float:
        if self._constant is not None:
            return self._constant
        return float(self.evaluate(np.array([t]))[0])

    def residual(self, t: Any, delta: float = 1e-5) -> np.ndarray:
        """
        |dv*/dt - v*(a - b v*)| by central differences of the closed form.

        Args:
            t: Times away from seasonal switches
            delta: Difference step

        Returns:
            Absolute residuals
        """
        t = np.asarray(t, dtype=float)
        derivative = (self.evaluate(t + delta) - self.evaluate(t - delta)) / (2.0 * delta)
        v = self.evaluate(t)
        return np.abs(derivative - v * (self.a.evaluate(t) - self.b.evaluate(t) * v))


def vstar(a: Coefficient, b: Coefficient, period: float) -> ClosedFormLogistic:
    """
    Periodic logistic solution for growth a and self-limitation b.

    Args:
        a: Growth coefficient
        b: Self-limitation coefficient
        period: Shared period

    Returns:
        The closed form v*

    Raises:
        HypothesisError: If A(a) <= 0 or A(b) <= 0
    """
    return ClosedFormLogistic(a, b, period)


@lru_cache(maxsize=64)
def reference_logistic(p: SimplifiedParams) -> ClosedFormLogistic:
    """v* for a parameter set, memoised per (hashable, immutable) parameter set."""
    return vstar(p.a, p.b, p.period)
