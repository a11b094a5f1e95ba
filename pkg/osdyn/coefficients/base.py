"""
Common interface shared by every time-dependent coefficient.
"""

from abc import abstractmethod
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from osdyn.coefficients.calculus import (
    CumulativeIntegral,
    Extrema,
    QuadratureResult,
    gauss_legendre_average,
    locate_extrema,
)
from osdyn.core.config import settings

Number = Union[int, float]


class Coefficient:
    """
    A nonnegative-or-signed function of time, periodic with ``period``.

    ``period`` is None for time-independent coefficients. ``evaluate`` takes a
    ``side`` argument selecting the right limit (``+1``) or the left limit
    (``-1``) at a discontinuity. Derived quantities (average, extrema,
    antiderivative table) are computed once and memoised per instance.
    """

    period: Optional[float]

    @abstractmethod
    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        """Vectorized evaluation at times t."""

    @abstractmethod
    def breakpoints(self) -> Tuple[float, ...]:
        """Discontinuity fractions of the period, sorted, in [0, 1)."""

    def _cache(self) -> Dict[str, Any]:
        memo = getattr(self, "_memo", None)
        if memo is None:
            memo = {}
            object.__setattr__(self, "_memo", memo)
        return memo

    def evaluate_scalar(self, t: float, side: int = 1) -> float:
        """Scalar evaluation; subclasses override with a faster path."""
        return float(self.evaluate(np.array([t]), side)[0])

    def __call__(self, t: Any, side: int = 1) -> Any:
        if np.ndim(t) == 0:
            return self.evaluate_scalar(float(t), side)
        return self.evaluate(t, side)

    @property
    def is_constant(self) -> bool:
        """True when the coefficient does not depend on time."""
        return self.period is None

    def switch_times(self, t0: float, t1: float) -> List[float]:
        """
        Discontinuity instants in the open interval (t0, t1).

        Args:
            t0: Interval start
            t1: Interval end

        Returns:
            Sorted switch times
        """
        if self.period is None or not self.breakpoints() or t1 <= t0:
            return []
        omega = self.period
        out = []
        k = int(np.floor(t0 / omega)) - 1
        while k * omega < t1:
            for frac in self.breakpoints():
                s = (k + frac) * omega
                if t0 < s < t1:
                    out.append(s)
            k += 1
        return sorted(set(out))

    def quadrature_average(self) -> QuadratureResult:
        """Period average by composite Gauss-Legendre with an error estimate."""
        memo = self._cache()
        if "quadrature" not in memo:
            if self.period is None:
                value = self.evaluate_scalar(0.0)
                memo["quadrature"] = QuadratureResult(value, 0.0, 0)
            else:
                memo["quadrature"] = gauss_legendre_average(
                    self.evaluate,
                    self.period,
                    self.breakpoints(),
                    tol=settings.QUADRATURE_TOL,
                )
        return memo["quadrature"]

    def average(self) -> float:
        """Period average A(f)."""
        return self.quadrature_average().value

    def extrema(self) -> Extrema:
        """Infimum and supremum over one period."""
        memo = self._cache()
        if "extrema" not in memo:
            if self.period is None:
                value = self.evaluate_scalar(0.0)
                memo["extrema"] = Extrema(value, value)
            else:
                memo["extrema"] = locate_extrema(
                    self.evaluate,
                    self.period,
                    self.breakpoints(),
                    samples=settings.EXTREMA_SAMPLES,
                )
        return memo["extrema"]

    def inf(self) -> float:
        return self.extrema().inf

    def sup(self) -> float:
        return self.extrema().sup

    def _antiderivative(self) -> CumulativeIntegral:
        memo = self._cache()
        if "antiderivative" not in memo:
            assert self.period is not None
            memo["antiderivative"] = CumulativeIntegral(
                self.evaluate, self.period, self.breakpoints()
            )
        return memo["antiderivative"]

    def integral(self, t: Any) -> Any:
        """
        Integral of the coefficient from 0 to t.

        Args:
            t: Scalar or array of times (any sign)

        Returns:
            The definite integral, same shape as t
        """
        t_arr = np.asarray(t, dtype=float)
        if self.period is None:
            out = self.evaluate_scalar(0.0) * t_arr
        else:
            omega = self.period
            cycles = np.floor(t_arr / omega)
            tau = t_arr - cycles * omega
            table = self._antiderivative()
            out = cycles * table.total + table(tau)
        return float(out) if out.ndim == 0 else out

    def shifted(self, tau: float) -> "Coefficient":
        """The coefficient t -> f(t + tau)."""
        from osdyn.coefficients.expression import Shifted

        if self.period is None or tau % self.period == 0.0:
            return self
        return Shifted(inner=self, offset=tau)

    def __add__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("add", self, other)

    def __radd__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("add", other, self)

    def __sub__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("sub", self, other)

    def __rsub__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("sub", other, self)

    def __mul__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("mul", self, other)

    def __rmul__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("mul", other, self)

    def __truediv__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("div", self, other)

    def __rtruediv__(self, other: Any) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("div", other, self)

    def __neg__(self) -> "Coefficient":
        from osdyn.coefficients.expression import combine

        return combine("neg", self)
