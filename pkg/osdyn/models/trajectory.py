"""
Integrator configuration and the piecewise-cubic trajectory it produces.
"""

from typing import Any, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from osdyn.coefficients import SampledCoefficient
from osdyn.core.config import settings
from osdyn.core.exceptions import DomainError
from osdyn.models.params import State


class IntegratorConfig(BaseModel):
    """Step control settings for one integration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_tol: float = Field(default=settings.REL_TOL, gt=0.0, description="Relative tolerance")
    abs_tol: float = Field(default=settings.ABS_TOL, gt=0.0, description="Absolute tolerance")
    max_step: Optional[float] = Field(
        default=None, gt=0.0, description="Largest step; defaults to period / 64"
    )
    min_step: float = Field(
        default=1e-12, gt=0.0, description="Smallest adaptive step before giving up"
    )
    scheme: Literal["rk4", "rk45"] = Field(default="rk45", description="Stepping scheme")
    safety: float = Field(default=0.9, gt=0.0, le=1.0, description="Step size safety factor")
    max_steps: int = Field(default=10_000_000, ge=1, description="Step budget per integration")

    def resolve_max_step(self, period: float) -> float:
        """The configured max step, or period / STEPS_PER_PERIOD."""
        if self.max_step is not None:
            return self.max_step
        return period / settings.STEPS_PER_PERIOD

    def tightened(self, factor: float = 10.0, period: Optional[float] = None) -> "IntegratorConfig":
        """
        Copy with both tolerances divided by ``factor``.

        Fixed-step RK4 ignores tolerances, so its step shrinks by
        factor ** (1/4) as well, lowering a fourth-order error by ``factor``.

        Args:
            factor: Tightening factor
            period: Period used to resolve a default RK4 step
        """
        update: dict = {"rel_tol": self.rel_tol / factor, "abs_tol": self.abs_tol / factor}
        if self.scheme == "rk4" and (self.max_step is not None or period is not None):
            step = self.max_step if self.max_step is not None else self.resolve_max_step(period)
            update["max_step"] = step / factor ** 0.25
        return self.model_copy(update=update)


class Trajectory(BaseModel):
    """
    Accepted integration steps with cubic Hermite dense output.

    ``slopes_start[i]`` is the right-limit derivative at ``t[i]`` and
    ``slopes_end[i]`` the left-limit derivative at ``t[i+1]``; the two differ
    at seasonal switch times.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray = Field(..., description="Step end times, strictly increasing")
    y: np.ndarray = Field(..., description="States at the step times, shape (n, 2)")
    slopes_start: np.ndarray = Field(..., description="Derivative at each step start")
    slopes_end: np.ndarray = Field(..., description="Derivative at each step end")

    @model_validator(mode="after")
    def check_shapes(self) -> "Trajectory":
        n = len(self.t)
        if self.y.shape != (n, 2):
            raise ValueError(f"states must have shape ({n}, 2), got {self.y.shape}")
        if n > 1 and np.any(np.diff(self.t) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        if self.slopes_start.shape != (max(n - 1, 0), 2) or self.slopes_end.shape != self.slopes_start.shape:
            raise ValueError("slopes must have one row per step")
        return self

    @model_validator(mode="after")
    def check_states(self) -> "Trajectory":
        if not np.all(np.isfinite(self.y)):
            raise DomainError("trajectory states must be finite")
        if np.any(self.y[:, 0] <= 0.0):
            first = int(np.argmax(self.y[:, 0] <= 0.0))
            raise DomainError(
                f"vegetation must stay positive, got v = {self.y[first, 0]} at t = {self.t[first]}",
                time=float(self.t[first]),
            )
        return self

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def steps(self) -> int:
        return len(self.t) - 1

    @property
    def final_state(self) -> State:
        return State.from_array(self.y[-1])

    @property
    def initial_state(self) -> State:
        return State.from_array(self.y[0])

    def interpolate(self, times: Any, side: int = 1) -> np.ndarray:
        """
        Dense output at arbitrary times inside the span.

        Args:
            times: Scalar or 1-D array of times in [t0, t1]
            side: At a step boundary, +1 uses the step that starts there and -1
                the step that ends there (the values agree; only rounding differs)

        Returns:
            Array of shape (m, 2)
        """
        tq = np.atleast_1d(np.asarray(times, dtype=float))
        lo = self.t0 - 1e-12 * max(1.0, abs(self.t0))
        hi = self.t1 + 1e-12 * max(1.0, abs(self.t1))
        if np.any(tq < lo) or np.any(tq > hi):
            raise DomainError(
                f"requested times outside trajectory span [{self.t0}, {self.t1}]"
            )
        if self.steps == 0:
            return np.repeat(self.y[:1], len(tq), axis=0)
        which = "left" if side < 0 else "right"
        idx = np.clip(np.searchsorted(self.t, tq, side=which) - 1, 0, self.steps - 1)
        t_lo = self.t[idx]
        width = self.t[idx + 1] - t_lo
        theta = ((tq - t_lo) / width)[:, None]
        theta2 = theta * theta
        theta3 = theta2 * theta
        h00 = 2.0 * theta3 - 3.0 * theta2 + 1.0
        h10 = theta3 - 2.0 * theta2 + theta
        h01 = -2.0 * theta3 + 3.0 * theta2
        h11 = theta3 - theta2
        w = width[:, None]
        out = (
            h00 * self.y[idx]
            + h10 * w * self.slopes_start[idx]
            + h01 * self.y[idx + 1]
            + h11 * w * self.slopes_end[idx]
        )
        exact = np.isin(tq, self.t)
        if np.any(exact):
            out[exact] = self.y[np.searchsorted(self.t, tq[exact])]
        return out

    def state_at(self, t: float) -> State:
        return State.from_array(self.interpolate(t)[0])

    def sample(self, cadence: Optional[float] = None, times: Optional[Sequence[float]] = None) -> np.ndarray:
        """
        Sample times and states on a uniform grid or at given instants.

        Args:
            cadence: Spacing of a grid starting at t0 (t1 is always included)
            times: Explicit sample times; takes precedence over cadence

        Returns:
            Array of shape (m, 3) with columns t, v, h
        """
        if times is not None:
            grid = np.asarray(times, dtype=float)
        elif cadence is not None:
            count = int(np.floor((self.t1 - self.t0) / cadence + 1e-9))
            grid = self.t0 + cadence * np.arange(count + 1)
            if grid[-1] < self.t1 - 1e-12 * max(1.0, abs(self.t1)):
                grid = np.append(grid, self.t1)
            grid[-1] = min(grid[-1], self.t1)
        else:
            grid = self.t
        return np.column_stack([grid, self.interpolate(grid)])

    def to_frame(self, cadence: Optional[float] = None, times: Optional[Sequence[float]] = None) -> pd.DataFrame:
        """Samples as a DataFrame with columns ``t, v, h``."""
        return pd.DataFrame(self.sample(cadence, times), columns=["t", "v", "h"])

    def window(self, start: float, end: Optional[float] = None, points: int = 2048) -> np.ndarray:
        """Dense samples on [start, end] plus every step node inside it, shape (m, 3)."""
        end = self.t1 if end is None else end
        grid = np.union1d(np.linspace(start, end, points), self.t[(self.t >= start) & (self.t <= end)])
        return self.sample(times=grid)

    def as_coefficient(
            self,
            component: Literal["v", "h"],
            period: float,
            start: Optional[float] = None,
            breakpoints: Sequence[float] = (),
    ) -> SampledCoefficient:
        """
        One period of a component, repeated periodically.

        Args:
            component: ``v`` or ``h``
            period: Period to wrap with
            start: Start of the window; defaults to the last full period
            breakpoints: Seasonal switch fractions (relative to time 0)

        Returns:
            A periodic coefficient reading the dense output
        """
        column = 0 if component == "v" else 1
        origin = self.t1 - period if start is None else start
        if origin < self.t0 - 1e-12 * max(1.0, abs(self.t0)):
            raise DomainError("trajectory is shorter than one period")
        origin = max(origin, self.t0)

        def func(t: np.ndarray, side: int) -> np.ndarray:
            tau = origin + np.mod(t - origin, period)
            flat = np.minimum(tau.reshape(-1), self.t1)
            return self.interpolate(flat, side)[:, column].reshape(np.shape(t))

        wrap = (origin / period) % 1.0
        return SampledCoefficient(
            func, period, [*breakpoints, wrap], name=f"{component}_hat"
        )
