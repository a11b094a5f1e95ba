"""
Parameter sets of the herbivore-vegetation model and its state vector.
"""

from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from osdyn.coefficients import Coefficient, PeriodicCoefficient, constant_value
from osdyn.core.exceptions import DomainError

RAW_FIELDS = ("r", "K", "i_m", "b_i", "b_g", "v_u", "C", "m_p", "q_0", "q_s", "q")
SIMPLIFIED_FIELDS = ("a", "b", "c", "alpha", "beta", "gamma", "rho", "R")

# Raw coefficients allowed to vanish; everything else must stay above zero.
RAW_MAY_VANISH = frozenset({"v_u", "q_0", "q_s", "q"})
SIMPLIFIED_STRICT = frozenset({"b", "alpha", "beta", "R"})


def _to_coefficients(data: Any, names: Tuple[str, ...]) -> Any:
    if not isinstance(data, dict) or "period" not in data:
        return data
    period = float(data["period"])
    out = dict(data)
    for name in names:
        if name in out and not isinstance(out[name], Coefficient):
            out[name] = PeriodicCoefficient.from_spec(out[name], period)
        elif isinstance(out.get(name), PeriodicCoefficient) and out[name].period != period:
            out[name] = out[name].with_period(period)
    return out


def _check_period(name: str, c: Coefficient, period: float) -> None:
    if c.period is None or constant_value(c) is not None:
        return
    if abs(c.period - period) > 1e-12 * max(1.0, period):
        raise DomainError(
            f"coefficient {name} has period {c.period}, expected {period}", key=name
        )


class State(BaseModel):
    """Vegetation and herbivore biomass densities."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    v: float = Field(..., ge=0.0, description="Vegetation biomass density")
    h: float = Field(..., ge=0.0, description="Herbivore biomass density")

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.h])

    @classmethod
    def from_array(cls, x: Any) -> "State":
        """Build a state, snapping round-off negatives of h to zero."""
        v, h = float(x[0]), float(x[1])
        if -1e-12 < h < 0.0:
            h = 0.0
        return cls(v=v, h=h)


class RawParams(BaseModel):
    """
    The biological parameters of the seasonal Owen-Smith model.

    Every field is a coefficient sharing ``period``; plain numbers and config
    tables are promoted on validation.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    period: float = Field(..., gt=0.0, description="Shared period omega")
    r: Coefficient = Field(..., description="Vegetation growth rate r_v")
    K: Coefficient = Field(..., description="Vegetation carrying capacity")
    i_m: Coefficient = Field(..., description="Maximum intake rate per unit herbivore")
    b_i: Coefficient = Field(..., description="Half-saturation level for consumption")
    b_g: Coefficient = Field(..., description="Half-saturation level for conversion")
    v_u: Coefficient = Field(..., description="Ungrazable vegetation reserve")
    C: Coefficient = Field(..., description="Conversion efficiency, in (0, 1]")
    m_p: Coefficient = Field(..., description="Physiological attrition rate")
    q_0: Coefficient = Field(..., description="Baseline mortality")
    q_s: Coefficient = Field(..., description="Starvation mortality")
    q: Coefficient = Field(..., description="Nutrition-related mortality steepness")

    @model_validator(mode="before")
    @classmethod
    def promote(cls, data: Any) -> Any:
        return _to_coefficients(data, RAW_FIELDS)

    @model_validator(mode="after")
    def check_ranges(self) -> "RawParams":
        for name in RAW_FIELDS:
            c: Coefficient = getattr(self, name)
            _check_period(name, c, self.period)
            lowest = c.extrema().inf
            if name in RAW_MAY_VANISH:
                if lowest < 0.0:
                    raise DomainError(f"{name} must be nonnegative (inf = {lowest})", key=name)
            elif lowest <= 0.0:
                raise DomainError(f"{name} must be strictly positive (inf = {lowest})", key=name)
        if self.C.extrema().sup > 1.0:
            raise DomainError("conversion efficiency C must not exceed 1", key="C")
        return self

    def to_spec(self) -> Dict[str, Any]:
        return {name: _spec_of(getattr(self, name), name) for name in RAW_FIELDS}


class SimplifiedParams(BaseModel):
    """
    The eight coefficients of the reduced system, sharing one period.

    ``b``, ``alpha``, ``beta`` and ``R`` must be strictly positive; the
    remaining coefficients may vanish (a dry season without growth, no
    consumption, no nutritional mortality, no reserve).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    period: float = Field(..., gt=0.0, description="Shared period omega")
    a: Coefficient = Field(..., description="Intrinsic vegetation growth rate")
    b: Coefficient = Field(..., description="Self-limitation, r_v / K")
    c: Coefficient = Field(..., description="Maximum intake rate")
    alpha: Coefficient = Field(..., description="Conversion gain, C * i_m")
    beta: Coefficient = Field(..., description="Half-saturation offset, b_i - v_u")
    gamma: Coefficient = Field(..., description="Nutritional mortality, q * m_p / (C * i_m)")
    rho: Coefficient = Field(..., description="Ungrazable reserve v_u")
    R: Coefficient = Field(..., description="Total mortality, m_p + q_0 + q_s")

    _margin: float = PrivateAttr(default=0.0)
    _sup_rho: float = PrivateAttr(default=0.0)

    @model_validator(mode="before")
    @classmethod
    def promote(cls, data: Any) -> Any:
        return _to_coefficients(data, SIMPLIFIED_FIELDS)

    @model_validator(mode="after")
    def check_ranges(self) -> "SimplifiedParams":
        for name in SIMPLIFIED_FIELDS:
            c: Coefficient = getattr(self, name)
            _check_period(name, c, self.period)
            lowest = c.extrema().inf
            if name in SIMPLIFIED_STRICT:
                if lowest <= 0.0:
                    raise DomainError(
                        f"{name} must be strictly positive (inf = {lowest})", key=name
                    )
            elif lowest < 0.0:
                raise DomainError(f"{name} must be nonnegative (inf = {lowest})", key=name)
        return self

    def model_post_init(self, __context: Any) -> None:
        self._sup_rho = self.rho.extrema().sup
        self._margin = 1e-9 * (1.0 + self._sup_rho)

    @property
    def singularity_margin(self) -> float:
        """The guard distance 1e-9 * (1 + sup rho) kept between v and rho."""
        return self._margin

    @property
    def sup_rho(self) -> float:
        return self._sup_rho

    @property
    def beta_bar(self) -> Coefficient:
        """beta + rho."""
        return self.beta + self.rho

    @property
    def is_constant(self) -> bool:
        return all(constant_value(getattr(self, n)) is not None for n in SIMPLIFIED_FIELDS)

    def coefficients(self) -> Dict[str, Coefficient]:
        return {name: getattr(self, name) for name in SIMPLIFIED_FIELDS}

    def values(self, t: float, side: int = 1) -> Tuple[float, ...]:
        """
        All eight coefficients at one instant.

        Args:
            t: Time
            side: +1 for right limits, -1 for left limits at seasonal switches

        Returns:
            (a, b, c, alpha, beta, gamma, rho, R)
        """
        return (
            self.a.evaluate_scalar(t, side),
            self.b.evaluate_scalar(t, side),
            self.c.evaluate_scalar(t, side),
            self.alpha.evaluate_scalar(t, side),
            self.beta.evaluate_scalar(t, side),
            self.gamma.evaluate_scalar(t, side),
            self.rho.evaluate_scalar(t, side),
            self.R.evaluate_scalar(t, side),
        )

    def breakpoints(self) -> Tuple[float, ...]:
        """Seasonal switch fractions of any coefficient."""
        points = set()
        for name in SIMPLIFIED_FIELDS:
            c = getattr(self, name)
            if c.period is not None:
                points.update(c.breakpoints())
        return tuple(sorted(points))

    def switch_times(self, t0: float, t1: float) -> List[float]:
        """Seasonal switch instants of any coefficient in (t0, t1)."""
        times = set()
        for name in SIMPLIFIED_FIELDS:
            times.update(getattr(self, name).switch_times(t0, t1))
        return sorted(times)

    def shifted(self, tau: float) -> "SimplifiedParams":
        """Every coefficient shifted by the same phase, t -> f(t + tau)."""
        return SimplifiedParams(
            period=self.period,
            **{name: getattr(self, name).shifted(tau) for name in SIMPLIFIED_FIELDS},
        )

    def replace(self, **updates: Any) -> "SimplifiedParams":
        """Copy with some coefficients replaced (numbers and tables are promoted)."""
        data: Dict[str, Any] = {"period": self.period, **self.coefficients()}
        data.update(updates)
        return SimplifiedParams(**data)

    def to_spec(self) -> Dict[str, Any]:
        return {name: _spec_of(getattr(self, name), name) for name in SIMPLIFIED_FIELDS}


def _spec_of(c: Coefficient, name: str) -> Any:
    value = constant_value(c)
    if value is not None:
        return value
    if isinstance(c, PeriodicCoefficient):
        return c.to_spec()
    raise DomainError(
        f"coefficient {name} has no closed form and cannot be written to a config",
        key=name,
    )


def simplified_constants(**values: float) -> SimplifiedParams:
    """Shorthand for a time-independent parameter set (period defaults to 1)."""
    period = values.pop("period", 1.0)
    return SimplifiedParams(period=period, **values)
