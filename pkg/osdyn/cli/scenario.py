"""
Scenario files: the TOML document every command reads.

A scenario names the period, the initial state, the horizon and exactly one
of ``raw_params`` or ``simplified_params``. Each coefficient is either a bare
number or a table::

    [simplified_params.a]
    base = 1.0
    harmonics = [[0.5, 1, 0.0]]          # amplitude, k, phase
    segments = [[0.0, 0.5, 0.2], [0.5, 1.0, 0.0]]   # start, end, value

Unknown keys are rejected and every validation failure is reported as a
``ConfigError`` naming the dotted key.
"""

import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import structlog
import tomli_w
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    field_validator,
    model_validator,
)

from osdyn.coefficients import PeriodicCoefficient
from osdyn.core.config import settings
from osdyn.core.exceptions import ConfigError, DomainError
from osdyn.models.params import RAW_FIELDS, SIMPLIFIED_FIELDS, RawParams, SimplifiedParams, State
from osdyn.models.trajectory import IntegratorConfig
from osdyn.system.reduction import reduce

logger = structlog.get_logger(__name__)

_GRID_PATTERN = re.compile(r"^grid:(\d+)$")
_KNOB_PATTERN = re.compile(r"^(?P<name>\w+)\.(?:base|segments\[(?P<index>\d+)\]\.value)$")


class CoefficientTable(BaseModel):
    """Table form of a coefficient."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    base: float = Field(0.0, description="Constant term")
    harmonics: List[Tuple[float, int, float]] = Field(
        default_factory=list, description="Sine terms as [amplitude, k, phase]"
    )
    segments: List[Tuple[float, float, float]] = Field(
        default_factory=list, description="Seasonal steps as [start, end, value]"
    )

    def to_config(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"base": self.base}
        if self.harmonics:
            data["harmonics"] = [list(h) for h in self.harmonics]
        if self.segments:
            data["segments"] = [list(s) for s in self.segments]
        return data


CoefficientSpec = Union[float, CoefficientTable]


def _spec_to_config(spec: CoefficientSpec) -> Any:
    return spec.to_config() if isinstance(spec, CoefficientTable) else float(spec)


class _CoefficientSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def to_config(self) -> Dict[str, Any]:
        return {name: _spec_to_config(getattr(self, name)) for name in type(self).model_fields}


class RawSection(_CoefficientSection):
    """The eleven biological coefficients."""

    r: CoefficientSpec = Field(..., description="Vegetation growth rate r_v")
    K: CoefficientSpec = Field(..., description="Vegetation carrying capacity")
    i_m: CoefficientSpec = Field(..., description="Maximum intake rate")
    b_i: CoefficientSpec = Field(..., description="Half-saturation level for consumption")
    b_g: CoefficientSpec = Field(..., description="Half-saturation level for conversion")
    v_u: CoefficientSpec = Field(..., description="Ungrazable vegetation reserve")
    C: CoefficientSpec = Field(..., description="Conversion efficiency")
    m_p: CoefficientSpec = Field(..., description="Physiological attrition rate")
    q_0: CoefficientSpec = Field(..., description="Baseline mortality")
    q_s: CoefficientSpec = Field(..., description="Starvation mortality")
    q: CoefficientSpec = Field(..., description="Nutrition-related mortality steepness")


class SimplifiedSection(_CoefficientSection):
    """The eight reduced coefficients."""

    a: CoefficientSpec = Field(..., description="Intrinsic vegetation growth rate")
    b: CoefficientSpec = Field(..., description="Self-limitation")
    c: CoefficientSpec = Field(..., description="Maximum intake rate")
    alpha: CoefficientSpec = Field(..., description="Conversion gain")
    beta: CoefficientSpec = Field(..., description="Half-saturation offset")
    gamma: CoefficientSpec = Field(..., description="Nutritional mortality")
    rho: CoefficientSpec = Field(..., description="Ungrazable reserve")
    R: CoefficientSpec = Field(..., description="Total mortality")


class AnalysisSection(BaseModel):
    """Settings of the condition checkers."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bound_periods: int = Field(
        default=settings.BOUND_PERIODS, ge=2, description="Simulated periods per bound run"
    )


class OrbitSection(BaseModel):
    """Settings of the periodic-orbit search."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seeds: Union[str, List[State]] = Field(
        default="grid:3", description="Explicit seed states or grid:N for an N x N grid"
    )
    warmup_periods: int = Field(
        default=settings.ORBIT_WARMUP_PERIODS, ge=0, description="Periods simulated before Newton"
    )
    fp_tol: float = Field(default=settings.FP_TOL, gt=0.0, description="Fixed-point residual tolerance")
    max_iter: int = Field(default=settings.FP_MAX_ITER, ge=0, description="Newton iterations")

    @field_validator("seeds", mode="before")
    @classmethod
    def parse_seeds(cls, value: Any) -> Any:
        if isinstance(value, str):
            match = _GRID_PATTERN.match(value.strip())
            if not match or int(match.group(1)) < 1:
                raise ValueError(f"seed grid must look like grid:N with N >= 1, got {value!r}")
            return value.strip()
        if isinstance(value, list):
            return [
                {"v": s[0], "h": s[1]} if isinstance(s, (list, tuple)) and len(s) == 2 else s
                for s in value
            ]
        return value

    @property
    def grid_size(self) -> Optional[int]:
        if isinstance(self.seeds, str):
            return int(self.seeds.split(":", 1)[1])
        return None


class Knob(BaseModel):
    """One swept scalar: a coefficient's base or one of its segment values."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    path: str = Field(..., description="alpha.base or a.segments[0].value")
    start: float = Field(..., description="First grid value")
    stop: float = Field(..., description="Last grid value")
    count: int = Field(..., ge=1, description="Number of grid values")

    @field_validator("path")
    @classmethod
    def check_path(cls, value: str) -> str:
        if not _KNOB_PATTERN.match(value):
            raise ValueError(
                f"knob path {value!r} must be <coefficient>.base or <coefficient>.segments[i].value"
            )
        return value

    def values(self) -> List[float]:
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * step for i in range(self.count - 1)] + [self.stop]


class SweepSpec(BaseModel):
    """One or two knobs swept over a row-major grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    knobs: List[Knob] = Field(..., min_length=1, max_length=2, description="Swept scalars")


class Scenario(BaseModel):
    """A complete, validated scenario."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    period: float = Field(..., gt=0.0, description="Period omega shared by every coefficient")
    t0: float = Field(0.0, description="Start time")
    horizon: float = Field(100.0, gt=0.0, description="Simulated span in periods")
    cadence: Optional[float] = Field(None, gt=0.0, description="Output sample spacing")
    initial_state: State = Field(..., description="Initial vegetation and herbivore densities")
    integrator: IntegratorConfig = Field(
        default_factory=IntegratorConfig, description="Integrator overrides"
    )
    raw_params: Optional[RawSection] = Field(None, description="Biological coefficients")
    simplified_params: Optional[SimplifiedSection] = Field(None, description="Reduced coefficients")
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    orbit: OrbitSection = Field(default_factory=OrbitSection)
    sweep: Optional[SweepSpec] = Field(None, description="Sweep grid")

    _params: Optional[SimplifiedParams] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_parameter_source(self) -> "Scenario":
        if (self.raw_params is None) == (self.simplified_params is None):
            raise ValueError("exactly one of raw_params and simplified_params is required")
        return self

    @property
    def section(self) -> str:
        return "raw_params" if self.raw_params is not None else "simplified_params"

    @property
    def t1(self) -> float:
        return self.t0 + self.horizon * self.period

    def resolved_cadence(self) -> float:
        return self.cadence if self.cadence is not None else self.period / settings.STEPS_PER_PERIOD

    def _coefficients(self, section: str, names: Tuple[str, ...]) -> Dict[str, PeriodicCoefficient]:
        specs = getattr(self, section).to_config()
        out: Dict[str, PeriodicCoefficient] = {}
        for name in names:
            try:
                out[name] = PeriodicCoefficient.from_spec(specs[name], self.period)
            except (DomainError, ValidationError, ValueError) as exc:
                raise ConfigError(f"{section}.{name}: {exc}", key=f"{section}.{name}") from exc
        return out

    def raw(self) -> RawParams:
        """
        The biological parameter set.

        Raises:
            ConfigError: If the scenario has no raw_params or a value is out of range
        """
        if self.raw_params is None:
            raise ConfigError("raw_params is required", key="raw_params")
        coefficients = self._coefficients("raw_params", RAW_FIELDS)
        try:
            return RawParams(period=self.period, **coefficients)
        except DomainError as exc:
            key = f"raw_params.{exc.context.get('key')}"
            raise ConfigError(f"{key}: {exc.message}", key=key) from exc

    def params(self) -> SimplifiedParams:
        """
        The reduced parameters, built once per scenario.

        Raises:
            ConfigError: If a coefficient is out of range
            HalfSaturationMismatch: If raw b_i and b_g differ
            NonpositiveBeta: If raw b_i - v_u is not positive
        """
        if self._params is not None:
            return self._params
        if self.raw_params is not None:
            self._params = reduce(self.raw())
            return self._params
        coefficients = self._coefficients("simplified_params", SIMPLIFIED_FIELDS)
        try:
            self._params = SimplifiedParams(period=self.period, **coefficients)
        except DomainError as exc:
            key = f"simplified_params.{exc.context.get('key')}"
            raise ConfigError(f"{key}: {exc.message}", key=key) from exc
        return self._params

    def to_config(self) -> Dict[str, Any]:
        """Plain data that ``tomli_w`` can write and ``from_config`` reads back."""
        data: Dict[str, Any] = {"period": self.period, "t0": self.t0, "horizon": self.horizon}
        if self.cadence is not None:
            data["cadence"] = self.cadence
        data["initial_state"] = {"v": self.initial_state.v, "h": self.initial_state.h}
        data["integrator"] = self.integrator.model_dump(exclude_none=True)
        data[self.section] = getattr(self, self.section).to_config()
        data["analysis"] = self.analysis.model_dump()
        orbit = self.orbit.model_dump()
        if not isinstance(self.orbit.seeds, str):
            orbit["seeds"] = [[s.v, s.h] for s in self.orbit.seeds]
        data["orbit"] = orbit
        if self.sweep is not None:
            data["sweep"] = self.sweep.model_dump()
        return data

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_config())

    @classmethod
    def from_config(cls, data: Dict[str, Any]) -> "Scenario":
        """
        Validate plain config data.

        Raises:
            ConfigError: Naming the first offending key
        """
        try:
            scenario = cls.model_validate(data)
        except ValidationError as exc:
            first = exc.errors()[0]
            key = ".".join(str(part) for part in first["loc"]) or None
            raise ConfigError(f"{key}: {first['msg']}", key=key, errors=exc.error_count()) from exc
        if scenario.raw_params is not None:
            scenario.raw()
        else:
            scenario.params()
        return scenario

    def with_overrides(
            self,
            tol: Optional[float] = None,
            scheme: Optional[str] = None,
            periods: Optional[float] = None,
            seed_grid: Optional[int] = None,
    ) -> "Scenario":
        """Apply command-line overrides and validate again."""
        data = self.to_config()
        if tol is not None:
            data["integrator"]["rel_tol"] = tol
        if scheme is not None:
            data["integrator"]["scheme"] = scheme
        if periods is not None:
            data["horizon"] = periods
        if seed_grid is not None:
            data["orbit"]["seeds"] = f"grid:{seed_grid}"
        return Scenario.from_config(data)

    def _knob_target(self, data: Dict[str, Any], path: str) -> Tuple[Dict[str, Any], str, Optional[int]]:
        match = _KNOB_PATTERN.match(path)
        if not match:
            raise ConfigError(f"invalid knob path {path!r}", key=path)
        coefficients = data[self.section]
        name = match.group("name")
        if name not in coefficients:
            raise ConfigError(f"knob {path!r} names no coefficient of {self.section}", key=path)
        index = None if match.group("index") is None else int(match.group("index"))
        if index is not None:
            spec = coefficients[name]
            segments = spec.get("segments", []) if isinstance(spec, dict) else []
            if index >= len(segments):
                raise ConfigError(f"knob {path!r}: {name} has {len(segments)} segments", key=path)
        return coefficients, name, index

    def check_knob(self, path: str) -> None:
        """
        Raises:
            ConfigError: If the path names no coefficient or segment of this scenario
        """
        self._knob_target(self.to_config(), path)

    def with_knob(self, path: str, value: float) -> "Scenario":
        """
        Copy with one scalar knob set.

        Args:
            path: ``<coefficient>.base`` or ``<coefficient>.segments[i].value``
            value: New value

        Raises:
            ConfigError: If the path is invalid or the new value is out of range
        """
        data = self.to_config()
        coefficients, name, index = self._knob_target(data, path)
        spec = coefficients[name]
        if index is not None:
            spec["segments"][index][2] = value
        elif isinstance(spec, dict):
            spec["base"] = value
        else:
            coefficients[name] = value
        return Scenario.from_config(data)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read and validate a scenario file.

    Args:
        path: TOML file

    Returns:
        The validated scenario

    Raises:
        ConfigError: If the file is missing, malformed or invalid
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}", key="config") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed scenario file {path}: {exc}", key="config") from exc
    scenario = Scenario.from_config(data)
    logger.debug("scenario loaded", path=str(path), source=scenario.section, period=scenario.period)
    return scenario
