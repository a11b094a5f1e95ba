"""
Closed-form periodic coefficients: a constant, sine harmonics and seasonal steps.
"""

import bisect
import math
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from osdyn.coefficients.base import Coefficient
from osdyn.coefficients.calculus import Extrema
from osdyn.core.exceptions import DomainError

TWO_PI = 2.0 * math.pi
_TILING_TOL = 1e-12


class Harmonic(BaseModel):
    """One sine term ``amplitude * sin(2*pi*k*t/period + phase)``."""

    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(..., description="Amplitude of the sine term")
    k: int = Field(..., ge=1, description="Integer frequency (cycles per period)")
    phase: float = Field(0.0, description="Phase in radians")

    @model_validator(mode="before")
    @classmethod
    def from_sequence(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 3:
                raise ValueError("harmonic must be [amplitude, k, phase]")
            return {"amplitude": data[0], "k": data[1], "phase": data[2]}
        return data

    def as_list(self) -> List[Union[float, int]]:
        return [self.amplitude, self.k, self.phase]


class Segment(BaseModel):
    """A seasonal step active on the half-open fraction interval [start, end)."""

    model_config = ConfigDict(frozen=True)

    start: float = Field(..., ge=0.0, lt=1.0, description="Start fraction of the period")
    end: float = Field(..., gt=0.0, le=1.0, description="End fraction of the period")
    value: float = Field(..., ge=0.0, description="Value added while the step is active")

    @model_validator(mode="before")
    @classmethod
    def from_sequence(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 3:
                raise ValueError("segment must be [start, end, value]")
            return {"start": data[0], "end": data[1], "value": data[2]}
        return data

    @model_validator(mode="after")
    def check_order(self) -> "Segment":
        if self.end <= self.start:
            raise ValueError(f"segment end {self.end} must exceed start {self.start}")
        return self

    @property
    def width(self) -> float:
        return self.end - self.start

    def as_list(self) -> List[float]:
        return [self.start, self.end, self.value]


class PeriodicCoefficient(BaseModel, Coefficient):
    """
    An omega-periodic coefficient ``base + sum of harmonics + active step``.

    Averages and antiderivatives are exact; extrema go through the shared
    sampling path. Instances are immutable and safe to share across threads.
    """

    model_config = ConfigDict(frozen=True)

    period: float = Field(..., gt=0.0, description="Period omega")
    base: float = Field(0.0, description="Constant term")
    harmonics: Tuple[Harmonic, ...] = Field(default=(), description="Sine terms")
    segments: Tuple[Segment, ...] = Field(default=(), description="Seasonal steps tiling [0, 1)")
    strictly_positive: bool = Field(
        False, description="Require a positive infimum instead of a nonnegative one"
    )

    _memo: Dict[str, Any] = PrivateAttr(default_factory=dict)
    _amps: Tuple[float, ...] = PrivateAttr(default=())
    _freqs: Tuple[float, ...] = PrivateAttr(default=())
    _phases: Tuple[float, ...] = PrivateAttr(default=())
    _starts: Tuple[float, ...] = PrivateAttr(default=())
    _values: Tuple[float, ...] = PrivateAttr(default=())

    @field_validator("segments")
    @classmethod
    def check_tiling(cls, segments: Tuple[Segment, ...]) -> Tuple[Segment, ...]:
        if not segments:
            return segments
        ordered = tuple(sorted(segments, key=lambda s: s.start))
        cursor = 0.0
        for seg in ordered:
            if abs(seg.start - cursor) > _TILING_TOL:
                kind = "gap" if seg.start > cursor else "overlap"
                raise ValueError(f"segments leave a {kind} at fraction {cursor}")
            cursor = seg.end
        if abs(cursor - 1.0) > _TILING_TOL:
            raise ValueError(f"segments end at fraction {cursor}, expected 1")
        return ordered

    def model_post_init(self, __context: Any) -> None:
        self._amps = tuple(h.amplitude for h in self.harmonics)
        self._freqs = tuple(TWO_PI * h.k / self.period for h in self.harmonics)
        self._phases = tuple(h.phase for h in self.harmonics)
        self._starts = tuple(s.start for s in self.segments)
        self._values = tuple(s.value for s in self.segments)
        bounds = self.extrema()
        if bounds.inf < -_TILING_TOL * (1.0 + abs(bounds.sup)):
            raise DomainError(
                f"coefficient takes negative values (inf = {bounds.inf})", inf=bounds.inf
            )
        if self.strictly_positive and bounds.inf <= 0.0:
            raise DomainError(
                f"coefficient must be strictly positive (inf = {bounds.inf})", inf=bounds.inf
            )

    @classmethod
    def constant(
            cls, value: float, period: float, strictly_positive: bool = False
    ) -> "PeriodicCoefficient":
        """A time-independent coefficient carrying the shared period."""
        return cls(period=period, base=value, strictly_positive=strictly_positive)

    @property
    def is_constant(self) -> bool:
        if any(a != 0.0 for a in self._amps):
            return False
        return len(set(self._values)) <= 1

    def constant_value(self) -> Optional[float]:
        """The value when the coefficient is time-independent, else None."""
        if not self.is_constant:
            return None
        return self.base + (self._values[0] if self._values else 0.0)

    def breakpoints(self) -> Tuple[float, ...]:
        if len(self.segments) <= 1:
            return ()
        return tuple(
            s for s, v, prev in zip(self._starts, self._values, self._values[-1:] + self._values[:-1])
            if v != prev
        )

    def _segment_index(self, frac: float, side: int) -> int:
        frac = self._snap_fraction(frac)
        if side < 0:
            idx = bisect.bisect_left(self._starts, frac) - 1
        else:
            idx = bisect.bisect_right(self._starts, frac) - 1
        return idx % len(self._starts)

    def _snap_fraction(self, frac: float) -> float:
        """Round fractions within 1e-12 of a step start onto it."""
        if frac > 1.0 - _TILING_TOL:
            return 0.0
        pos = bisect.bisect_left(self._starts, frac)
        for i in (pos - 1, pos):
            if 0 <= i < len(self._starts) and abs(self._starts[i] - frac) <= _TILING_TOL:
                return self._starts[i]
        return frac

    def evaluate_scalar(self, t: float, side: int = 1) -> float:
        value = self.base
        for amp, freq, phase in zip(self._amps, self._freqs, self._phases):
            value += amp * math.sin(freq * t + phase)
        if self._values:
            frac = (t % self.period) / self.period
            value += self._values[self._segment_index(frac, side)]
        return value

    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        value = np.full(t.shape, self.base)
        for amp, freq, phase in zip(self._amps, self._freqs, self._phases):
            value = value + amp * np.sin(freq * t + phase)
        if self._values:
            frac = np.mod(t, self.period) / self.period
            starts = np.asarray(self._starts)
            frac = np.where(frac > 1.0 - _TILING_TOL, 0.0, frac)
            pos = np.clip(np.searchsorted(starts, frac), 1, len(starts) - 1)
            for near in (starts[pos - 1], starts[pos]):
                frac = np.where(np.abs(frac - near) <= _TILING_TOL, near, frac)
            idx = np.searchsorted(starts, frac, side="left" if side < 0 else "right") - 1
            value = value + np.asarray(self._values)[idx % len(starts)]
        return value

    def average(self) -> float:
        """Exact mean: harmonics vanish, steps weigh by their width."""
        return self.base + sum(s.value * s.width for s in self.segments)

    def extrema(self) -> Extrema:
        value = self.constant_value()
        if value is not None:
            return Extrema(value, value)
        if not self._amps:
            return Extrema(self.base + min(self._values), self.base + max(self._values))
        return super().extrema()

    def integral(self, t: Any) -> Any:
        """
        Exact integral of the coefficient from 0 to t.

        Args:
            t: Scalar or array of times

        Returns:
            The definite integral, same shape as t
        """
        t_arr = np.asarray(t, dtype=float)
        out = self.base * t_arr
        for amp, freq, phase in zip(self._amps, self._freqs, self._phases):
            out = out + amp * (math.cos(phase) - np.cos(freq * t_arr + phase)) / freq
        if self.segments:
            cycles = np.floor(t_arr / self.period)
            frac = (t_arr - cycles * self.period) / self.period
            step_total = sum(s.value * s.width for s in self.segments)
            partial = np.zeros_like(t_arr)
            for seg in self.segments:
                covered = np.clip(frac, seg.start, seg.end) - seg.start
                partial = partial + seg.value * covered
            out = out + self.period * (cycles * step_total + partial)
        return float(out) if out.ndim == 0 else out

    def shifted(self, tau: float) -> "PeriodicCoefficient":
        """
        The coefficient t -> f(t + tau), kept in closed form.

        Args:
            tau: Time shift

        Returns:
            A new coefficient with rotated phases and segments
        """
        harmonics = tuple(
            Harmonic(
                amplitude=h.amplitude,
                k=h.k,
                phase=math.fmod(h.phase + TWO_PI * h.k * tau / self.period, TWO_PI),
            )
            for h in self.harmonics
        )
        shift = (tau / self.period) % 1.0
        segments: List[Segment] = []
        for seg in self.segments:
            lo = seg.start - shift
            hi = seg.end - shift
            for offset in (0.0, 1.0, -1.0):
                a = max(0.0, lo + offset)
                b = min(1.0, hi + offset)
                if b - a > _TILING_TOL:
                    segments.append(Segment(start=a, end=b, value=seg.value))
        return PeriodicCoefficient(
            period=self.period,
            base=self.base,
            harmonics=harmonics,
            segments=tuple(_snap(segments)),
            strictly_positive=self.strictly_positive,
        )

    def scaled(self, k: float) -> "PeriodicCoefficient":
        """The coefficient multiplied by a nonnegative constant."""
        if k < 0.0:
            raise DomainError(f"scale factor must be nonnegative, got {k}")
        return PeriodicCoefficient(
            period=self.period,
            base=self.base * k,
            harmonics=tuple(
                Harmonic(amplitude=h.amplitude * k, k=h.k, phase=h.phase) for h in self.harmonics
            ),
            segments=tuple(
                Segment(start=s.start, end=s.end, value=s.value * k) for s in self.segments
            ),
            strictly_positive=self.strictly_positive and k > 0.0,
        )

    def with_base(self, value: float) -> "PeriodicCoefficient":
        """Copy with a new constant term."""
        data = self.model_dump()
        data["base"] = value
        return PeriodicCoefficient(**data)

    def with_segment_value(self, index: int, value: float) -> "PeriodicCoefficient":
        """Copy with one seasonal step changed."""
        if not 0 <= index < len(self.segments):
            raise IndexError(f"segment index {index} out of range ({len(self.segments)} segments)")
        data = self.model_dump()
        data["segments"][index]["value"] = value
        return PeriodicCoefficient(**data)

    def with_period(self, period: float) -> "PeriodicCoefficient":
        """Copy with a different period (fractions and harmonics are kept)."""
        data = self.model_dump()
        data["period"] = period
        return PeriodicCoefficient(**data)

    def to_spec(self) -> Union[float, Dict[str, Any]]:
        """
        Config form: a bare number when constant, else a table.

        Returns:
            A float or a dict with ``base``, ``harmonics`` and ``segments``
        """
        value = self.constant_value()
        if value is not None:
            return value
        spec: Dict[str, Any] = {"base": self.base}
        if self.harmonics:
            spec["harmonics"] = [h.as_list() for h in self.harmonics]
        if self.segments:
            spec["segments"] = [s.as_list() for s in self.segments]
        return spec

    @classmethod
    def from_spec(
            cls, spec: Any, period: float, strictly_positive: bool = False
    ) -> "PeriodicCoefficient":
        """
        Build a coefficient from its config form.

        Args:
            spec: A number or a table with ``base``, ``harmonics``, ``segments``
            period: Shared scenario period
            strictly_positive: Whether the coefficient must stay above zero

        Returns:
            The coefficient
        """
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls(period=period, base=float(spec), strictly_positive=strictly_positive)
        if isinstance(spec, PeriodicCoefficient):
            return spec.with_period(period) if spec.period != period else spec
        if not isinstance(spec, dict):
            raise ValueError("coefficient must be a number or a table")
        return cls(period=period, strictly_positive=strictly_positive, **spec)


def _snap(segments: List[Segment]) -> List[Segment]:
    """Sort rotated steps and close rounding gaps so they tile [0, 1) exactly."""
    ordered = sorted(segments, key=lambda s: s.start)
    snapped: List[Segment] = []
    cursor = 0.0
    for i, seg in enumerate(ordered):
        end = 1.0 if i == len(ordered) - 1 else seg.end
        snapped.append(Segment(start=cursor, end=end, value=seg.value))
        cursor = end
    return snapped
