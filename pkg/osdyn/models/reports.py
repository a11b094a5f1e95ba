"""
Result records produced by the condition checkers, the orbit finder and the
simulation command.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from osdyn.models.params import State
from osdyn.models.trajectory import Trajectory

Stability = Literal["attracting", "repelling", "saddle", "marginal"]


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ConditionVerdict(BaseModel):
    """Sign test of one printed condition."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Dotted identifier of the condition")
    description: str = Field(..., description="What the condition asserts")
    margin: float = Field(..., description="Computed value whose sign decides the verdict")
    passed: bool = Field(..., description="Whether margin > 0 (strict)")
    error: Optional[float] = Field(None, description="Quadrature error estimate of the margin")
    formula: Optional[str] = Field(None, description="The expression that was evaluated")
    approximate: bool = Field(
        False, description="Whether the margin relies on sampled or empirical inputs"
    )


class ConditionReport(BaseModel):
    """Verdicts of one or more checkers together with the quantities behind them."""

    verdicts: List[ConditionVerdict] = Field(
        default_factory=list, description="Verdicts in evaluation order"
    )
    values: Dict[str, float] = Field(
        default_factory=dict, description="Named scalar inputs and intermediate results"
    )
    metadata: Dict[str, Any] = Field(
        default_factory=dict, description="Additional information about the evaluation"
    )

    @property
    def passed(self) -> bool:
        """True when every verdict passed."""
        return all(v.passed for v in self.verdicts)

    def verdict(self, name: str) -> ConditionVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def margin(self, name: str) -> float:
        return self.verdict(name).margin

    def names(self) -> List[str]:
        return [v.name for v in self.verdicts]

    def merge(self, *others: "ConditionReport") -> "ConditionReport":
        """Concatenate verdicts and values of several reports."""
        verdicts = list(self.verdicts)
        values = dict(self.values)
        metadata = dict(self.metadata)
        for other in others:
            verdicts.extend(other.verdicts)
            values.update(other.values)
            metadata.update(other.metadata)
        return ConditionReport(verdicts=verdicts, values=values, metadata=metadata)

    def to_text(self) -> str:
        """
        Flat ``name = value`` lines.

        Returns:
            One verdict line plus margin, error and formula lines per verdict,
            then every named value
        """
        lines = []
        for v in self.verdicts:
            lines.append(f"{v.name} = {_fmt(v.passed)}")
            lines.append(f"{v.name}.margin = {_fmt(v.margin)}")
            if v.error is not None:
                lines.append(f"{v.name}.error = {_fmt(v.error)}")
            if v.approximate:
                lines.append(f"{v.name}.approximate = true")
            if v.formula:
                lines.append(f"{v.name}.formula = {v.formula}")
        for key, value in self.values.items():
            lines.append(f"{key} = {_fmt(value)}")
        return "\n".join(lines) + "\n"

    def to_row(self) -> Dict[str, Any]:
        """Flat mapping used for one sweep CSV row."""
        row: Dict[str, Any] = {}
        for v in self.verdicts:
            row[v.name] = v.passed
            row[f"{v.name}.margin"] = v.margin
        row.update(self.values)
        return row


class BoundsReport(BaseModel):
    """Upper bounds and empirical lower bounds of the long-run dynamics."""

    model_config = ConfigDict(frozen=True)

    M1: float = Field(..., description="Vegetation upper bound, sup v* + epsilon")
    M2: float = Field(..., description="Herbivore upper bound (empirical surrogate)")
    m1_emp: float = Field(..., description="Empirical long-run infimum of v")
    m2_emp: float = Field(..., description="Empirical long-run infimum of h")
    epsilon: float = Field(..., description="Margin added to sup v*")
    sup_vstar: float = Field(..., description="Supremum of the periodic logistic solution")
    periods: int = Field(..., description="Simulated periods per initial state")
    runs: int = Field(..., description="Number of initial states simulated")
    label: str = Field("empirical", description="Provenance of M2, m1 and m2")

    def to_text(self) -> str:
        lines = [f"bounds.label = {self.label}"]
        for key in ("M1", "M2", "m1_emp", "m2_emp", "epsilon", "sup_vstar"):
            lines.append(f"bounds.{key} = {_fmt(getattr(self, key))}")
        lines.append(f"bounds.periods = {self.periods}")
        lines.append(f"bounds.runs = {self.runs}")
        return "\n".join(lines) + "\n"

    def to_row(self) -> Dict[str, float]:
        return {
            f"bounds.{key}": getattr(self, key)
            for key in ("M1", "M2", "m1_emp", "m2_emp", "epsilon")
        }


class PoincareResult(BaseModel):
    """Outcome of a fixed-point search on the period map."""

    model_config = ConfigDict(frozen=True)

    fixed_state: State = Field(..., description="Best iterate found")
    residual: float = Field(..., description="Max-norm of sigma(x) - x at the best iterate")
    iterations: int = Field(..., description="Newton or direct iterations performed")
    converged: bool = Field(..., description="Whether residual <= fp_tol")
    method: Literal["newton", "direct"] = Field("newton", description="Iteration that finished")
    residual_history: List[float] = Field(
        default_factory=list, description="Residual after each iteration"
    )
    verified_residual: Optional[float] = Field(
        None, description="Residual of one fresh period map at tightened settings"
    )


class PeriodicOrbit(BaseModel):
    """A periodic solution located as a fixed point of the period map."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    initial_state: State = Field(..., description="State at t0 on the orbit")
    t0: float = Field(..., description="Section time")
    period: float = Field(..., description="Period omega")
    residual: float = Field(..., description="Fixed-point residual")
    samples: Trajectory = Field(..., description="One period of the orbit")
    floquet: Tuple[complex, complex] = Field(..., description="Floquet multipliers")
    stability: Stability = Field(..., description="Classification by multiplier moduli")
    boundary: bool = Field(False, description="Whether the orbit is herbivore-free")

    def summary(self) -> Dict[str, Any]:
        """JSON-ready record of the orbit."""
        return {
            "t0": self.t0,
            "period": self.period,
            "v0": self.initial_state.v,
            "h0": self.initial_state.h,
            "residual": self.residual,
            "floquet": [[m.real, m.imag] for m in self.floquet],
            "moduli": [abs(m) for m in self.floquet],
            "stability": self.stability,
            "boundary": self.boundary,
        }


class SimulationSummary(BaseModel):
    """Run summary written next to a simulated trajectory."""

    status: Literal["ok", "singularity", "blowup"] = Field(..., description="Run outcome")
    t0: float = Field(..., description="Start time")
    t1: float = Field(..., description="Requested end time")
    final_state: Optional[State] = Field(None, description="State at t1 when the run finished")
    sup_v: Optional[float] = Field(None, description="sup of v over the final half")
    inf_v: Optional[float] = Field(None, description="inf of v over the final half")
    sup_h: Optional[float] = Field(None, description="sup of h over the final half")
    inf_h: Optional[float] = Field(None, description="inf of h over the final half")
    crossing_time: Optional[float] = Field(None, description="Where v met the reserve")
    message: Optional[str] = Field(None, description="Error message for failed runs")
