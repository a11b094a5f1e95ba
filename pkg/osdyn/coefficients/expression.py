"""
Lazy arithmetic on coefficients and folding back to closed form.

Expressions are evaluated pointwise on demand; their averages and extrema go
through the quadrature and sampling paths of ``Coefficient``. Expressions whose
operands are all time-independent collapse to an exact ``Constant``.
"""

import cmath
import math
import operator
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from osdyn.coefficients.base import Coefficient
from osdyn.coefficients.periodic import Harmonic, PeriodicCoefficient, Segment
from osdyn.core.exceptions import DomainError

_PERIOD_RTOL = 1e-12

_BINARY: Dict[str, Callable[[Any, Any], Any]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}

_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


class Constant(Coefficient):
    """A time-independent coefficient without a period."""

    def __init__(self, value: float) -> None:
        self.value = float(value)
        self.period = None
        self._memo: Dict[str, Any] = {}

    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        return np.full(np.shape(t), self.value)

    def evaluate_scalar(self, t: float, side: int = 1) -> float:
        return self.value

    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def __repr__(self) -> str:
        return f"Constant({self.value!r})"


def constant_value(c: Coefficient) -> Optional[float]:
    """The value of a time-independent coefficient, else None."""
    if isinstance(c, Constant):
        return c.value
    if isinstance(c, PeriodicCoefficient):
        return c.constant_value()
    return None


def _as_coefficient(x: Any) -> Coefficient:
    if isinstance(x, Coefficient):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Constant(float(x))
    raise TypeError(f"cannot combine {type(x).__name__} with a coefficient")


def common_period(operands: Sequence[Coefficient]) -> Optional[float]:
    """
    The period shared by every periodic operand.

    Args:
        operands: Coefficients to combine

    Returns:
        The shared period, or None when every operand is time-independent

    Raises:
        DomainError: If two operands have different periods
    """
    period: Optional[float] = None
    for c in operands:
        if c.period is None or constant_value(c) is not None:
            continue
        if period is None:
            period = c.period
        elif abs(c.period - period) > _PERIOD_RTOL * max(1.0, period):
            raise DomainError(
                f"operands have different periods ({period} and {c.period})",
                periods=[period, c.period],
            )
    return period


class CoefficientExpr(Coefficient):
    """A lazily evaluated arithmetic node over coefficients."""

    def __init__(self, op: str, operands: Sequence[Coefficient], period: Optional[float]) -> None:
        self.op = op
        self.operands = tuple(operands)
        self.period = period
        self._memo: Dict[str, Any] = {}

    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        values = [c.evaluate(t, side) for c in self.operands]
        if self.op == "neg":
            return -values[0]
        return _BINARY[self.op](values[0], values[1])

    def evaluate_scalar(self, t: float, side: int = 1) -> float:
        values = [c.evaluate_scalar(t, side) for c in self.operands]
        if self.op == "neg":
            return -values[0]
        return _BINARY[self.op](values[0], values[1])

    def breakpoints(self) -> Tuple[float, ...]:
        points = set()
        for c in self.operands:
            if c.period is not None:
                points.update(c.breakpoints())
        return tuple(sorted(points))

    def __repr__(self) -> str:
        if self.op == "neg":
            return f"-({self.operands[0]!r})"
        return f"({self.operands[0]!r} {_SYMBOL[self.op]} {self.operands[1]!r})"


def combine(op: str, *operands: Any) -> Coefficient:
    """
    Build an arithmetic expression over coefficients and numbers.

    Args:
        op: One of ``add``, ``sub``, ``mul``, ``div``, ``neg``
        *operands: Coefficients or numbers (one for ``neg``, two otherwise)

    Returns:
        A ``Constant`` when every operand is time-independent, else a lazy
        ``CoefficientExpr``

    Raises:
        DomainError: On mismatched periods or a denominator whose infimum is
            not positive
    """
    items = [_as_coefficient(x) for x in operands]
    expected = 1 if op == "neg" else 2
    if (op not in _BINARY and op != "neg") or len(items) != expected:
        raise ValueError(f"unsupported expression {op} with {len(items)} operands")
    period = common_period(items)

    if op == "div":
        lowest = items[1].extrema().inf
        if lowest <= 0.0:
            raise DomainError(
                f"denominator infimum {lowest} is not positive", inf=lowest
            )

    values = [constant_value(c) for c in items]
    if all(v is not None for v in values):
        if op == "neg":
            return Constant(-values[0])
        return Constant(_BINARY[op](values[0], values[1]))
    return CoefficientExpr(op, items, period)


class Shifted(Coefficient):
    """The coefficient ``t -> inner(t + offset)``."""

    def __init__(self, inner: Coefficient, offset: float) -> None:
        self.inner = inner
        self.offset = float(offset)
        self.period = inner.period
        self._memo: Dict[str, Any] = {}

    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        return self.inner.evaluate(np.asarray(t, dtype=float) + self.offset, side)

    def evaluate_scalar(self, t: float, side: int = 1) -> float:
        return self.inner.evaluate_scalar(t + self.offset, side)

    def breakpoints(self) -> Tuple[float, ...]:
        assert self.period is not None
        shift = self.offset / self.period
        return tuple(sorted({(b - shift) % 1.0 for b in self.inner.breakpoints()}))


class SampledCoefficient(Coefficient):
    """
    A periodic coefficient backed by an arbitrary vectorized function.

    Used to compose coefficients with numerically computed periodic signals
    (the periodic logistic solution, one period of a trajectory).
    """

    def __init__(
            self,
            func: Callable[[np.ndarray, int], np.ndarray],
            period: float,
            breakpoints: Sequence[float] = (),
            name: str = "sampled",
    ) -> None:
        self.func = func
        self.period = period
        self._breakpoints = tuple(sorted({float(b) % 1.0 for b in breakpoints}))
        self.name = name
        self._memo: Dict[str, Any] = {}

    def evaluate(self, t: Any, side: int = 1) -> np.ndarray:
        return np.asarray(self.func(np.asarray(t, dtype=float), side), dtype=float)

    def breakpoints(self) -> Tuple[float, ...]:
        return self._breakpoints

    def __repr__(self) -> str:
        return self.name


class LinearForm:
    """
    ``base + Im(sum z_k exp(i k x)) + step(x)`` over one period.

    ``harmonics`` maps frequency k to the complex weight ``amplitude*exp(i*phase)``;
    ``steps`` tiles [0, 1) with constant values.
    """

    def __init__(
            self,
            base: float,
            harmonics: Dict[int, complex],
            steps: List[Tuple[float, float, float]],
    ) -> None:
        self.base = base
        self.harmonics = harmonics
        self.steps = steps or [(0.0, 1.0, 0.0)]

    @classmethod
    def of(cls, c: PeriodicCoefficient) -> "LinearForm":
        harmonics: Dict[int, complex] = {}
        for h in c.harmonics:
            harmonics[h.k] = harmonics.get(h.k, 0j) + cmath.rect(h.amplitude, h.phase)
        steps = [(s.start, s.end, s.value) for s in c.segments]
        return cls(c.base, harmonics, steps)

    @property
    def is_steps(self) -> bool:
        return all(z == 0j for z in self.harmonics.values())

    def scalar(self) -> Optional[float]:
        if not self.is_steps or len({v for _, _, v in self.steps}) != 1:
            return None
        return self.base + self.steps[0][2]

    def _merged(
            self, other: "LinearForm", fn: Callable[[float, float], float]
    ) -> List[Tuple[float, float, float]]:
        cuts = sorted({0.0, 1.0} | {s for s, _, _ in self.steps} | {s for s, _, _ in other.steps})
        out = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            out.append((lo, hi, fn(self._step_at(mid), other._step_at(mid))))
        return out

    def _step_at(self, frac: float) -> float:
        for lo, hi, value in self.steps:
            if lo <= frac < hi:
                return value
        return self.steps[-1][2]

    def scale(self, k: float) -> "LinearForm":
        return LinearForm(
            self.base * k,
            {f: z * k for f, z in self.harmonics.items()},
            [(lo, hi, v * k) for lo, hi, v in self.steps],
        )

    def add(self, other: "LinearForm", sign: float = 1.0) -> "LinearForm":
        harmonics = dict(self.harmonics)
        for f, z in other.harmonics.items():
            harmonics[f] = harmonics.get(f, 0j) + sign * z
        return LinearForm(
            self.base + sign * other.base,
            harmonics,
            self._merged(other, lambda x, y: x + sign * y),
        )

    def pointwise(self, other: "LinearForm", fn: Callable[[float, float], float]) -> "LinearForm":
        """Pointwise product or quotient of two step functions."""
        merged = []
        cuts = self._merged(other, lambda x, y: 0.0)
        for lo, hi, _ in cuts:
            mid = 0.5 * (lo + hi)
            merged.append(
                (lo, hi, fn(self.base + self._step_at(mid), other.base + other._step_at(mid)))
            )
        return LinearForm(0.0, {}, merged)

    def to_coefficient(self, period: float) -> PeriodicCoefficient:
        steps: List[Tuple[float, float, float]] = []
        for lo, hi, value in self.steps:
            if steps and steps[-1][2] == value:
                steps[-1] = (steps[-1][0], hi, value)
            else:
                steps.append((lo, hi, value))
        base = self.base
        lowest = min(v for _, _, v in steps)
        base += lowest
        segments: Tuple[Segment, ...] = ()
        if len(steps) > 1:
            segments = tuple(
                Segment(start=lo, end=hi, value=v - lowest) for lo, hi, v in steps
            )
        harmonics = tuple(
            Harmonic(amplitude=abs(z), k=f, phase=cmath.phase(z))
            for f, z in sorted(self.harmonics.items())
            if z != 0j
        )
        return PeriodicCoefficient(
            period=period, base=base, harmonics=harmonics, segments=segments
        )


def _linear_form(c: Coefficient, period: float) -> Optional[LinearForm]:
    value = constant_value(c)
    if value is not None:
        return LinearForm(value, {}, [])
    if isinstance(c, PeriodicCoefficient):
        return LinearForm.of(c) if math.isclose(c.period, period) else None
    if not isinstance(c, CoefficientExpr):
        return None
    forms = [_linear_form(x, period) for x in c.operands]
    if any(f is None for f in forms):
        return None
    if c.op == "neg":
        return forms[0].scale(-1.0)
    left, right = forms
    if c.op == "add":
        return left.add(right)
    if c.op == "sub":
        return left.add(right, -1.0)
    k_left = left.scalar()
    k_right = right.scalar()
    if c.op == "mul":
        if k_right is not None:
            return left.scale(k_right)
        if k_left is not None:
            return right.scale(k_left)
        if left.is_steps and right.is_steps:
            return left.pointwise(right, operator.mul)
        return None
    if k_right is not None:
        return left.scale(1.0 / k_right)
    if left.is_steps and right.is_steps:
        return left.pointwise(right, operator.truediv)
    return None


def fold(c: Coefficient, period: float) -> Optional[PeriodicCoefficient]:
    """
    Rewrite an expression as a closed-form coefficient when possible.

    Sums, differences, scalings and products of step functions all stay in
    the base + harmonics + steps family. Anything else (e.g. the product of
    two sine terms) returns None and must stay a lazy expression.

    Args:
        c: Coefficient or expression
        period: Period of the result

    Returns:
        The folded coefficient or None
    """
    if isinstance(c, PeriodicCoefficient) and c.period == period:
        return c
    form = _linear_form(c, period)
    if form is None:
        return None
    try:
        return form.to_coefficient(period)
    except (DomainError, ValueError):
        return None
