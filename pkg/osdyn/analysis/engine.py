"""
Engine for registering and evaluating printed sign conditions.

Each condition is a function of an evaluation context returning a margin; the
verdict is the strict test ``margin > 0``. Conjunctions combine earlier
verdicts: they pass when every component passes and report the smallest
component margin.
"""

from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence

import structlog

from osdyn.models.reports import ConditionReport, ConditionVerdict

logger = structlog.get_logger(__name__)


class Measurement(NamedTuple):
    """A computed margin with optional error estimate."""

    margin: float
    error: Optional[float] = None
    approximate: bool = False


class ConditionEngine:
    """Engine for evaluating named conditions over a shared context."""

    def __init__(self) -> None:
        """Initialize the engine."""
        self.conditions: Dict[str, Dict[str, Any]] = {}

    def register_condition(
            self,
            name: str,
            measure: Callable[[Dict[str, Any]], Measurement],
            description: str,
            formula: Optional[str] = None,
    ) -> None:
        """
        Register a sign condition.

        Args:
            name: Dotted identifier used in reports
            measure: Function computing the margin from the context
            description: What the condition asserts
            formula: The evaluated expression, echoed in reports
        """
        self.conditions[name] = {
            "measure": measure,
            "description": description,
            "formula": formula,
            "components": None,
        }

    def register_conjunction(
            self, name: str, components: Sequence[str], description: str
    ) -> None:
        """
        Register a verdict that holds when all named components hold.

        Args:
            name: Identifier of the conjunction
            components: Names of previously registered conditions
            description: What the conjunction asserts
        """
        missing = [c for c in components if c not in self.conditions]
        if missing:
            raise KeyError(f"unknown components: {missing}")
        self.conditions[name] = {
            "measure": None,
            "description": description,
            "formula": " and ".join(components),
            "components": list(components),
        }

    def evaluate(self, context: Dict[str, Any]) -> ConditionReport:
        """
        Evaluate every registered condition in registration order.

        Errors raised by a measure (for instance an inapplicable integrand)
        propagate to the caller.

        Args:
            context: Shared inputs passed to each measure; measures may add
                intermediate values to ``context["values"]``

        Returns:
            Report with one verdict per condition
        """
        context.setdefault("values", {})
        verdicts: Dict[str, ConditionVerdict] = {}
        ordered: List[ConditionVerdict] = []
        for name, spec in self.conditions.items():
            if spec["components"] is None:
                result = spec["measure"](context)
                verdict = ConditionVerdict(
                    name=name,
                    description=spec["description"],
                    margin=float(result.margin),
                    passed=bool(result.margin > 0.0),
                    error=result.error,
                    formula=spec["formula"],
                    approximate=result.approximate,
                )
            else:
                parts = [verdicts[c] for c in spec["components"]]
                verdict = ConditionVerdict(
                    name=name,
                    description=spec["description"],
                    margin=min(p.margin for p in parts),
                    passed=all(p.passed for p in parts),
                    formula=spec["formula"],
                    approximate=any(p.approximate for p in parts),
                )
            verdicts[name] = verdict
            ordered.append(verdict)
            logger.debug("condition evaluated", name=name, margin=verdict.margin, passed=verdict.passed)
        return ConditionReport(verdicts=ordered, values=dict(context["values"]))
