"""
Exception hierarchy for the osdyn toolkit.

Library code raises these; only the command layer maps them to exit codes.
"""

from typing import Any, Dict, List, Optional


class OsdynError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, **context: Any) -> None:
        """
        Initialize the error.

        Args:
            message: Human readable description
            **context: Structured details attached for logging and reports
        """
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context


class ConfigError(OsdynError):
    """A scenario or sweep configuration is invalid."""

    def __init__(self, message: str, key: Optional[str] = None, **context: Any) -> None:
        super().__init__(message, key=key, **context)
        self.key = key


class DomainError(OsdynError):
    """An operation was applied outside its mathematical domain."""


class HypothesisError(OsdynError):
    """A hypothesis required by a construction does not hold."""


class InapplicableError(OsdynError):
    """A condition cannot be evaluated because its integrand is singular."""


class HalfSaturationMismatch(OsdynError):
    """The consumption and conversion half-saturation levels differ."""


class NonpositiveBeta(OsdynError):
    """The reduced half-saturation offset b_i - v_u is not strictly positive."""


class SingularityError(OsdynError):
    """Vegetation reached its ungrazable reserve while herbivores are present."""

    def __init__(
            self,
            message: str,
            time: float,
            state: Optional[List[float]] = None,
            **context: Any,
    ) -> None:
        super().__init__(message, time=time, state=state, **context)
        self.time = time
        self.state = state


class BlowupError(OsdynError):
    """The integrated state left the representable range."""

    def __init__(self, message: str, time: float, **context: Any) -> None:
        super().__init__(message, time=time, **context)
        self.time = time


class NoConvergence(OsdynError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(
            self,
            message: str,
            residual_history: List[float],
            iterate_history: List[List[float]],
            best: Any = None,
            **context: Any,
    ) -> None:
        super().__init__(message, **context)
        self.residual_history = residual_history
        self.iterate_history = iterate_history
        self.best = best
