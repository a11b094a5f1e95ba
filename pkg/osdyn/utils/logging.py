"""
Structured logging for osdyn runs.

Library modules log with ``structlog.get_logger(__name__)`` and key-value
context. Numerical values arrive as numpy scalars, arrays, complex Floquet
multipliers or pydantic states; ``plain_values`` turns them into JSON-ready
data before rendering.
"""

import logging
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, TextIO, Union

import numpy as np
import structlog
from pydantic import BaseModel
from structlog.stdlib import LoggerFactory
from structlog.types import Processor

from osdyn.core.config import Environment, LogLevel, settings


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def plain_values(logger: Any, name: str, event_dict: Dict[str, Any]) -> Dict[str, Any]:
    """Convert numpy, complex and pydantic values in the event to plain data."""
    return {
        key: value if key == "exc_info" else _plain(value)
        for key, value in event_dict.items()
    }


def add_toolkit_info(logger: Any, name: str, event_dict: Dict[str, Any]) -> Dict[str, Any]:
    """Tag every event with the toolkit name, version and environment."""
    event_dict["service"] = settings.PROJECT_NAME
    event_dict["version"] = settings.VERSION
    event_dict["environment"] = settings.ENVIRONMENT
    return event_dict


def configure_logging(
        log_level: Union[LogLevel, str] = LogLevel.INFO, stream: TextIO = sys.stdout
) -> None:
    """
    Configure structlog for a batch run.

    Console rendering in development, one JSON object per line otherwise.

    Args:
        log_level: Logging level to use
        stream: Destination of the rendered events
    """
    level = log_level.value if isinstance(log_level, LogLevel) else str(log_level)
    logging.basicConfig(format="%(message)s", stream=stream, level=level.upper(), force=True)

    processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        add_toolkit_info,
        plain_values,
        structlog.processors.format_exc_info,
    ]
    if settings.ENVIRONMENT == Environment.DEVELOPMENT:
        processors.append(structlog.dev.ConsoleRenderer())
    else:
        processors.extend([
            structlog.processors.dict_tracebacks,
            structlog.processors.JSONRenderer(),
        ])

    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


@contextmanager
def run_context(**context: Any) -> Iterator[None]:
    """
    Bind ``context`` to every event logged in this thread inside the block,
    library modules included. Worker threads see it only when they run in a
    copy of the caller's context.
    """
    tokens = structlog.contextvars.bind_contextvars(**context)
    try:
        yield
    finally:
        structlog.contextvars.reset_contextvars(**tokens)
