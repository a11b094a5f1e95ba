"""
Parameter sweeps: the check logic evaluated over a grid of knob values.
"""

import contextvars
import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Sequence, Tuple

import structlog

from osdyn.cli.checks import run_checks
from osdyn.cli.scenario import Scenario, SweepSpec
from osdyn.core.exceptions import (
    ConfigError,
    DomainError,
    HalfSaturationMismatch,
    HypothesisError,
    InapplicableError,
    NonpositiveBeta,
)
from osdyn.storage import CsvRowWriter

logger = structlog.get_logger(__name__)

# Verdicts reported per grid point, in report order.
SWEEP_VERDICTS: Tuple[str, ...] = (
    "vegetation.b_average",
    "vegetation.net_growth_average",
    "vegetation_persistence",
    "herbivore.persistence_average",
    "permanence_sufficient",
    "permanence_iff",
    "threshold.m2_form",
    "threshold.iff_form",
    "threshold.proof_form",
    "gas.inf_vegetation",
    "gas.inf_herbivore",
    "gas.vegetation_average",
    "gas.herbivore_average",
    "gas",
    "periodic.herbivore_average",
    "periodic.ratio_average",
    "periodic.vegetation_average",
    "periodic_existence",
)
BOUND_COLUMNS: Tuple[str, ...] = (
    "bounds.M1",
    "bounds.M2",
    "bounds.m1_emp",
    "bounds.m2_emp",
    "bounds.epsilon",
)


def sweep_columns(spec: SweepSpec) -> List[str]:
    columns = [knob.path for knob in spec.knobs] + ["status", "final_h"]
    for name in SWEEP_VERDICTS:
        columns.extend([name, f"{name}.margin"])
    columns.extend(BOUND_COLUMNS)
    columns.append("message")
    return columns


def grid_points(spec: SweepSpec) -> List[Tuple[float, ...]]:
    """Knob values in row-major order (the last knob varies fastest)."""
    return list(itertools.product(*(knob.values() for knob in spec.knobs)))


def apply_point(scenario: Scenario, spec: SweepSpec, point: Sequence[float]) -> Scenario:
    for knob, value in zip(spec.knobs, point):
        scenario = scenario.with_knob(knob.path, value)
    return scenario


def evaluate_point(scenario: Scenario, spec: SweepSpec, point: Sequence[float]) -> Dict[str, Any]:
    """
    One sweep row.

    Points whose values leave the parameter domain or make a checker
    inapplicable produce a row with an explanatory status instead of failing
    the sweep.
    """
    row: Dict[str, Any] = {knob.path: value for knob, value in zip(spec.knobs, point)}
    try:
        outcome = run_checks(apply_point(scenario, spec, point))
    except (ConfigError, DomainError, HalfSaturationMismatch, NonpositiveBeta) as exc:
        row.update(status="invalid", message=exc.message)
        return row
    except (InapplicableError, HypothesisError) as exc:
        row.update(status="inapplicable", message=exc.message)
        return row
    row.update(status="ok", final_h=outcome.final_state.h)
    row.update(outcome.report.to_row())
    row.update(outcome.bounds.to_row())
    return row


def run_sweep(scenario: Scenario, spec: SweepSpec, writer: CsvRowWriter, threads: int) -> int:
    """
    Evaluate every grid point and append rows in grid order as they complete.

    Args:
        scenario: Base scenario
        spec: Knobs and ranges
        writer: Incremental CSV writer
        threads: Worker threads

    Returns:
        Number of rows written

    Raises:
        ConfigError: If a knob path names no coefficient or segment
    """
    for knob in spec.knobs:
        scenario.check_knob(knob.path)
    writer.columns = sweep_columns(spec)
    points = grid_points(spec)
    logger.info("sweep started", points=len(points), threads=threads)
    context = contextvars.copy_context()
    with ThreadPoolExecutor(max_workers=threads) as executor:
        rows = executor.map(
            lambda point: context.copy().run(evaluate_point, scenario, spec, point), points
        )
        for row in rows:
            writer.write(row)
            logger.debug("sweep row written", row=writer.rows, status=row["status"])
    logger.info("sweep finished", rows=writer.rows, path=str(writer.path))
    return writer.rows
