"""
Subcommand implementations.

Each command takes a validated scenario and an output path and returns an
exit code; library exceptions are translated to exit codes in ``run_command``.
"""

from enum import IntEnum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import structlog

from osdyn.analysis import reference_logistic
from osdyn.cli.checks import run_checks
from osdyn.cli.scenario import Scenario, load_scenario
from osdyn.cli.sweep import run_sweep
from osdyn.core.config import settings
from osdyn.core.exceptions import (
    BlowupError,
    ConfigError,
    DomainError,
    HalfSaturationMismatch,
    HypothesisError,
    InapplicableError,
    NonpositiveBeta,
    SingularityError,
)
from osdyn.integrate import integrate
from osdyn.models import SimplifiedParams, SimulationSummary, State
from osdyn.periodic import FixedPointOptions, find_orbits
from osdyn.storage import LocalStorageManager
from osdyn.utils.logging import run_context

logger = structlog.get_logger(__name__)


class ExitCode(IntEnum):
    """Process exit codes of the command-line tool."""
    OK = 0
    CONFIG = 1
    SINGULARITY = 2
    INAPPLICABLE = 3
    NO_ORBIT = 4


DEFAULT_OUTPUTS: Dict[str, str] = {
    "simulate": "trajectory.csv",
    "check": "report.txt",
    "orbit": "orbits",
    "sweep": "sweep.csv",
    "reduce": "simplified.toml",
}


def summary_path(out_path: Path) -> Path:
    """``trajectory.csv`` -> ``trajectory.summary.json``."""
    return out_path.with_name(f"{out_path.stem}.summary.json")


def cmd_simulate(scenario: Scenario, out_path: Path, storage: LocalStorageManager) -> int:
    """
    Integrate the scenario over its horizon and write ``t,v,h`` samples.

    The JSON summary is always written; on a singularity it carries the
    crossing time and no CSV is produced.

    Args:
        scenario: Validated scenario
        out_path: CSV file
        storage: Output manager

    Returns:
        0 on success, 2 on a singularity or blow-up
    """
    p = scenario.params()
    t0, t1 = scenario.t0, scenario.t1
    try:
        traj = integrate(p, scenario.initial_state, t0, t1, scenario.integrator)
    except SingularityError as exc:
        logger.error("vegetation reached the reserve", time=exc.time, state=exc.state)
        summary = SimulationSummary(
            status="singularity", t0=t0, t1=t1, crossing_time=exc.time, message=exc.message
        )
        storage.save_json(summary, summary_path(out_path))
        return ExitCode.SINGULARITY
    except BlowupError as exc:
        logger.error("simulation blew up", time=exc.time)
        summary = SimulationSummary(status="blowup", t0=t0, t1=t1, message=exc.message)
        storage.save_json(summary, summary_path(out_path))
        return ExitCode.SINGULARITY

    storage.save_frame(traj.to_frame(scenario.resolved_cadence()), out_path)
    tail = traj.window(t0 + 0.5 * (t1 - t0), t1)
    summary = SimulationSummary(
        status="ok",
        t0=t0,
        t1=t1,
        final_state=traj.final_state,
        sup_v=float(tail[:, 1].max()),
        inf_v=float(tail[:, 1].min()),
        sup_h=float(tail[:, 2].max()),
        inf_h=float(tail[:, 2].min()),
    )
    storage.save_json(summary, summary_path(out_path))
    logger.info(
        "simulation finished",
        steps=traj.steps,
        v=traj.final_state.v,
        h=traj.final_state.h,
        out=str(out_path),
    )
    return ExitCode.OK


def cmd_check(scenario: Scenario, out_path: Path, storage: LocalStorageManager) -> int:
    """
    Write the condition report and the bounds it relied on.

    Returns:
        0 whenever the report was computed, whatever the verdicts
    """
    outcome = run_checks(scenario)
    storage.save_text(outcome.report.to_text() + outcome.bounds.to_text(), out_path)
    logger.info(
        "conditions evaluated",
        permanence_iff=outcome.report.verdict("permanence_iff").passed,
        verdicts=len(outcome.report.verdicts),
        out=str(out_path),
    )
    return ExitCode.OK


def seed_grid(p: SimplifiedParams, n: int) -> List[State]:
    """
    An n x n grid of positive seeds.

    Vegetation spans the band above the largest reserve up to 1.25 times the
    top of v*; herbivores span 0.1 to 1 times the top of v*.
    """
    top = reference_logistic(p).extrema().sup
    floor = p.sup_rho
    span = max(top - floor, 0.1 * top)
    vs = floor + span * np.linspace(0.25, 1.25, n)
    hs = top * np.linspace(0.1, 1.0, n)
    return [State(v=float(v), h=float(h)) for v in vs for h in hs]


def resolve_seeds(scenario: Scenario) -> List[State]:
    size = scenario.orbit.grid_size
    if size is not None:
        return seed_grid(scenario.params(), size)
    return list(scenario.orbit.seeds)


def cmd_orbit(scenario: Scenario, out_path: Path, storage: LocalStorageManager) -> int:
    """
    Search periodic orbits from every seed and write one CSV per distinct orbit.

    ``out_path`` is a directory receiving ``orbit_<i>.csv`` files and
    ``summary.json``.

    Returns:
        0 if any orbit converged, 4 otherwise
    """
    seeds = resolve_seeds(scenario)
    if not seeds:
        raise ConfigError("orbit.seeds is empty", key="orbit.seeds")
    p = scenario.params()
    opts = FixedPointOptions(fp_tol=scenario.orbit.fp_tol, max_iter=scenario.orbit.max_iter)
    orbits = find_orbits(p, seeds, scenario.t0, opts, scenario.orbit.warmup_periods)

    records: List[Dict[str, Any]] = []
    for index, orbit in enumerate(orbits):
        times = np.linspace(
            orbit.t0, orbit.t0 + orbit.period, settings.ORBIT_SAMPLES, endpoint=False
        )
        name = f"orbit_{index}.csv"
        storage.save_frame(orbit.samples.to_frame(times=times), out_path / name)
        records.append({"file": name, **orbit.summary()})
    storage.save_json(
        {"seeds": len(seeds), "found": len(orbits), "orbits": records},
        out_path / "summary.json",
    )
    if not orbits:
        logger.error("no periodic orbit converged", seeds=len(seeds))
        return ExitCode.NO_ORBIT
    logger.info("orbit search finished", seeds=len(seeds), found=len(orbits), out=str(out_path))
    return ExitCode.OK


def cmd_sweep(scenario: Scenario, out_path: Path, storage: LocalStorageManager) -> int:
    """Run the check logic over the scenario's sweep grid."""
    if scenario.sweep is None:
        raise ConfigError("sweep section is required", key="sweep")
    run_sweep(scenario, scenario.sweep, storage.row_writer(out_path), settings.THREADS)
    return ExitCode.OK


def cmd_reduce(scenario: Scenario, out_path: Path, storage: LocalStorageManager) -> int:
    """
    Rewrite a raw-parameter scenario with its reduced coefficients.

    Constants are folded and periodic structure is kept; every other section
    of the scenario is carried over unchanged. A quotient of two time-varying
    coefficients, such as b = r / K when both vary, has no closed form and is
    a configuration error; the other commands accept such raw parameters.
    """
    if scenario.raw_params is None:
        raise ConfigError("raw_params is required", key="raw_params")
    p = scenario.params()
    try:
        coefficients = p.to_spec()
    except DomainError as exc:
        raise ConfigError(
            f"reduced coefficient has no closed form: {exc.message}",
            key=f"raw_params.{exc.context.get('key')}",
        ) from exc
    data = scenario.to_config()
    del data["raw_params"]
    data["simplified_params"] = coefficients
    reduced = Scenario.from_config(data)
    storage.save_text(reduced.to_toml(), out_path)
    logger.info("parameters reduced", out=str(out_path), source=str(scenario.section))
    return ExitCode.OK


COMMANDS: Dict[str, Callable[[Scenario, Path, LocalStorageManager], int]] = {
    "simulate": cmd_simulate,
    "check": cmd_check,
    "orbit": cmd_orbit,
    "sweep": cmd_sweep,
    "reduce": cmd_reduce,
}


def run_command(
        command: str,
        config: Path,
        out: Optional[Path] = None,
        tol: Optional[float] = None,
        scheme: Optional[str] = None,
        periods: Optional[float] = None,
        seed_grid_size: Optional[int] = None,
) -> int:
    """
    Load a scenario, run one command and map failures to exit codes.

    Args:
        command: One of simulate, check, orbit, sweep, reduce
        config: Scenario file
        out: Output file or directory, relative to the working directory;
            defaults to a name under OUTPUT_DIR
        tol: Relative tolerance override
        scheme: Integrator scheme override
        periods: Horizon override in periods
        seed_grid_size: Replace the orbit seeds by an N x N grid

    Returns:
        The process exit code
    """
    storage = LocalStorageManager(settings.OUTPUT_DIR)
    target = Path(out).absolute() if out is not None else Path(DEFAULT_OUTPUTS[command])
    log = logger.bind(command=command, config=str(config))
    try:
        with run_context(command=command, config=str(config)):
            scenario = load_scenario(config).with_overrides(tol, scheme, periods, seed_grid_size)
            return int(COMMANDS[command](scenario, storage.resolve(target), storage))
    except ConfigError as exc:
        log.error("invalid configuration", key=exc.key, error=exc.message)
        return ExitCode.CONFIG
    except (HalfSaturationMismatch, NonpositiveBeta) as exc:
        log.error("reduction assumption violated", error=exc.message, **exc.context)
        return ExitCode.CONFIG
    except (InapplicableError, HypothesisError) as exc:
        log.error("condition is inapplicable", error=exc.message, **exc.context)
        return ExitCode.INAPPLICABLE
    except (SingularityError, BlowupError) as exc:
        log.error("integration failed", error=exc.message, time=exc.time)
        return ExitCode.SINGULARITY
    except DomainError as exc:
        log.error("invalid input", error=exc.message, **exc.context)
        return ExitCode.CONFIG
