"""
The period map and its fixed points.

The map sends a state at t0 to the state one period later. Fixed points are
located by damped Newton iteration with a forward-difference Jacobian, and by
direct iteration when Newton cannot make progress.
"""

from typing import Callable, List, Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from osdyn.core.config import settings
from osdyn.core.exceptions import NoConvergence, SingularityError
from osdyn.integrate import flow_array, flow_map, integrate
from osdyn.models.params import SimplifiedParams, State
from osdyn.models.reports import PoincareResult
from osdyn.models.trajectory import IntegratorConfig

logger = structlog.get_logger(__name__)

_LINE_SEARCH_HALVINGS = 30
_NEGATIVE_H_SNAP = 1e-12


class FixedPointOptions(BaseModel):
    """Settings of the fixed-point search."""

    model_config = ConfigDict(frozen=True)

    fp_tol: float = Field(default=settings.FP_TOL, gt=0.0, description="Residual tolerance")
    max_iter: int = Field(default=settings.FP_MAX_ITER, ge=0, description="Newton iterations")
    fd_step: float = Field(default=settings.FD_STEP, gt=0.0, description="Relative FD step")
    fallback_iter: int = Field(
        default=settings.FP_FALLBACK_ITER, ge=0, description="Direct iterations after Newton stalls"
    )
    integrator: Optional[IntegratorConfig] = Field(
        default=None, description="Integrator used for the period map"
    )


def shooting_config(p: SimplifiedParams, cfg: Optional[IntegratorConfig] = None) -> IntegratorConfig:
    """
    Integrator settings for period-map evaluations.

    Fixed-step RK4 keeps the map smooth in the initial state, which finite
    difference Jacobians need; the default uses SHOOTING_STEPS steps per period.
    """
    if cfg is not None:
        return cfg
    return IntegratorConfig(scheme="rk4", max_step=p.period / settings.SHOOTING_STEPS)


def poincare(
        p: SimplifiedParams, x0: State, t0: float = 0.0, cfg: Optional[IntegratorConfig] = None
) -> State:
    """
    State one period after x0.

    Args:
        p: Reduced parameters
        x0: Admissible state at t0
        t0: Section time
        cfg: Integrator settings (default: ``shooting_config``)

    Returns:
        The image of x0 under the period map
    """
    return flow_map(p, x0, t0, p.period, shooting_config(p, cfg))


def _admissible(p: SimplifiedParams, x: np.ndarray, t0: float) -> bool:
    v, h = float(x[0]), float(x[1])
    if not (np.isfinite(v) and np.isfinite(h)) or v <= 0.0 or h < 0.0:
        return False
    return h == 0.0 or v - p.rho.evaluate_scalar(t0) > p.singularity_margin


def _snap(x: np.ndarray) -> np.ndarray:
    if -_NEGATIVE_H_SNAP < x[1] < 0.0:
        return np.array([x[0], 0.0])
    return x


def _jacobian(
        residual: Callable[[np.ndarray], np.ndarray],
        x: np.ndarray,
        fx: np.ndarray,
        fd_step: float,
) -> np.ndarray:
    delta = fd_step * max(float(np.max(np.abs(x))), 1e-8)
    jac = np.empty((2, 2))
    for j in range(2):
        probe = x.copy()
        probe[j] += delta
        jac[:, j] = (residual(probe) - fx) / delta
    return jac


def _verify(p: SimplifiedParams, x: np.ndarray, t0: float, cfg: IntegratorConfig) -> float:
    tight = cfg.tightened(period=p.period)
    try:
        image = flow_array(p, x, t0, p.period, tight)
    except SingularityError:
        return float("inf")
    return float(np.max(np.abs(image - x)))


def find_fixed_point(
        p: SimplifiedParams,
        guess: State,
        t0: float = 0.0,
        opts: Optional[FixedPointOptions] = None,
) -> PoincareResult:
    """
    Solve sigma(x) = x near ``guess``.

    Newton steps are halved until the residual decreases and the trial stays
    admissible. When the Jacobian is singular or the line search fails, the
    search switches to direct iteration x <- sigma(x). A converged point is
    mapped once more with tightened integrator settings and must stay within
    FP_VERIFY_FACTOR * fp_tol of itself.

    Args:
        p: Reduced parameters
        guess: Admissible starting state
        t0: Section time
        opts: Search settings

    Returns:
        The converged result

    Raises:
        NoConvergence: If neither iteration reaches fp_tol or the converged
            point does not reproduce; ``best`` holds the best PoincareResult found
        SingularityError: If the guess or a direct iterate is not admissible
    """
    opts = opts or FixedPointOptions()
    cfg = shooting_config(p, opts.integrator)

    def residual(x: np.ndarray) -> np.ndarray:
        return flow_array(p, x, t0, p.period, cfg) - x

    x = guess.as_array()
    fx = residual(x)
    r = float(np.max(np.abs(fx)))
    residuals: List[float] = [r]
    iterates: List[List[float]] = [x.tolist()]
    best_x, best_r = x, r
    iterations = 0
    method = "newton"

    while r > opts.fp_tol and iterations < opts.max_iter:
        iterations += 1
        jac = _jacobian(residual, x, fx, opts.fd_step)
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            logger.debug("singular Jacobian", iteration=iterations)
            break
        if not np.all(np.isfinite(dx)):
            break
        step = 1.0
        accepted = False
        for _ in range(_LINE_SEARCH_HALVINGS):
            trial = _snap(x + step * dx)
            if _admissible(p, trial, t0):
                try:
                    f_trial = residual(trial)
                except SingularityError:
                    f_trial = None
                if f_trial is not None:
                    r_trial = float(np.max(np.abs(f_trial)))
                    if r_trial < r:
                        x, fx, r = trial, f_trial, r_trial
                        accepted = True
                        break
            step *= 0.5
        if not accepted:
            logger.debug("line search failed", iteration=iterations, residual=r)
            break
        residuals.append(r)
        iterates.append(x.tolist())
        if r < best_r:
            best_x, best_r = x, r

    if r > opts.fp_tol:
        method = "direct"
        x = best_x
        for _ in range(opts.fallback_iter):
            image = _snap(flow_array(p, x, t0, p.period, cfg))
            r = float(np.max(np.abs(image - x)))
            x = image
            iterations += 1
            residuals.append(r)
            iterates.append(x.tolist())
            if r < best_r:
                best_x, best_r = x, r
            if r <= opts.fp_tol:
                break

    result = PoincareResult(
        fixed_state=State.from_array(best_x),
        residual=best_r,
        iterations=iterations,
        converged=best_r <= opts.fp_tol,
        method=method,
        residual_history=residuals,
    )
    if not result.converged:
        raise NoConvergence(
            f"fixed-point search stopped at residual {best_r} after {iterations} iterations",
            residual_history=residuals,
            iterate_history=iterates,
            best=result,
        )

    verified = _verify(p, best_x, t0, cfg)
    result = result.model_copy(update={"verified_residual": verified})
    if verified > settings.FP_VERIFY_FACTOR * opts.fp_tol:
        raise NoConvergence(
            f"fixed point does not reproduce at tightened settings (residual {verified})",
            residual_history=residuals,
            iterate_history=iterates,
            best=result,
        )
    logger.debug(
        "fixed point converged",
        residual=best_r,
        verified_residual=verified,
        iterations=iterations,
        method=method,
        v=result.fixed_state.v,
        h=result.fixed_state.h,
    )
    return result


def seed_from_simulation(
        p: SimplifiedParams,
        x0: State,
        t0: float = 0.0,
        periods: int = 20,
        window: int = 1,
        cfg: Optional[IntegratorConfig] = None,
) -> State:
    """
    Long-run seed: mean of the states at t = t0 (mod period) over the last
    ``window`` of ``periods`` simulated periods.

    Args:
        p: Reduced parameters
        x0: Admissible initial state
        t0: Section time
        periods: Simulated periods
        window: Number of section crossings averaged
        cfg: Integrator settings (default: ``shooting_config``)

    Returns:
        The averaged state
    """
    if periods <= 0:
        return x0
    traj = integrate(p, x0, t0, t0 + periods * p.period, shooting_config(p, cfg))
    window = max(1, min(window, periods))
    crossings = t0 + p.period * np.arange(periods - window + 1, periods + 1)
    states = traj.interpolate(np.minimum(crossings, traj.t1))
    return State.from_array(states.mean(axis=0))
