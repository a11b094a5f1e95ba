"""
Upper bounds and empirical lower bounds of the long-run dynamics.

M1 follows from the periodic logistic solution; M2, m1 and m2 are existential
constants and are replaced by long-run simulation surrogates, labelled
``empirical`` in every report.
"""

from typing import List, Optional, Tuple

import numpy as np
import structlog

from osdyn.analysis.logistic import reference_logistic
from osdyn.core.config import settings
from osdyn.integrate import integrate
from osdyn.models.params import SimplifiedParams, State
from osdyn.models.reports import BoundsReport
from osdyn.models.trajectory import IntegratorConfig, Trajectory

logger = structlog.get_logger(__name__)

VEGETATION_LEVELS = (0.25, 0.75, 1.5)
HERBIVORE_LEVELS = (0.1, 0.5, 1.0)


def initial_grid(p: SimplifiedParams) -> List[State]:
    """
    Admissible initial states spread around the herbivore-free periodic state.

    v0 = sup rho + sup v* * {0.25, 0.75, 1.5} and h0 = sup v* * {0.1, 0.5, 1.0}.
    """
    top = reference_logistic(p).extrema().sup
    return [
        State(v=p.sup_rho + top * fv, h=top * fh)
        for fv in VEGETATION_LEVELS
        for fh in HERBIVORE_LEVELS
    ]


def _tail_extrema(traj: Trajectory, start: float) -> Tuple[float, float, float, float]:
    samples = traj.window(start)
    v = samples[:, 1]
    h = samples[:, 2]
    return float(v.min()), float(v.max()), float(h.min()), float(h.max())


def estimate_bounds(
        p: SimplifiedParams,
        cfg: Optional[IntegratorConfig] = None,
        periods: Optional[int] = None,
        t0: float = 0.0,
) -> BoundsReport:
    """
    Simulate the initial-state grid and derive all four bounds.

    M1 = sup v* + eps with eps = 1e-3 sup v*. M2 is 1.05 times the largest
    supremum of h, and m1, m2 the smallest infima of v and h, all taken over
    the last half of ``periods`` simulated periods.

    Args:
        p: Reduced parameters
        cfg: Integrator settings
        periods: Simulated periods per initial state (default BOUND_PERIODS)
        t0: Start time

    Returns:
        The bounds report
    """
    periods = periods or settings.BOUND_PERIODS
    omega = p.period
    top = reference_logistic(p).extrema().sup
    epsilon = settings.EPSILON_FRACTION * top
    tail_start = t0 + omega * (periods - periods // 2)

    inf_v, inf_h = np.inf, np.inf
    sup_v, sup_h = 0.0, 0.0
    grid = initial_grid(p)
    for x0 in grid:
        traj = integrate(p, x0, t0, t0 + periods * omega, cfg)
        lo_v, hi_v, lo_h, hi_h = _tail_extrema(traj, tail_start)
        inf_v, sup_v = min(inf_v, lo_v), max(sup_v, hi_v)
        inf_h, sup_h = min(inf_h, lo_h), max(sup_h, hi_h)

    report = BoundsReport(
        M1=top + epsilon,
        M2=settings.BOUND_SAFETY * sup_h,
        m1_emp=inf_v,
        m2_emp=max(inf_h, 0.0),
        epsilon=epsilon,
        sup_vstar=top,
        periods=periods,
        runs=len(grid),
    )
    if sup_v > report.M1 + 1e-6:
        logger.warning("long-run vegetation exceeds M1", sup_v=sup_v, M1=report.M1)
    logger.info(
        "bounds estimated",
        M1=report.M1,
        M2=report.M2,
        m1_emp=report.m1_emp,
        m2_emp=report.m2_emp,
        periods=periods,
    )
    return report


def upper_bounds(
        p: SimplifiedParams, cfg: Optional[IntegratorConfig] = None, periods: Optional[int] = None
) -> Tuple[float, float]:
    """(M1, M2); M2 is the empirical surrogate."""
    report = estimate_bounds(p, cfg, periods)
    return report.M1, report.M2


def lower_bounds(
        p: SimplifiedParams, cfg: Optional[IntegratorConfig] = None, periods: Optional[int] = None
) -> Tuple[float, float]:
    """Empirical (m1, m2) over the last half of the simulated periods."""
    report = estimate_bounds(p, cfg, periods)
    return report.m1_emp, report.m2_emp


def comparison_gap(
        p: SimplifiedParams,
        x0: State,
        t0: float = 0.0,
        periods: int = 10,
        cfg: Optional[IntegratorConfig] = None,
) -> float:
    """
    Largest excess of the full-model vegetation over the logistic trajectory
    started from the same vegetation level.

    Args:
        p: Reduced parameters
        x0: Initial state with h >= 0
        t0: Start time
        periods: Compared span in periods
        cfg: Integrator settings

    Returns:
        max over matched samples of v(t) - U(t); at most round-off when the
        comparison principle holds
    """
    t1 = t0 + periods * p.period
    full = integrate(p, x0, t0, t1, cfg)
    logistic = integrate(p, State(v=x0.v, h=0.0), t0, t1, cfg)
    times = np.linspace(t0, t1, periods * 64 + 1)
    gap = full.interpolate(times)[:, 0] - logistic.interpolate(times)[:, 0]
    return float(gap.max())
