"""
Linear stability of periodic orbits and the multi-seed orbit search.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from osdyn.analysis.conditions import average_of, vstar_gap
from osdyn.analysis.logistic import reference_logistic
from osdyn.core.config import settings
from osdyn.core.exceptions import NoConvergence, SingularityError
from osdyn.integrate import flow_array, integrate
from osdyn.models.params import SimplifiedParams, State
from osdyn.models.reports import PeriodicOrbit, Stability
from osdyn.models.trajectory import IntegratorConfig
from osdyn.periodic.poincare import (
    FixedPointOptions,
    find_fixed_point,
    seed_from_simulation,
    shooting_config,
)

logger = structlog.get_logger(__name__)


def monodromy(
        p: SimplifiedParams,
        state: State,
        t0: float = 0.0,
        cfg: Optional[IntegratorConfig] = None,
        fd_step: Optional[float] = None,
) -> Tuple[np.ndarray, Tuple[complex, complex]]:
    """
    Linearization of the period map by central differences.

    Probes may push h slightly below zero on the herbivore-free boundary;
    the flow is still well defined there.

    Args:
        p: Reduced parameters
        state: Fixed point of the period map at t0
        t0: Section time
        cfg: Integrator settings (default: ``shooting_config``)
        fd_step: Relative difference step (default FD_STEP)

    Returns:
        The 2x2 matrix and its eigenvalues (the Floquet multipliers)
    """
    cfg = shooting_config(p, cfg)
    fd_step = fd_step or settings.FD_STEP
    x = state.as_array()
    delta = fd_step * max(float(np.max(np.abs(x))), 1e-8)
    matrix = np.empty((2, 2))
    for j in range(2):
        plus = x.copy()
        minus = x.copy()
        plus[j] += delta
        minus[j] -= delta
        image_plus = flow_array(p, plus, t0, p.period, cfg)
        image_minus = flow_array(p, minus, t0, p.period, cfg)
        matrix[:, j] = (image_plus - image_minus) / (2.0 * delta)
    eigen = np.linalg.eigvals(matrix)
    multipliers = (complex(eigen[0]), complex(eigen[1]))
    return matrix, multipliers


def classify(multipliers: Sequence[complex], band: Optional[float] = None) -> Stability:
    """
    Stability label from multiplier moduli.

    Args:
        multipliers: Floquet multipliers
        band: Width around 1 treated as neutral (default MARGINAL_BAND)

    Returns:
        ``attracting`` if all moduli < 1 - band, ``repelling`` if all > 1 + band,
        ``saddle`` if there is one of each, ``marginal`` otherwise
    """
    band = settings.MARGINAL_BAND if band is None else band
    moduli = [abs(m) for m in multipliers]
    inside = sum(1 for m in moduli if m < 1.0 - band)
    outside = sum(1 for m in moduli if m > 1.0 + band)
    if inside == len(moduli):
        return "attracting"
    if outside == len(moduli):
        return "repelling"
    if inside and outside and inside + outside == len(moduli):
        return "saddle"
    return "marginal"


def boundary_multipliers(p: SimplifiedParams) -> Tuple[float, float]:
    """
    Multipliers of the herbivore-free periodic orbit (v*, 0) in closed form.

    The variational equation is triangular there, so the multipliers are
    exp(int (a - 2 b v*)) along the vegetation axis and
    exp(int percapita_h(t, v*)) in the herbivore direction, integrated over one
    period.

    Returns:
        (vegetation multiplier, herbivore multiplier)

    Raises:
        InapplicableError: If v* does not stay above the reserve
    """
    vs, gap = vstar_gap(p)
    omega = p.period
    logistic = average_of(p.a - 2.0 * p.b * vs).margin
    percapita = (
        p.alpha * gap / (p.beta + vs) - p.R - p.gamma * (p.beta + vs) / gap
    )
    herbivore = average_of(percapita).margin
    return math.exp(omega * logistic), math.exp(omega * herbivore)


def build_orbit(
        p: SimplifiedParams,
        state: State,
        residual: float,
        t0: float = 0.0,
        cfg: Optional[IntegratorConfig] = None,
) -> PeriodicOrbit:
    """
    One period of the orbit through ``state`` with its multipliers.

    The orbit counts as herbivore-free when h is within the integrator's
    absolute tolerance of zero.
    """
    cfg = shooting_config(p, cfg)
    samples = integrate(p, state, t0, t0 + p.period, cfg)
    _, multipliers = monodromy(p, state, t0, cfg)
    return PeriodicOrbit(
        initial_state=state,
        t0=t0,
        period=p.period,
        residual=residual,
        samples=samples,
        floquet=multipliers,
        stability=classify(multipliers),
        boundary=state.h <= cfg.abs_tol,
    )


def boundary_orbit(
        p: SimplifiedParams, t0: float = 0.0, opts: Optional[FixedPointOptions] = None
) -> PeriodicOrbit:
    """The herbivore-free orbit (v*(t0), 0), polished on the period map."""
    opts = opts or FixedPointOptions()
    seed = State(v=reference_logistic(p).evaluate_scalar(t0), h=0.0)
    result = find_fixed_point(p, seed, t0, opts)
    return build_orbit(p, result.fixed_state, result.residual, t0, opts.integrator)


def _distinct(orbit: PeriodicOrbit, found: List[PeriodicOrbit]) -> bool:
    x = orbit.initial_state.as_array()
    return all(
        float(np.max(np.abs(x - other.initial_state.as_array()))) > settings.ORBIT_DISTINCT_TOL
        for other in found
    )


def find_orbits(
        p: SimplifiedParams,
        seeds: Sequence[State],
        t0: float = 0.0,
        opts: Optional[FixedPointOptions] = None,
        warmup_periods: Optional[int] = None,
) -> List[PeriodicOrbit]:
    """
    Search for periodic orbits from several seeds and keep the distinct ones.

    Seeds with h = 0 lead to the herbivore-free orbit. Other seeds are first
    advanced by ``warmup_periods`` periods and then polished by Newton.
    Seeds that fail are logged and skipped.

    Args:
        p: Reduced parameters
        seeds: Admissible initial states
        t0: Section time
        opts: Fixed-point settings
        warmup_periods: Periods simulated before Newton (default ORBIT_WARMUP_PERIODS)

    Returns:
        Distinct orbits (max-norm separation above ORBIT_DISTINCT_TOL) in seed order
    """
    opts = opts or FixedPointOptions()
    warmup = settings.ORBIT_WARMUP_PERIODS if warmup_periods is None else warmup_periods
    found: List[PeriodicOrbit] = []
    for index, seed in enumerate(seeds):
        try:
            if seed.h == 0.0:
                orbit = boundary_orbit(p, t0, opts)
            else:
                start = seed_from_simulation(p, seed, t0, warmup, cfg=opts.integrator)
                result = find_fixed_point(p, start, t0, opts)
                orbit = build_orbit(p, result.fixed_state, result.residual, t0, opts.integrator)
        except (NoConvergence, SingularityError) as exc:
            logger.warning("orbit search failed", seed=index, v=seed.v, h=seed.h, error=str(exc))
            continue
        if _distinct(orbit, found):
            found.append(orbit)
            logger.info(
                "periodic orbit found",
                seed=index,
                v0=orbit.initial_state.v,
                h0=orbit.initial_state.h,
                stability=orbit.stability,
                residual=orbit.residual,
            )
    return found
