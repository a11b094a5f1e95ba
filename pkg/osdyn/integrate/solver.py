"""
Time stepping of the reduced system.

Integration proceeds piece by piece between the seasonal switch times of the
coefficients, so no step straddles a discontinuity. Inside a piece either an
adaptive Dormand-Prince 5(4) scheme with PI step control or classical RK4 with
uniform steps is used. Stages that land on the end of a piece see the left
limits of the coefficients; the first stage after a switch sees the right
limits.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from osdyn.core.config import settings
from osdyn.core.exceptions import BlowupError, DomainError, SingularityError
from osdyn.integrate.tableau import (
    DP_A,
    DP_B,
    DP_C,
    DP_E,
    DP_ORDER,
    MAX_FACTOR,
    MIN_FACTOR,
    PI_ALPHA,
    PI_BETA,
)
from osdyn.models.params import SimplifiedParams, State
from osdyn.models.trajectory import IntegratorConfig, Trajectory
from osdyn.system.vector_field import field

logger = structlog.get_logger(__name__)

Vec = Tuple[float, float]
StateLike = Union[State, Sequence[float], np.ndarray]

_BISECTION_STEPS = 60


class _Piece:
    """Vector field restricted to one smooth piece [start, end]."""

    def __init__(self, p: SimplifiedParams, end: float) -> None:
        self.p = p
        self.end = end
        self.margin = p.singularity_margin

    def slope(self, t: float, y: Vec) -> Vec:
        side = -1 if t >= self.end else 1
        return field(self.p.values(t, side), y[0], y[1], self.margin, t)


class _Recorder:
    """Accepted steps, kept only when a trajectory is requested."""

    def __init__(self, t0: float, y0: Vec, keep: bool) -> None:
        self.keep = keep
        self.t: List[float] = [t0]
        self.y: List[Vec] = [y0]
        self.k_start: List[Vec] = []
        self.k_end: List[Vec] = []
        self.steps = 0
        self.rejected = 0

    def accept(self, t: float, y: Vec, k_start: Vec, k_end: Vec) -> None:
        self.steps += 1
        if self.keep:
            self.t.append(t)
            self.y.append(y)
            self.k_start.append(k_start)
            self.k_end.append(k_end)
        else:
            self.t[0] = t
            self.y[0] = y

    def trajectory(self) -> Trajectory:
        return Trajectory(
            t=np.asarray(self.t, dtype=float),
            y=np.asarray(self.y, dtype=float).reshape(-1, 2),
            slopes_start=np.asarray(self.k_start, dtype=float).reshape(-1, 2),
            slopes_end=np.asarray(self.k_end, dtype=float).reshape(-1, 2),
        )


def _as_vec(x: StateLike) -> Vec:
    if isinstance(x, State):
        return x.v, x.h
    return float(x[0]), float(x[1])


def _check_finite(t: float, y: Vec) -> None:
    limit = settings.BLOWUP_THRESHOLD
    if not (abs(y[0]) <= limit and abs(y[1]) <= limit):
        raise BlowupError(f"state left the representable range at t={t}: {y}", time=t)


def _dp_step(
        piece: _Piece, t: float, y: Vec, k1: Vec, step: float, t_end: float
) -> Tuple[Vec, Vec, Vec]:
    """One Dormand-Prince step; returns (y5, last stage slope, error vector)."""
    ks = [k1]
    for i in range(1, 7):
        row = DP_A[i]
        dv = sum(a * k[0] for a, k in zip(row, ks))
        dh = sum(a * k[1] for a, k in zip(row, ks))
        stage_t = t_end if DP_C[i] == 1.0 else t + DP_C[i] * step
        ks.append(piece.slope(stage_t, (y[0] + step * dv, y[1] + step * dh)))
    # Stage 7 sits at the fifth-order solution.
    y5 = (
        y[0] + step * sum(b * k[0] for b, k in zip(DP_B, ks)),
        y[1] + step * sum(b * k[1] for b, k in zip(DP_B, ks)),
    )
    err = (
        step * sum(e * k[0] for e, k in zip(DP_E, ks)),
        step * sum(e * k[1] for e, k in zip(DP_E, ks)),
    )
    return y5, ks[6], err


def _error_norm(y: Vec, y_new: Vec, err: Vec, cfg: IntegratorConfig) -> float:
    total = 0.0
    for y_i, n_i, e_i in zip(y, y_new, err):
        scale = cfg.abs_tol + cfg.rel_tol * max(abs(y_i), abs(n_i))
        total += (e_i / scale) ** 2
    return math.sqrt(total / 2.0)


def _advance_rk45(
        piece: _Piece,
        t: float,
        y: Vec,
        step_hint: float,
        cfg: IntegratorConfig,
        max_step: float,
        rec: _Recorder,
) -> Tuple[Vec, float]:
    end = piece.end
    k1 = piece.slope(t, y)
    h = min(step_hint, max_step)
    err_prev = 1.0
    while t < end:
        step = min(h, end - t)
        landing = end - (t + step) <= 1e-12 * max(1.0, abs(end))
        if landing:
            step = end - t
        t_new = end if landing else t + step
        try:
            y_new, k_last, err_vec = _dp_step(piece, t, y, k1, step, t_new)
        except SingularityError as exc:
            h = 0.5 * step
            rec.rejected += 1
            if h < cfg.min_step:
                raise SingularityError(
                    f"vegetation reached the ungrazable reserve near t={t + step}",
                    time=t + step,
                    state=list(y),
                ) from exc
            continue
        _check_finite(t_new, y_new)
        err = _error_norm(y, y_new, err_vec, cfg)
        if err <= 1.0:
            rec.accept(t_new, y_new, k1, k_last)
            if rec.steps > cfg.max_steps:
                raise BlowupError(f"step budget of {cfg.max_steps} exhausted", time=t_new)
            err = max(err, 1e-10)
            factor = cfg.safety * err ** -PI_ALPHA * err_prev ** PI_BETA
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            if not landing or step >= h:
                h = min(step * factor, max_step)
            t, y, k1 = t_new, y_new, k_last
        else:
            rec.rejected += 1
            h = step * max(MIN_FACTOR, cfg.safety * err ** (-1.0 / DP_ORDER))
            if h < cfg.min_step:
                raise BlowupError(f"step size underflow at t={t}", time=t)
    return y, h


def _rk4_step(piece: _Piece, t: float, y: Vec, k1: Vec, step: float, t_end: float) -> Tuple[Vec, Vec]:
    half = 0.5 * step
    k2 = piece.slope(t + half, (y[0] + half * k1[0], y[1] + half * k1[1]))
    k3 = piece.slope(t + half, (y[0] + half * k2[0], y[1] + half * k2[1]))
    k4 = piece.slope(t_end, (y[0] + step * k3[0], y[1] + step * k3[1]))
    sixth = step / 6.0
    y_new = (
        y[0] + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )
    return y_new, piece.slope(t_end, y_new)


def _locate_crossing(piece: _Piece, t: float, y: Vec, k1: Vec, step: float) -> float:
    """Bisect the step fraction for the first time the guard fails."""
    lo, hi = 0.0, 1.0
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        try:
            _rk4_step(piece, t, y, k1, mid * step, t + mid * step)
        except SingularityError:
            hi = mid
        else:
            lo = mid
        if (hi - lo) * step <= 1e-14 * max(1.0, abs(t)):
            break
    return t + hi * step


def _advance_rk4(
        piece: _Piece,
        t: float,
        y: Vec,
        cfg: IntegratorConfig,
        max_step: float,
        rec: _Recorder,
) -> Vec:
    start, end = t, piece.end
    count = max(1, math.ceil((end - start) / max_step - 1e-9))
    step = (end - start) / count
    k1 = piece.slope(t, y)
    for i in range(count):
        t_next = end if i == count - 1 else start + (i + 1) * step
        try:
            y_new, k_end = _rk4_step(piece, t, y, k1, t_next - t, t_next)
        except SingularityError as exc:
            crossing = _locate_crossing(piece, t, y, k1, t_next - t)
            raise SingularityError(
                f"vegetation reached the ungrazable reserve at t={crossing}",
                time=crossing,
                state=list(y),
            ) from exc
        _check_finite(t_next, y_new)
        rec.accept(t_next, y_new, k1, k_end)
        t, y, k1 = t_next, y_new, k_end
    return y


def _run(
        p: SimplifiedParams,
        x0: StateLike,
        t0: float,
        t1: float,
        cfg: Optional[IntegratorConfig],
        keep: bool,
) -> _Recorder:
    cfg = cfg or IntegratorConfig()
    if not t1 >= t0:
        raise DomainError(f"integration end {t1} precedes start {t0}")
    y = _as_vec(x0)
    rec = _Recorder(t0, y, keep)
    if t1 == t0:
        return rec
    rho0 = p.rho.evaluate_scalar(t0, 1)
    if y[1] != 0.0 and y[0] - rho0 <= p.singularity_margin:
        raise SingularityError(
            f"initial vegetation {y[0]} is not above the reserve {rho0} at t={t0}",
            time=t0,
            state=list(y),
        )

    max_step = cfg.resolve_max_step(p.period)
    edges = [t0, *p.switch_times(t0, t1), t1]
    hint = max_step
    for start, end in zip(edges[:-1], edges[1:]):
        piece = _Piece(p, end)
        if cfg.scheme == "rk4":
            y = _advance_rk4(piece, start, y, cfg, max_step, rec)
        else:
            y, hint = _advance_rk45(piece, start, y, hint, cfg, max_step, rec)
    logger.debug(
        "integration finished",
        scheme=cfg.scheme,
        t0=t0,
        t1=t1,
        steps=rec.steps,
        rejected=rec.rejected,
        pieces=len(edges) - 1,
    )
    return rec


def integrate(
        p: SimplifiedParams,
        x0: StateLike,
        t0: float,
        t1: float,
        cfg: Optional[IntegratorConfig] = None,
) -> Trajectory:
    """
    Integrate from t0 to t1 and keep every accepted step.

    Args:
        p: Reduced parameters
        x0: Initial state; v must exceed the reserve when herbivores are present
        t0: Start time
        t1: End time, t1 >= t0
        cfg: Integrator settings

    Returns:
        The trajectory with cubic Hermite dense output

    Raises:
        SingularityError: If v - rho drops to the guard distance with h > 0;
            ``time`` holds the located crossing
        BlowupError: If the state exceeds the blow-up threshold
    """
    return _run(p, x0, t0, t1, cfg, keep=True).trajectory()


def flow_array(
        p: SimplifiedParams,
        y0: StateLike,
        t0: float,
        dt: float,
        cfg: Optional[IntegratorConfig] = None,
) -> np.ndarray:
    """
    Endpoint of the flow as a plain array.

    Unlike ``flow_map`` the state is not validated, so slightly negative
    herbivore values (finite-difference probes around the boundary) pass.
    """
    if dt == 0.0:
        return np.asarray(_as_vec(y0))
    rec = _run(p, y0, t0, t0 + dt, cfg, keep=False)
    return np.asarray(rec.y[-1])


def flow_map(
        p: SimplifiedParams,
        x0: StateLike,
        t0: float,
        dt: float,
        cfg: Optional[IntegratorConfig] = None,
) -> State:
    """
    State reached after time dt from x0 at t0.

    Args:
        p: Reduced parameters
        x0: Initial state
        t0: Start time
        dt: Elapsed time (dt = 0 returns x0)
        cfg: Integrator settings

    Returns:
        The endpoint state
    """
    if dt == 0.0:
        return x0 if isinstance(x0, State) else State.from_array(x0)
    return State.from_array(flow_array(p, x0, t0, dt, cfg))
