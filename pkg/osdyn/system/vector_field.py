"""
Right-hand side of the reduced herbivore-vegetation system.

    dv/dt = v (a - b v) - c (v - rho) / (beta + v) h
    dh/dt = h [alpha (v - rho) / (beta + v) - R - gamma (beta + v) / (v - rho)]
"""

import math
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from osdyn.core.exceptions import DomainError, SingularityError
from osdyn.models.params import SimplifiedParams, State

StateLike = Union[State, Sequence[float], np.ndarray]


def _unpack(x: StateLike) -> Tuple[float, float]:
    if isinstance(x, State):
        return x.v, x.h
    return float(x[0]), float(x[1])


def field(
        values: Tuple[float, ...], v: float, h: float, margin: float, t: float = math.nan
) -> Tuple[float, float]:
    """
    Vector field from already evaluated coefficients.

    Args:
        values: (a, b, c, alpha, beta, gamma, rho, R) at the current instant
        v: Vegetation
        h: Herbivores
        margin: Singularity guard distance
        t: Time, only used in error reports

    Returns:
        (dv, dh)

    Raises:
        SingularityError: If herbivores are present and v - rho <= margin
    """
    a, b, c, alpha, beta, gamma, rho, big_r = values
    logistic = v * (a - b * v)
    if h == 0.0:
        return logistic, 0.0
    gap = v - rho
    if gap <= margin:
        raise SingularityError(
            f"vegetation reached the ungrazable reserve at t={t} (v - rho = {gap})",
            time=t,
            state=[v, h],
        )
    rate = alpha * gap / (beta + v) - big_r - gamma * (beta + v) / gap
    return logistic - c * gap / (beta + v) * h, h * rate


def rhs(p: SimplifiedParams, t: float, x: StateLike, side: int = 1) -> Tuple[float, float]:
    """
    Evaluate the vector field.

    With h = 0 the logistic-only field is returned and no guard applies.

    Args:
        p: Reduced parameters
        t: Time
        x: State (v, h)
        side: +1 or -1, which one-sided limit to use at seasonal switches

    Returns:
        (dv/dt, dh/dt)

    Raises:
        SingularityError: If h > 0 and v - rho(t) <= 1e-9 * (1 + sup rho)
    """
    v, h = _unpack(x)
    return field(p.values(t, side), v, h, p.singularity_margin, t)


def percapita_h(p: SimplifiedParams, t: Any, v: Any, side: int = 1) -> Any:
    """
    Herbivore per-capita growth rate alpha (v-rho)/(beta+v) - R - gamma (beta+v)/(v-rho).

    Args:
        p: Reduced parameters
        t: Time (scalar or array broadcastable against v)
        v: Vegetation level (scalar or array)
        side: One-sided limit selector at seasonal switches

    Returns:
        The rate, scalar or array

    Raises:
        SingularityError: If v - rho(t) <= the guard distance anywhere
    """
    if np.ndim(t) == 0 and np.ndim(v) == 0:
        _, _, _, alpha, beta, gamma, rho, big_r = p.values(float(t), side)
        v = float(v)
        gap = v - rho
        if gap <= p.singularity_margin:
            raise SingularityError(
                f"per-capita rate is singular at t={t} (v - rho = {gap})", time=float(t)
            )
        return alpha * gap / (beta + v) - big_r - gamma * (beta + v) / gap
    t_arr, v_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(v, dtype=float))
    alpha = p.alpha.evaluate(t_arr, side)
    beta = p.beta.evaluate(t_arr, side)
    gamma = p.gamma.evaluate(t_arr, side)
    rho = p.rho.evaluate(t_arr, side)
    big_r = p.R.evaluate(t_arr, side)
    gap = v_arr - rho
    if np.any(gap <= p.singularity_margin):
        where = int(np.argmin(gap))
        raise SingularityError(
            "per-capita rate is singular on the requested grid",
            time=float(t_arr.reshape(-1)[where]),
        )
    return alpha * gap / (beta + v_arr) - big_r - gamma * (beta + v_arr) / gap


def positivity_integrand(
        p: SimplifiedParams, t: float, x: StateLike, side: int = 1
) -> Tuple[float, float]:
    """
    Per-capita rates of the exponential form used in the positivity argument.

    The consumption term of the vegetation rate is divided by v (beta + v),
    as it appears in that argument, rather than following the vector field
    exactly. Compare with ``rhs(...)[0] / v`` to see the difference.

    Args:
        p: Reduced parameters
        t: Time
        x: State with v > 0
        side: One-sided limit selector

    Returns:
        (vegetation log-rate, herbivore log-rate)
    """
    v, h = _unpack(x)
    if v <= 0.0:
        raise DomainError(f"log-rates need v > 0, got {v}")
    a, b, c, _, beta, _, rho, _ = p.values(t, side)
    veg = a - b * v - c * (v - rho) * h / (v * (beta + v))
    herb = percapita_h(p, t, v, side) if h > 0.0 else _boundary_rate(p, t, v, side)
    return veg, herb


def _boundary_rate(p: SimplifiedParams, t: float, v: float, side: int) -> float:
    if v - p.rho.evaluate_scalar(t, side) <= p.singularity_margin:
        return -math.inf
    return percapita_h(p, t, v, side)


def equilibrium(p: SimplifiedParams) -> Optional[State]:
    """
    Interior equilibrium of a time-independent parameter set.

    With x = (v - rho)/(beta + v) the herbivore bracket vanishes when
    alpha x^2 - R x - gamma = 0; the positive root gives v, and the
    vegetation equation gives h.

    Args:
        p: Reduced parameters with constant coefficients

    Returns:
        The equilibrium, or None when no positive one exists

    Raises:
        DomainError: If a coefficient depends on time
    """
    if not p.is_constant:
        raise DomainError("equilibrium is only defined for constant coefficients")
    a, b, c, alpha, beta, gamma, rho, big_r = p.values(0.0)
    x = (big_r + math.sqrt(big_r * big_r + 4.0 * alpha * gamma)) / (2.0 * alpha)
    if not 0.0 < x < 1.0:
        return None
    v = (x * beta + rho) / (1.0 - x)
    if c <= 0.0 or v - rho <= p.singularity_margin:
        return None
    h = v * (a - b * v) * (beta + v) / (c * (v - rho))
    if h <= 0.0:
        return None
    return State(v=v, h=h)
