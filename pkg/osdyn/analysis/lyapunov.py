"""
Lyapunov diagnostics along computed trajectories.

W(t) = |ln v(t) - ln v*(t)| for the logistic subsystem and
X(t) = |ln v - ln v_hat| + |ln h - ln h_hat| for pairs of full trajectories.
Both are returned as pandas Series indexed by time.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from osdyn.analysis.logistic import ClosedFormLogistic
from osdyn.core.exceptions import DomainError
from osdyn.models.trajectory import Trajectory


def _grid(traj: Trajectory, times: Optional[Sequence[float]]) -> np.ndarray:
    return traj.t if times is None else np.asarray(times, dtype=float)


def lyapunov_W(
        traj: Trajectory, ref: ClosedFormLogistic, times: Optional[Sequence[float]] = None
) -> pd.Series:
    """
    Distance in log scale between a logistic trajectory and v*.

    Args:
        traj: Trajectory of the herbivore-free subsystem
        ref: The periodic logistic solution
        times: Sample times (default: the trajectory's step times)

    Returns:
        W sampled at ``times``

    Raises:
        DomainError: If herbivores are present or v is not positive
    """
    if np.any(traj.y[:, 1] != 0.0):
        raise DomainError("W is defined for herbivore-free trajectories only")
    grid = _grid(traj, times)
    v = traj.interpolate(grid)[:, 0]
    if np.any(v <= 0.0):
        raise DomainError("W needs strictly positive vegetation")
    w = np.abs(np.log(v) - np.log(ref.evaluate(grid)))
    return pd.Series(w, index=pd.Index(grid, name="t"), name="W")


def lyapunov_X(
        traj1: Trajectory, traj2: Trajectory, times: Optional[Sequence[float]] = None
) -> pd.Series:
    """
    Log-scale distance between two full trajectories.

    Args:
        traj1: First trajectory
        traj2: Second trajectory (the reference)
        times: Common sample times (default: the step times of traj1 inside
            the span of traj2)

    Returns:
        X sampled at ``times``

    Raises:
        DomainError: On nonpositive samples
    """
    if times is None:
        grid = traj1.t[(traj1.t >= traj2.t0) & (traj1.t <= traj2.t1)]
    else:
        grid = np.asarray(times, dtype=float)
    x1 = traj1.interpolate(grid)
    x2 = traj2.interpolate(grid)
    if np.any(x1 <= 0.0) or np.any(x2 <= 0.0):
        raise DomainError("X needs strictly positive vegetation and herbivores")
    x = np.abs(np.log(x1[:, 0]) - np.log(x2[:, 0])) + np.abs(np.log(x1[:, 1]) - np.log(x2[:, 1]))
    return pd.Series(x, index=pd.Index(grid, name="t"), name="X")


def max_increase(series: pd.Series) -> float:
    """Largest increase between consecutive samples (<= 0 for a nonincreasing series)."""
    if len(series) < 2:
        return 0.0
    return float(np.max(np.diff(series.to_numpy())))


def lyapunov_W_bound(
        traj: Trajectory,
        ref: ClosedFormLogistic,
        times: Optional[Sequence[float]] = None,
        printed: bool = True,
) -> pd.Series:
    """
    Exponential envelope W(t0) exp(-k int_{t0}^t b) of W.

    With zeta = max(|ln v|, |ln v*|) over the samples, the printed rate is
    k = exp(zeta). Since |v - v*| >= min(v, v*) W >= exp(-zeta) W, the rate
    that is guaranteed to bound W is k = exp(-zeta); pass ``printed=False``
    for it.

    Args:
        traj: Herbivore-free trajectory
        ref: The periodic logistic solution
        times: Sample times (default: step times)
        printed: Use the printed rate instead of the guaranteed one

    Returns:
        The envelope on the same index as ``lyapunov_W``
    """
    w = lyapunov_W(traj, ref, times)
    grid = w.index.to_numpy()
    v = traj.interpolate(grid)[:, 0]
    zeta = float(np.max(np.maximum(np.abs(np.log(v)), np.abs(np.log(ref.evaluate(grid))))))
    rate = np.exp(zeta) if printed else np.exp(-zeta)
    b_integral = np.asarray(ref.b.integral(grid)) - float(ref.b.integral(grid[0]))
    envelope = w.iloc[0] * np.exp(-rate * b_integral)
    return pd.Series(envelope, index=w.index, name="W_bound")
