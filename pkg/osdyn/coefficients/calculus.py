"""
Quadrature and extremum search over one period of a piecewise-smooth function.

Every routine here works on plain vectorized callables and a list of
breakpoint fractions, so that closed-form coefficients, lazy expressions and
trajectory samples share a single numerical path.
"""

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar

Sided = Callable[[np.ndarray, int], np.ndarray]

_GL64_NODES, _GL64_WEIGHTS = leggauss(64)
_GL16_NODES, _GL16_WEIGHTS = leggauss(16)


class QuadratureResult(NamedTuple):
    """Average over one period together with its Richardson error estimate."""

    value: float
    error: float
    subdivisions: int


class Extrema(NamedTuple):
    """Infimum and supremum over one period."""

    inf: float
    sup: float


def piece_edges(period: float, breakpoints: Sequence[float]) -> np.ndarray:
    """
    Split [0, period] at the given breakpoint fractions.

    Args:
        period: Period length
        breakpoints: Fractions in [0, 1) where the function may jump

    Returns:
        Sorted unique edge times including 0 and period
    """
    fracs = {0.0, 1.0}
    fracs.update(float(b) % 1.0 for b in breakpoints)
    return np.array(sorted(fracs)) * period


def _integrate_pieces(f: Sided, edges: np.ndarray, subdivisions: int) -> float:
    lefts = []
    rights = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        cuts = np.linspace(lo, hi, subdivisions + 1)
        lefts.append(cuts[:-1])
        rights.append(cuts[1:])
    left = np.concatenate(lefts)
    right = np.concatenate(rights)
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = mid[:, None] + half[:, None] * _GL64_NODES[None, :]
    values = np.asarray(f(nodes, 1), dtype=float)
    return float(np.sum(half * (values @ _GL64_WEIGHTS)))


def gauss_legendre_average(
        f: Sided,
        period: float,
        breakpoints: Sequence[float],
        tol: float = 1e-12,
        max_subdivisions: int = 64,
) -> QuadratureResult:
    """
    Average of f over one period by composite 64-node Gauss-Legendre.

    Each smooth piece is subdivided uniformly; the subdivision count doubles
    until two consecutive estimates agree to ``tol`` (relative to max(1, |I|)).

    Args:
        f: Vectorized callable ``f(t, side)``
        period: Period length
        breakpoints: Discontinuity fractions of f
        tol: Agreement tolerance between successive refinements
        max_subdivisions: Upper bound on subdivisions per piece

    Returns:
        The average, the difference between the last two refinements, and the
        subdivision count used
    """
    edges = piece_edges(period, breakpoints)
    m = 1
    previous = _integrate_pieces(f, edges, m)
    error = math.inf
    current = previous
    while m < max_subdivisions:
        m *= 2
        current = _integrate_pieces(f, edges, m)
        error = abs(current - previous)
        if error <= tol * max(1.0, abs(current)):
            break
        previous = current
    return QuadratureResult(value=current / period, error=error / period, subdivisions=m)


def _refine(
        g: Callable[[float], float], a: float, b: float, c: float, fb: float
) -> float:
    try:
        res = minimize_scalar(g, bracket=(a, b, c), method="golden", options={"xtol": 1e-12})
    except (ValueError, RuntimeError):
        return fb
    return min(fb, float(res.fun))


def locate_extrema(
        f: Sided,
        period: float,
        breakpoints: Sequence[float],
        samples: int = 4096,
) -> Extrema:
    """
    Infimum and supremum of f over one period.

    Each smooth piece is sampled densely (one-sided limits at its ends), and
    every sampled local extremum is polished by golden-section search inside
    the bracket formed by its grid neighbours.

    Args:
        f: Vectorized callable ``f(t, side)``
        period: Period length
        breakpoints: Discontinuity fractions of f
        samples: Grid density per period

    Returns:
        Extrema over the period
    """
    edges = piece_edges(period, breakpoints)
    lo = math.inf
    hi = -math.inf
    for s, e in zip(edges[:-1], edges[1:]):
        n = max(16, int(math.ceil(samples * (e - s) / period)))
        ts = np.linspace(s, e, n + 1)
        values = np.empty(n + 1)
        values[:-1] = f(ts[:-1], 1)
        values[-1:] = f(ts[-1:], -1)

        def g(x: float, sign: float = 1.0, end: float = e) -> float:
            side = -1 if x >= end else 1
            return sign * float(f(np.array([x]), side)[0])

        inner = values[1:-1]
        minima = np.nonzero((inner < values[:-2]) & (inner < values[2:]))[0] + 1
        maxima = np.nonzero((inner > values[:-2]) & (inner > values[2:]))[0] + 1

        piece_lo = float(values.min())
        for i in minima[np.argsort(values[minima])][:8]:
            piece_lo = min(piece_lo, _refine(g, ts[i - 1], ts[i], ts[i + 1], float(values[i])))
        piece_hi = float(values.max())
        for i in maxima[np.argsort(-values[maxima])][:8]:
            refined = -_refine(
                lambda x: g(x, -1.0), ts[i - 1], ts[i], ts[i + 1], -float(values[i])
            )
            piece_hi = max(piece_hi, refined)
        lo = min(lo, piece_lo)
        hi = max(hi, piece_hi)
    return Extrema(inf=lo, sup=hi)


class CumulativeIntegral:
    """Antiderivative table of a periodic function over one period."""

    def __init__(
            self,
            f: Sided,
            period: float,
            breakpoints: Sequence[float],
            cells: int = 256,
    ) -> None:
        """
        Tabulate cumulative integrals at cell edges.

        Args:
            f: Vectorized callable ``f(t, side)``
            period: Period length
            breakpoints: Discontinuity fractions of f; they become cell edges
            cells: Number of uniform cells before merging breakpoints
        """
        self.f = f
        self.period = period
        uniform = np.linspace(0.0, period, cells + 1)
        self.edges = np.unique(np.concatenate([uniform, piece_edges(period, breakpoints)]))
        left = self.edges[:-1]
        right = self.edges[1:]
        half = 0.5 * (right - left)
        nodes = 0.5 * (right + left)[:, None] + half[:, None] * _GL16_NODES[None, :]
        per_cell = half * (np.asarray(f(nodes, 1), dtype=float) @ _GL16_WEIGHTS)
        self.cumulative = np.concatenate([[0.0], np.cumsum(per_cell)])

    @property
    def total(self) -> float:
        """Integral over a full period."""
        return float(self.cumulative[-1])

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        """
        Integral from 0 to tau for tau in [0, period].

        Args:
            tau: Times within one period

        Returns:
            Cumulative integrals, same shape as tau
        """
        tau = np.asarray(tau, dtype=float)
        flat = tau.reshape(-1)
        idx = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        left = self.edges[idx]
        half = 0.5 * (flat - left)
        nodes = (left + half)[:, None] + half[:, None] * _GL16_NODES[None, :]
        partial = half * (np.asarray(self.f(nodes, 1), dtype=float) @ _GL16_WEIGHTS)
        return (self.cumulative[idx] + partial).reshape(tau.shape)


class DiscountedIntegral:
    """
    Table of J(t) = int_0^t exp(-(G(t) - G(s))) f(s) ds over one period.

    J obeys J(t) = exp(-(G(t) - G(t_k))) J(t_k) + int_{t_k}^t ..., so the
    table is built cell by cell and every exponent only spans one cell. No
    exp(G) is ever formed, which keeps large growth over the period finite.
    """

    def __init__(
            self,
            f: Sided,
            g: Callable[[np.ndarray], np.ndarray],
            period: float,
            breakpoints: Sequence[float],
            cells: int = 256,
    ) -> None:
        """
        Tabulate J at cell edges.

        Args:
            f: Vectorized callable ``f(t, side)``
            g: Vectorized antiderivative G of the decay rate
            period: Period length
            breakpoints: Discontinuity fractions of f; they become cell edges
            cells: Number of uniform cells before merging breakpoints
        """
        self.f = f
        self.g = g
        self.period = period
        uniform = np.linspace(0.0, period, cells + 1)
        self.edges = np.unique(np.concatenate([uniform, piece_edges(period, breakpoints)]))
        self.g_edges = np.asarray(g(self.edges), dtype=float)
        local = self._local(self.edges[:-1], self.edges[1:], self.g_edges[1:])
        decay = np.exp(-np.diff(self.g_edges))
        table = np.zeros(len(self.edges))
        for k in range(len(local)):
            table[k + 1] = decay[k] * table[k] + local[k]
        self.table = table

    def _local(self, left: np.ndarray, right: np.ndarray, g_right: np.ndarray) -> np.ndarray:
        half = 0.5 * (right - left)
        nodes = 0.5 * (right + left)[:, None] + half[:, None] * _GL16_NODES[None, :]
        weights = np.asarray(self.f(nodes, 1), dtype=float) * np.exp(
            -(g_right[:, None] - np.asarray(self.g(nodes), dtype=float))
        )
        return half * (weights @ _GL16_WEIGHTS)

    @property
    def total(self) -> float:
        """J over a full period."""
        return float(self.table[-1])

    @property
    def growth(self) -> float:
        """G(period) - G(0)."""
        return float(self.g_edges[-1] - self.g_edges[0])

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        """
        J(tau) for tau in [0, period].

        Args:
            tau: Times within one period

        Returns:
            Discounted integrals, same shape as tau
        """
        tau = np.asarray(tau, dtype=float)
        flat = tau.reshape(-1)
        idx = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        left = self.edges[idx]
        g_tau = np.asarray(self.g(flat), dtype=float)
        partial = self._local(left, flat, g_tau)
        carried = np.exp(-(g_tau - self.g_edges[idx])) * self.table[idx]
        return (carried + partial).reshape(tau.shape)
