"""
Change of variables from the biological parameters to the reduced system.
"""

import structlog

from osdyn.coefficients import Coefficient, fold
from osdyn.core.exceptions import HalfSaturationMismatch, NonpositiveBeta
from osdyn.models.params import RawParams, SimplifiedParams

logger = structlog.get_logger(__name__)

HALF_SATURATION_TOL = 1e-12


def _folded(c: Coefficient, period: float) -> Coefficient:
    closed = fold(c, period)
    return c if closed is None else closed


def reduce(raw: RawParams) -> SimplifiedParams:
    """
    Reduce the biological parameters to the eight coefficients a..R.

    a = r, b = r/K, c = i_m, alpha = C*i_m, beta = b_i - v_u,
    gamma = q*m_p/(C*i_m), rho = v_u, R = m_p + q_0 + q_s. Results that stay in
    the closed-form family are folded back to it; the rest remain lazy
    expressions.

    Args:
        raw: Biological parameters

    Returns:
        The reduced parameter set with the same period

    Raises:
        HalfSaturationMismatch: If b_i and b_g differ anywhere
        NonpositiveBeta: If b_i - v_u is not strictly positive
    """
    mismatch = (raw.b_i - raw.b_g).extrema()
    gap = max(abs(mismatch.inf), abs(mismatch.sup))
    if gap > HALF_SATURATION_TOL:
        raise HalfSaturationMismatch(
            "assume the half saturation rates for consumption and conversion are equal"
            f" (sup |b_i - b_g| = {gap})",
            gap=gap,
        )

    beta = raw.b_i - raw.v_u
    lowest = beta.extrema().inf
    if lowest <= 0.0:
        raise NonpositiveBeta(
            f"b_i must exceed the ungrazable reserve v_u everywhere (inf(b_i - v_u) = {lowest})",
            inf=lowest,
        )

    period = raw.period
    alpha = raw.C * raw.i_m
    reduced = SimplifiedParams(
        period=period,
        a=_folded(raw.r, period),
        b=_folded(raw.r / raw.K, period),
        c=_folded(raw.i_m, period),
        alpha=_folded(alpha, period),
        beta=_folded(beta, period),
        gamma=_folded(raw.q * raw.m_p / alpha, period),
        rho=_folded(raw.v_u, period),
        R=_folded(raw.m_p + raw.q_0 + raw.q_s, period),
    )
    logger.debug("reduced raw parameters", period=period, constant=reduced.is_constant)
    return reduced
