"""
Executable sign conditions for persistence, permanence, stability and
periodic-orbit existence of the reduced system.

Every checker evaluates the printed expression of its condition, so the three
slightly different forms of the herbivore threshold are kept apart and can be
compared through ``permanence_variants``.
"""

from typing import Any, Dict, Tuple

import numpy as np
import structlog

from osdyn.analysis.engine import ConditionEngine, Measurement
from osdyn.analysis.logistic import reference_logistic
from osdyn.coefficients import Coefficient, Constant, PeriodicCoefficient, constant_value
from osdyn.core.config import settings
from osdyn.core.exceptions import DomainError, InapplicableError
from osdyn.models.params import SimplifiedParams
from osdyn.models.reports import BoundsReport, ConditionReport
from osdyn.models.trajectory import Trajectory

logger = structlog.get_logger(__name__)


def average_of(expr: Coefficient) -> Measurement:
    """
    Period average of an expression with its error estimate.

    Time-independent expressions and closed-form coefficients are exact;
    anything else goes through composite Gauss-Legendre quadrature.
    """
    value = constant_value(expr)
    if value is not None:
        return Measurement(value, 0.0)
    if isinstance(expr, PeriodicCoefficient):
        return Measurement(expr.average(), 0.0)
    result = expr.quadrature_average()
    return Measurement(result.value, result.error)


def vstar_gap(p: SimplifiedParams) -> Tuple[Coefficient, Coefficient]:
    """
    v* (exact constant when possible) and v* - rho, checked to stay positive.

    Raises:
        InapplicableError: If inf(v* - rho) <= 0
    """
    vs = reference_logistic(p).as_coefficient()
    gap = vs - p.rho
    lowest = gap.extrema().inf
    if lowest <= 0.0:
        raise InapplicableError(
            f"the periodic logistic solution does not stay above the reserve (inf(v* - rho) = {lowest})",
            inf=lowest,
        )
    return vs, gap


def herbivore_gain(p: SimplifiedParams, v: Coefficient) -> Coefficient:
    """-R + alpha (v - rho) / (beta + v)."""
    return -p.R + p.alpha * (v - p.rho) / (p.beta + v)


def _vstar_values(p: SimplifiedParams, values: Dict[str, float]) -> None:
    vs = reference_logistic(p)
    bounds = vs.extrema()
    values["vstar.inf"] = bounds.inf
    values["vstar.sup"] = bounds.sup
    values["vstar.average"] = vs.average()


def check_vegetation_persistence(p: SimplifiedParams, M1: float, M2: float) -> ConditionReport:
    """
    Vegetation persistence: A(b) > 0 and A(a - c (M1 - rho) M2 / beta) > 0.

    Args:
        p: Reduced parameters
        M1: Vegetation upper bound
        M2: Herbivore upper bound

    Returns:
        Report with both averages and their conjunction
    """
    engine = ConditionEngine()
    engine.register_condition(
        "vegetation.b_average",
        lambda ctx: average_of(p.b),
        "The self-limitation coefficient has a positive average",
        "A(b)",
    )
    engine.register_condition(
        "vegetation.net_growth_average",
        lambda ctx: average_of(p.a - p.c * (M1 - p.rho) * M2 / p.beta),
        "Growth outweighs maximal consumption on average",
        "A(a - c*(M1 - rho)*M2/beta)",
    )
    engine.register_conjunction(
        "vegetation_persistence",
        ["vegetation.b_average", "vegetation.net_growth_average"],
        "Vegetation stays uniformly above a positive level",
    )
    return engine.evaluate({"values": {"M1": M1, "M2": M2}})


def check_herbivore_persistence(p: SimplifiedParams) -> ConditionReport:
    """
    Herbivore persistence along v*:
    A(-R + alpha (v*-rho)/(beta+v*) - gamma (1 + (beta+rho)/(v*-rho))) > 0.

    Raises:
        InapplicableError: If inf(v* - rho) <= 0
    """
    vs, gap = vstar_gap(p)
    values: Dict[str, float] = {}
    _vstar_values(p, values)
    engine = ConditionEngine()
    engine.register_condition(
        "herbivore.persistence_average",
        lambda ctx: average_of(herbivore_gain(p, vs) - p.gamma * (1.0 + p.beta_bar / gap)),
        "Herbivores invade the herbivore-free periodic state",
        "A(-R + alpha*(v* - rho)/(beta + v*) - gamma*(1 + (beta + rho)/(v* - rho)))",
    )
    return engine.evaluate({"values": values})


def check_permanence_iff(p: SimplifiedParams) -> ConditionReport:
    """
    Permanence criterion: A(-R + alpha (v*-rho)/(beta+v*) - gamma beta/(v*-rho)) > 0.

    A negative margin predicts herbivore extinction.

    Raises:
        InapplicableError: If inf(v* - rho) <= 0
    """
    vs, gap = vstar_gap(p)
    values: Dict[str, float] = {}
    _vstar_values(p, values)
    engine = ConditionEngine()
    engine.register_condition(
        "permanence_iff",
        lambda ctx: average_of(herbivore_gain(p, vs) - p.gamma * p.beta / gap),
        "The system is permanent (otherwise herbivores go extinct)",
        "A(-R + alpha*(v* - rho)/(beta + v*) - gamma*beta/(v* - rho))",
    )
    return engine.evaluate({"values": values})


def permanence_variants(p: SimplifiedParams) -> ConditionReport:
    """
    The three printed forms of the herbivore threshold, side by side.

    ``threshold.m2_form`` uses gamma (1 + (beta+rho)/(v*-rho)),
    ``threshold.iff_form`` uses gamma beta/(v*-rho) and
    ``threshold.proof_form`` uses gamma (v*-beta)/(v*-rho).

    Raises:
        InapplicableError: If inf(v* - rho) <= 0
    """
    vs, gap = vstar_gap(p)
    gain = herbivore_gain(p, vs)
    engine = ConditionEngine()
    engine.register_condition(
        "threshold.m2_form",
        lambda ctx: average_of(gain - p.gamma * (1.0 + p.beta_bar / gap)),
        "Herbivore threshold, persistence form",
        "A(-R + alpha*(v* - rho)/(beta + v*) - gamma*(1 + (beta + rho)/(v* - rho)))",
    )
    engine.register_condition(
        "threshold.iff_form",
        lambda ctx: average_of(gain - p.gamma * p.beta / gap),
        "Herbivore threshold, permanence criterion form",
        "A(-R + alpha*(v* - rho)/(beta + v*) - gamma*beta/(v* - rho))",
    )
    engine.register_condition(
        "threshold.proof_form",
        lambda ctx: average_of(gain - p.gamma * (vs - p.beta) / gap),
        "Herbivore threshold, extinction argument form",
        "A(-R + alpha*(v* - rho)/(beta + v*) - gamma*(v* - beta)/(v* - rho))",
    )
    return engine.evaluate({})


def check_sufficient_permanence(p: SimplifiedParams, bounds: BoundsReport) -> ConditionReport:
    """
    Sufficient conditions for permanence: vegetation and herbivore persistence
    together, with M1 and M2 taken from ``bounds``.

    Raises:
        InapplicableError: If inf(v* - rho) <= 0
    """
    report = check_vegetation_persistence(p, bounds.M1, bounds.M2).merge(
        check_herbivore_persistence(p)
    )
    conjunction = ConditionEngine()
    for verdict in report.verdicts:
        conjunction.register_condition(
            verdict.name,
            lambda ctx, v=verdict: Measurement(v.margin, v.error, v.approximate),
            verdict.description,
            verdict.formula,
        )
    conjunction.register_conjunction(
        "permanence_sufficient",
        ["vegetation_persistence", "herbivore.persistence_average"],
        "Both persistence results hold, so the system is permanent",
    )
    return conjunction.evaluate({"values": dict(report.values)})


def gas_inf_expressions(
        p: SimplifiedParams, reference: Trajectory, m1: float, M1: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sample both stability infimum expressions over the last period of ``reference``.

    Both expressions are evaluated exactly as printed, including the product
    rho*m1 in the first numerator and the repeated M1*v_hat factor in the
    second denominator.

    Args:
        p: Reduced parameters
        reference: Long-run positive trajectory (v_hat, h_hat)
        m1: Lower bound of v
        M1: Upper bound of v

    Returns:
        Sample times and the two expressions at those times

    Raises:
        InapplicableError: If a denominator is not positive at some sample
    """
    omega = p.period
    if reference.t1 - reference.t0 < omega * (1.0 - 1e-12):
        raise DomainError("reference trajectory is shorter than one period")
    times = np.linspace(reference.t1 - omega, reference.t1, settings.INF_SAMPLES, endpoint=False)
    states = reference.interpolate(times)
    vh = states[:, 0]
    hh = states[:, 1]
    b = p.b.evaluate(times)
    c = p.c.evaluate(times)
    alpha = p.alpha.evaluate(times)
    beta = p.beta.evaluate(times)
    gamma = p.gamma.evaluate(times)
    rho = p.rho.evaluate(times)

    denominators = {
        "v_hat": vh,
        "beta + M1": beta + M1,
        "beta + v_hat": beta + vh,
        "beta + m1": beta + m1,
        "m1 - rho": m1 - rho,
        "v_hat - rho": vh - rho,
    }
    for label, values in denominators.items():
        lowest = float(np.min(values))
        if not lowest > 0.0:
            raise InapplicableError(
                f"denominator {label} is not positive on the reference period (min = {lowest})",
                denominator=label,
                minimum=lowest,
            )

    first = (
        b
        + c * (rho * m1 - (m1 * vh - rho * beta) * hh) / (M1 * vh * (beta + M1) * (beta + vh))
        - (alpha * beta + alpha * rho) / ((beta + m1) * (beta + vh))
        - (gamma * beta - gamma * rho) / ((m1 - rho) * (vh - rho))
    )
    second = (
        c * vh * (m1 * (beta + vh) - vh * rho * (beta + rho * vh))
        / (M1 * vh * (beta + M1) * M1 * vh * (beta + vh))
    )
    return times, first, second


def check_gas(
        p: SimplifiedParams, reference: Trajectory, bounds: BoundsReport
) -> ConditionReport:
    """
    Global asymptotic stability of a bounded positive reference solution.

    Both infimum conditions are sampled over the final period of the reference
    trajectory with the empirical m1 and M1; the two averages use M1, M2 and
    the reference vegetation over that period.

    Args:
        p: Reduced parameters
        reference: Long-run trajectory serving as (v_hat, h_hat)
        bounds: Bound estimates supplying m1, M1 and M2

    Returns:
        Report with four verdicts and their conjunction

    Raises:
        InapplicableError: If a denominator loses positivity
    """
    m1, M1, M2 = bounds.m1_emp, bounds.M1, bounds.M2
    _, first, second = gas_inf_expressions(p, reference, m1, M1)
    v_hat = reference.as_coefficient("v", p.period, breakpoints=p.breakpoints())

    def herbivore_average(ctx: Dict[str, Any]) -> Measurement:
        try:
            expr = herbivore_gain(p, v_hat) - p.gamma * p.beta / (v_hat - p.rho)
        except DomainError as exc:
            raise InapplicableError(
                "reference vegetation does not stay above the reserve", **exc.context
            ) from exc
        result = average_of(expr)
        return Measurement(result.margin, result.error, approximate=True)

    engine = ConditionEngine()
    engine.register_condition(
        "gas.inf_vegetation",
        lambda ctx: Measurement(float(np.min(first)), None, approximate=True),
        "First stability infimum is positive",
        "inf{b + c*(rho*m1 - (m1*v_hat - rho*beta)*h_hat)/(M1*v_hat*(beta + M1)*(beta + v_hat))"
        " - (alpha*beta + alpha*rho)/((beta + m1)*(beta + v_hat))"
        " - (gamma*beta - gamma*rho)/((m1 - rho)*(v_hat - rho))}",
    )
    engine.register_condition(
        "gas.inf_herbivore",
        lambda ctx: Measurement(float(np.min(second)), None, approximate=True),
        "Second stability infimum is positive",
        "inf{c*v_hat*(m1*(beta + v_hat) - v_hat*rho*(beta + rho*v_hat))"
        "/(M1*v_hat*(beta + M1)*M1*v_hat*(beta + v_hat))}",
    )
    engine.register_condition(
        "gas.vegetation_average",
        lambda ctx: average_of(p.a - p.c * (M1 - p.rho) * M2 / p.beta),
        "Growth outweighs maximal consumption on average",
        "A(a - c*(M1 - rho)*M2/beta)",
    )
    engine.register_condition(
        "gas.herbivore_average",
        herbivore_average,
        "Herbivores grow on average along the reference vegetation",
        "A(-R + alpha*(v_hat - rho)/(beta + v_hat) - gamma*beta/(v_hat - rho))",
    )
    engine.register_conjunction(
        "gas",
        ["gas.inf_vegetation", "gas.inf_herbivore", "gas.vegetation_average", "gas.herbivore_average"],
        "The reference solution is globally asymptotically stable",
    )
    values = {"m1": m1, "M1": M1, "M2": M2}
    report = engine.evaluate({"values": values})
    logger.info("stability conditions evaluated", passed=report.passed, m1=m1, M1=M1, M2=M2)
    return report


def check_periodic_existence(p: SimplifiedParams, M1: float, M2: float) -> ConditionReport:
    """
    Conditions for a positive periodic orbit:
    A(-R + alpha (v* + eps - rho)/beta - gamma beta/(M1 - rho)) > 0,
    A(gamma/(alpha (M1 - rho))) > 0 and A(a - c M2/beta) > 0,
    with eps = 1e-3 sup v*.

    Raises:
        InapplicableError: If M1 <= sup rho
    """
    if M1 <= p.sup_rho:
        raise InapplicableError(
            f"M1 = {M1} does not exceed sup rho = {p.sup_rho}", M1=M1, sup_rho=p.sup_rho
        )
    vs_exact = reference_logistic(p)
    vs = vs_exact.as_coefficient()
    epsilon = settings.EPSILON_FRACTION * vs_exact.extrema().sup
    headroom = Constant(M1) - p.rho

    engine = ConditionEngine()
    engine.register_condition(
        "periodic.herbivore_average",
        lambda ctx: average_of(
            -p.R + p.alpha * (vs + epsilon - p.rho) / p.beta - p.gamma * p.beta / headroom
        ),
        "Herbivores grow near the top of the invariant region",
        "A(-R + alpha*(v* + eps - rho)/beta - gamma*beta/(M1 - rho))",
    )
    engine.register_condition(
        "periodic.ratio_average",
        lambda ctx: average_of(p.gamma / (p.alpha * headroom)),
        "Nutritional mortality is present on average",
        "A(gamma/(alpha*(M1 - rho)))",
    )
    engine.register_condition(
        "periodic.vegetation_average",
        lambda ctx: average_of(p.a - p.c * M2 / p.beta),
        "Growth outweighs consumption at the herbivore bound",
        "A(a - c*M2/beta)",
    )
    engine.register_conjunction(
        "periodic_existence",
        ["periodic.herbivore_average", "periodic.ratio_average", "periodic.vegetation_average"],
        "A positive periodic orbit exists",
    )
    return engine.evaluate({"values": {"epsilon": epsilon, "M1": M1, "M2": M2}})
