"""
Unit tests for the periodic logistic solution, the condition checkers, the
bound estimators and the Lyapunov diagnostics.
"""
import math
import unittest

import numpy as np

from osdyn.analysis import (
    ConditionEngine,
    Measurement,
    check_gas,
    check_herbivore_persistence,
    check_periodic_existence,
    check_permanence_iff,
    check_sufficient_permanence,
    check_vegetation_persistence,
    comparison_gap,
    estimate_bounds,
    gas_inf_expressions,
    initial_grid,
    lyapunov_W,
    lyapunov_W_bound,
    lyapunov_X,
    max_increase,
    permanence_variants,
    reference_logistic,
    vstar,
)
from osdyn.coefficients import PeriodicCoefficient
from osdyn.core.exceptions import DomainError, HypothesisError, InapplicableError
from osdyn.integrate import flow_map, integrate
from osdyn.models import IntegratorConfig, State
from osdyn.models.params import simplified_constants
from osdyn.system import equilibrium

PERMANENT = dict(a=1.0, b=1.0, c=1.0, alpha=2.0, beta=1.0, gamma=0.05, rho=0.0, R=0.2)


class TestPeriodicLogistic(unittest.TestCase):
    """Unit tests for the closed-form periodic logistic solution."""

    def setUp(self):
        """Set up a seasonal growth rate."""
        self.a = PeriodicCoefficient(period=1.0, base=1.0, harmonics=[[0.5, 1, 0.0]])
        self.b = PeriodicCoefficient(period=1.0, base=1.0)
        self.tight = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)

    def test_constants(self):
        """Test that constant coefficients give v* = a/b."""
        one = PeriodicCoefficient(period=1.0, base=1.0)
        self.assertEqual(vstar(one, one, 1.0).constant, 1.0)
        vs = vstar(PeriodicCoefficient(period=1.0, base=2.0), PeriodicCoefficient(period=1.0, base=0.5), 1.0)
        self.assertEqual(vs(0.37), 4.0)

    def test_hypotheses(self):
        """Test that nonpositive averages are rejected."""
        zero = PeriodicCoefficient(period=1.0, base=0.0)
        with self.assertRaises(HypothesisError):
            vstar(zero, self.b, 1.0)
        with self.assertRaises(HypothesisError):
            vstar(self.a, zero, 1.0)

    def test_matches_integration(self):
        """Test the closed form against integrating the logistic equation."""
        vs = vstar(self.a, self.b, 1.0)
        p = simplified_constants(**PERMANENT).replace(a=self.a)
        traj = integrate(p, (vs(0.0), 0.0), 0.0, 5.0, self.tight)
        np.testing.assert_allclose(traj.y[:, 0], vs.evaluate(traj.t), atol=1e-7)

    def test_residual(self):
        """Test that v* solves the logistic equation on a dense grid."""
        vs = vstar(self.a, self.b, 1.0)
        residual = vs.residual(np.linspace(0.0, 1.0, 1024))
        self.assertLessEqual(float(residual.max()), 1e-8)
        self.assertGreater(vs.extrema().inf, 0.0)

    def test_boundary_state_is_periodic(self):
        """Test that one period of the flow maps (v*(t0), 0) to itself."""
        vs = vstar(self.a, self.b, 1.0)
        p = simplified_constants(**PERMANENT).replace(a=self.a)
        end = flow_map(p, State(v=vs(0.3), h=0.0), 0.3, 1.0, self.tight)
        self.assertAlmostEqual(end.v, vs(0.3), delta=1e-8)

    def test_long_season(self):
        """Test a period whose total growth overflows exp."""
        a = PeriodicCoefficient(period=800.0, base=1.0, harmonics=[[0.5, 1, 0.0]])
        b = PeriodicCoefficient(period=800.0, base=1.0)
        self.assertGreater(a.integral(800.0), 709.0)
        vs = vstar(a, b, 800.0)
        times = np.linspace(0.0, 800.0, 401)
        values = vs.evaluate(times)
        self.assertTrue(np.all(np.isfinite(values)))
        # slow forcing keeps v* close to a / b
        np.testing.assert_allclose(values, a.evaluate(times), atol=0.02)
        self.assertAlmostEqual(vs(0.0), vs(800.0), delta=1e-12)
        self.assertLessEqual(float(vs.residual(times[1:-1] + 0.3).max()), 1e-7)

    def test_global_attraction(self):
        """Test that logistic trajectories approach v*."""
        vs = vstar(self.a, self.b, 1.0)
        p = simplified_constants(**PERMANENT).replace(a=self.a)
        for v0 in (0.05, 0.7, 3.0):
            end = flow_map(p, State(v=v0, h=0.0), 0.0, 50.0, self.tight)
            self.assertAlmostEqual(end.v, vs(50.0), delta=1e-7)


class TestConditionEngine(unittest.TestCase):
    """Unit tests for the condition engine."""

    def setUp(self):
        """Set up an engine with two conditions."""
        self.engine = ConditionEngine()
        self.engine.register_condition("positive", lambda ctx: Measurement(0.5), "positive margin")
        self.engine.register_condition("zero", lambda ctx: Measurement(0.0), "zero margin")

    def test_strict_sign_test(self):
        """Test that a zero margin fails."""
        report = self.engine.evaluate({})
        self.assertTrue(report.verdict("positive").passed)
        self.assertFalse(report.verdict("zero").passed)
        self.assertEqual(report.names(), ["positive", "zero"])

    def test_conjunction(self):
        """Test that conjunctions report the smallest component margin."""
        self.engine.register_conjunction("both", ["positive", "zero"], "both hold")
        report = self.engine.evaluate({})
        self.assertFalse(report.verdict("both").passed)
        self.assertEqual(report.margin("both"), 0.0)

    def test_unknown_component(self):
        """Test that conjunctions need registered components."""
        with self.assertRaises(KeyError):
            self.engine.register_conjunction("bad", ["missing"], "bad")


class TestCheckers(unittest.TestCase):
    """Unit tests for the printed sign conditions."""

    def setUp(self):
        """Set up the permanent constant parameter set."""
        self.p = simplified_constants(**PERMANENT)

    def test_vegetation_persistence(self):
        """Test the averaged net growth with given bounds."""
        p = simplified_constants(**{**PERMANENT, "c": 0.1})
        report = check_vegetation_persistence(p, 1.001, 1.0)
        self.assertAlmostEqual(report.margin("vegetation.net_growth_average"), 0.8999, places=12)
        self.assertTrue(report.verdict("vegetation_persistence").passed)
        self.assertFalse(
            check_vegetation_persistence(p, 1.001, 100.0).verdict("vegetation_persistence").passed
        )

    def test_vegetation_persistence_without_consumption(self):
        """Test that c = 0 leaves the average of a."""
        p = simplified_constants(**{**PERMANENT, "c": 0.0})
        report = check_vegetation_persistence(p, 1.001, 100.0)
        self.assertEqual(report.margin("vegetation.net_growth_average"), 1.0)

    def test_herbivore_persistence(self):
        """Test the persistence threshold along v*."""
        report = check_herbivore_persistence(self.p)
        self.assertAlmostEqual(report.margin("herbivore.persistence_average"), 0.7, places=12)
        self.assertTrue(report.passed)
        self.assertEqual(report.values["vstar.sup"], 1.0)

    def test_herbivore_persistence_boundary(self):
        """Test that a zero average fails the strict inequality."""
        p = simplified_constants(**{**PERMANENT, "gamma": 0.0, "R": 1.0})
        report = check_herbivore_persistence(p)
        self.assertEqual(report.margin("herbivore.persistence_average"), 0.0)
        self.assertFalse(report.passed)

    def test_reserve_above_vstar(self):
        """Test that v* at or below the reserve makes the checks inapplicable."""
        p = simplified_constants(**{**PERMANENT, "rho": 1.0})
        for checker in (check_herbivore_persistence, check_permanence_iff, permanence_variants):
            with self.subTest(checker=checker.__name__):
                with self.assertRaises(InapplicableError):
                    checker(p)

    def test_permanence_iff(self):
        """Test the permanence criterion and the extinction variant."""
        self.assertAlmostEqual(check_permanence_iff(self.p).margin("permanence_iff"), 0.75, places=12)
        weak = simplified_constants(**{**PERMANENT, "alpha": 0.1})
        report = check_permanence_iff(weak)
        self.assertAlmostEqual(report.margin("permanence_iff"), -0.2, places=12)
        self.assertFalse(report.passed)

    def test_extinction_when_criterion_fails(self):
        """Test that herbivores die out when the criterion is negative."""
        weak = simplified_constants(**{**PERMANENT, "alpha": 0.1})
        end = flow_map(weak, State(v=0.5, h=0.5), 0.0, 200.0)
        self.assertLess(end.h, 1e-6)

    def test_permanence_variants(self):
        """Test the three forms of the herbivore threshold."""
        report = permanence_variants(self.p)
        self.assertAlmostEqual(report.margin("threshold.m2_form"), 0.7, places=12)
        self.assertAlmostEqual(report.margin("threshold.iff_form"), 0.75, places=12)
        self.assertAlmostEqual(report.margin("threshold.proof_form"), 0.8, places=12)

    def test_sufficient_permanence(self):
        """Test the conjunction of both persistence results."""
        p = simplified_constants(**{**PERMANENT, "c": 0.1})
        bounds = estimate_bounds(p, periods=4)
        report = check_sufficient_permanence(p, bounds)
        self.assertIn("permanence_sufficient", report.names())
        expected = (
            report.verdict("vegetation_persistence").passed
            and report.verdict("herbivore.persistence_average").passed
        )
        self.assertEqual(report.verdict("permanence_sufficient").passed, expected)

    def test_periodic_existence(self):
        """Test the three averages behind the periodic orbit result."""
        p = simplified_constants(**{**PERMANENT, "c": 0.1})
        report = check_periodic_existence(p, 1.001, 1.0)
        self.assertTrue(report.verdict("periodic_existence").passed)
        self.assertAlmostEqual(
            report.margin("periodic.herbivore_average"), -0.2 + 2.002 - 0.05 / 1.001, places=12
        )
        self.assertAlmostEqual(report.margin("periodic.vegetation_average"), 0.9, places=12)

    def test_periodic_existence_failures(self):
        """Test the strict ratio condition and a large consumption rate."""
        no_gamma = simplified_constants(**{**PERMANENT, "c": 0.1, "gamma": 0.0})
        report = check_periodic_existence(no_gamma, 1.001, 1.0)
        self.assertEqual(report.margin("periodic.ratio_average"), 0.0)
        self.assertFalse(report.verdict("periodic_existence").passed)
        hungry = simplified_constants(**{**PERMANENT, "c": 100.0})
        report = check_periodic_existence(hungry, 1.001, 1.0)
        self.assertFalse(report.verdict("periodic.vegetation_average").passed)
        with self.assertRaises(InapplicableError):
            check_periodic_existence(self.p, 0.0, 1.0)

    def test_shift_invariance(self):
        """Test that a common phase shift leaves the averages unchanged."""
        p = self.p.replace(a={"base": 1.0, "harmonics": [[0.5, 1, 0.0]]})
        shifted = p.shifted(0.3)
        for checker in (check_permanence_iff, check_herbivore_persistence, permanence_variants):
            with self.subTest(checker=checker.__name__):
                base = checker(p)
                moved = checker(shifted)
                for name in base.names():
                    self.assertAlmostEqual(base.margin(name), moved.margin(name), delta=1e-9)

    def test_report_text(self):
        """Test the flat text rendering."""
        text = check_permanence_iff(self.p).to_text()
        self.assertIn("permanence_iff = true\n", text)
        self.assertIn("permanence_iff.margin = ", text)
        self.assertIn("vstar.inf = 1.0\n", text)


class TestStability(unittest.TestCase):
    """Unit tests for the stability conditions."""

    def setUp(self):
        """Set up a reference trajectory resting at the equilibrium."""
        self.p = simplified_constants(**PERMANENT)
        self.eq = equilibrium(self.p)
        self.reference = integrate(self.p, self.eq, 0.0, 4.0)

    def test_gas_report(self):
        """Test that every stability verdict is finite."""
        bounds = estimate_bounds(self.p, periods=4)
        report = check_gas(self.p, self.reference, bounds)
        for name in ("gas.inf_vegetation", "gas.inf_herbivore", "gas.vegetation_average",
                     "gas.herbivore_average", "gas"):
            self.assertTrue(math.isfinite(report.margin(name)))
        # At the equilibrium the criterion form differs from the zero bracket by gamma v/(v - rho).
        self.assertAlmostEqual(report.margin("gas.herbivore_average"), 0.05, delta=1e-6)
        self.assertTrue(report.verdict("gas.herbivore_average").approximate)

    def test_inf_expressions_without_consumption(self):
        """Test the first infimum by hand with c = gamma = rho = 0."""
        p = simplified_constants(**{**PERMANENT, "c": 0.0, "gamma": 0.0, "alpha": 0.3})
        reference = integrate(p, (1.0, 0.5), 0.0, 2.0)
        _, first, second = gas_inf_expressions(p, reference, 0.5, 1.001)
        np.testing.assert_allclose(first, 1.0 - 0.3 / (1.5 * 2.0), atol=1e-12)
        np.testing.assert_array_equal(second, 0.0)

    def test_inapplicable_denominator(self):
        """Test that m1 at the reserve is inapplicable."""
        with self.assertRaises(InapplicableError):
            gas_inf_expressions(self.p, self.reference, 0.0, 1.001)

    def test_short_reference(self):
        """Test that the reference must span one period."""
        short = integrate(self.p, self.eq, 0.0, 0.5)
        with self.assertRaises(DomainError):
            gas_inf_expressions(self.p, short, 0.2, 1.001)


class TestBounds(unittest.TestCase):
    """Unit tests for the bound estimators."""

    def setUp(self):
        """Set up the permanent constant parameter set."""
        self.p = simplified_constants(**PERMANENT)

    def test_initial_grid(self):
        """Test the nine admissible initial states."""
        grid = initial_grid(self.p)
        self.assertEqual(len(grid), 9)
        self.assertEqual(grid[0], State(v=0.25, h=0.1))
        self.assertTrue(all(x.v > self.p.sup_rho for x in grid))

    def test_bounds(self):
        """Test M1 and the ordering of the empirical bounds."""
        bounds = estimate_bounds(self.p, periods=4)
        self.assertAlmostEqual(bounds.M1, 1.001, places=15)
        self.assertEqual(bounds.label, "empirical")
        self.assertEqual(bounds.runs, 9)
        self.assertGreater(bounds.m1_emp, 0.0)
        self.assertLessEqual(bounds.m1_emp, bounds.M1)
        self.assertLessEqual(bounds.m2_emp, bounds.M2)

    def test_extinction_bounds(self):
        """Test that a nonviable herbivore leaves a small M2."""
        weak = simplified_constants(**{**PERMANENT, "alpha": 0.1})
        bounds = estimate_bounds(weak, periods=80)
        self.assertLess(bounds.M2, 0.01)

    def test_comparison_principle(self):
        """Test that grazing never lifts vegetation above the logistic run."""
        gap = comparison_gap(self.p, State(v=0.5, h=0.5), periods=10)
        self.assertLessEqual(gap, 1e-8)
        self.assertGreaterEqual(gap, 0.0)


class TestLyapunov(unittest.TestCase):
    """Unit tests for the Lyapunov diagnostics."""

    def setUp(self):
        """Set up the constant logistic problem."""
        self.p = simplified_constants(**PERMANENT)
        self.ref = reference_logistic(self.p)

    def test_w_vanishes_on_vstar(self):
        """Test that W is identically zero along v*."""
        traj = integrate(self.p, (1.0, 0.0), 0.0, 3.0)
        self.assertEqual(float(lyapunov_W(traj, self.ref).abs().max()), 0.0)

    def test_w_decreases(self):
        """Test that W decreases from above v*."""
        traj = integrate(self.p, (2.0, 0.0), 0.0, 5.0)
        w = lyapunov_W(traj, self.ref)
        self.assertLess(max_increase(w), 0.0)
        self.assertAlmostEqual(w.iloc[0], math.log(2.0), places=15)

    def test_w_envelope(self):
        """Test that the guaranteed envelope bounds W."""
        traj = integrate(self.p, (2.0, 0.0), 0.0, 5.0)
        w = lyapunov_W(traj, self.ref)
        envelope = lyapunov_W_bound(traj, self.ref, printed=False)
        self.assertTrue(np.all(w.to_numpy() <= envelope.to_numpy() + 1e-9))

    def test_w_needs_logistic_trajectory(self):
        """Test that W rejects trajectories with herbivores."""
        traj = integrate(self.p, (1.0, 0.5), 0.0, 1.0)
        with self.assertRaises(DomainError):
            lyapunov_W(traj, self.ref)

    def test_x(self):
        """Test X on identical and converging trajectory pairs."""
        eq = equilibrium(self.p)
        resting = integrate(self.p, eq, 0.0, 200.0)
        self.assertEqual(float(lyapunov_X(resting, resting).max()), 0.0)
        moving = integrate(self.p, (0.5, 0.5), 0.0, 200.0)
        x = lyapunov_X(moving, resting, times=np.linspace(0.0, 200.0, 401))
        self.assertTrue(np.all(x.to_numpy() >= 0.0))
        self.assertLess(x.iloc[-1], 1e-3 * x.iloc[0])


if __name__ == "__main__":
    unittest.main()
