"""
Unit tests for the coefficient layer.

This module covers evaluation, exact and quadrature averages, extrema,
antiderivatives, lazy arithmetic and folding of periodic coefficients.
"""
import math
import unittest

import numpy as np
from pydantic import ValidationError

from osdyn.coefficients import (
    CoefficientExpr,
    Constant,
    PeriodicCoefficient,
    combine,
    constant_value,
    fold,
)
from osdyn.core.exceptions import DomainError


class TestPeriodicCoefficient(unittest.TestCase):
    """Unit tests for PeriodicCoefficient evaluation and calculus."""

    def setUp(self):
        """Set up a few representative coefficients."""
        self.constant = PeriodicCoefficient(period=1.0, base=3.0)
        self.harmonic = PeriodicCoefficient(period=1.0, base=1.0, harmonics=[[0.5, 1, 0.0]])
        self.steps = PeriodicCoefficient(
            period=1.0, segments=[[0.0, 0.5, 2.0], [0.5, 1.0, 0.0]]
        )
        self.mixed = PeriodicCoefficient(
            period=1.0,
            base=1.0,
            harmonics=[[0.5, 1, 0.0]],
            segments=[[0.0, 0.25, 4.0], [0.25, 1.0, 0.0]],
        )
        self.two_harmonics = PeriodicCoefficient(
            period=1.0, base=1.0, harmonics=[[0.3, 1, 0.0], [0.2, 2, 0.0]]
        )

    def test_evaluation(self):
        """Test pointwise values of constants, harmonics and steps."""
        self.assertEqual(self.constant(17.2), 3.0)
        self.assertAlmostEqual(self.harmonic(0.25), 1.5, places=15)
        self.assertEqual(self.steps(0.75), 0.0)
        self.assertEqual(self.steps(0.25), 2.0)

    def test_periodicity(self):
        """Test that eval(t + period) equals eval(t)."""
        times = np.linspace(0.0, 1.0, 101)
        for c in (self.harmonic, self.mixed, self.two_harmonics):
            np.testing.assert_allclose(c.evaluate(times + 1.0), c.evaluate(times), atol=1e-14)

    def test_one_sided_limits_at_switch(self):
        """Test that side selects the step on either side of a switch."""
        self.assertEqual(self.steps.evaluate_scalar(0.5, side=1), 0.0)
        self.assertEqual(self.steps.evaluate_scalar(0.5, side=-1), 2.0)
        self.assertEqual(self.steps.evaluate_scalar(3.0, side=-1), 0.0)
        self.assertEqual(self.steps.evaluate_scalar(3.0, side=1), 2.0)

    def test_vectorized_matches_scalar(self):
        """Test that array evaluation agrees with scalar evaluation."""
        times = np.linspace(-2.0, 2.0, 97)
        values = self.mixed.evaluate(times)
        for t, value in zip(times, values):
            self.assertAlmostEqual(value, self.mixed.evaluate_scalar(float(t)), places=14)

    def test_averages(self):
        """Test exact period averages."""
        self.assertEqual(self.harmonic.average(), 1.0)
        self.assertEqual(self.steps.average(), 1.0)
        self.assertEqual(self.mixed.average(), 2.0)

    def test_quadrature_agrees_with_closed_form(self):
        """Test that Gauss-Legendre quadrature reproduces the exact average."""
        result = self.mixed.quadrature_average()
        self.assertAlmostEqual(result.value, 2.0, delta=1e-12)
        self.assertLessEqual(result.error, 1e-10)

    def test_extrema(self):
        """Test infimum and supremum over one period."""
        inf, sup = self.harmonic.extrema()
        self.assertAlmostEqual(inf, 0.5, places=10)
        self.assertAlmostEqual(sup, 1.5, places=10)
        self.assertEqual(tuple(self.constant.extrema()), (3.0, 3.0))
        self.assertEqual(tuple(self.steps.extrema()), (0.0, 2.0))

    def test_extrema_against_dense_grid(self):
        """Test extrema of two harmonics against a brute-force grid."""
        grid = np.linspace(0.0, 1.0, 200001)
        values = self.two_harmonics.evaluate(grid)
        inf, sup = self.two_harmonics.extrema()
        self.assertAlmostEqual(inf, float(values.min()), delta=1e-6)
        self.assertAlmostEqual(sup, float(values.max()), delta=1e-6)

    def test_integral(self):
        """Test the exact antiderivative against the average over whole periods."""
        self.assertAlmostEqual(self.mixed.integral(3.0), 6.0, places=12)
        self.assertAlmostEqual(self.steps.integral(0.25), 0.5, places=15)
        self.assertAlmostEqual(self.steps.integral(0.75), 1.0, places=15)
        expected = 0.5 * (1.0 - math.cos(2.0 * math.pi * 0.25)) / (2.0 * math.pi) + 0.25
        self.assertAlmostEqual(self.harmonic.integral(0.25), expected, places=14)

    def test_switch_times(self):
        """Test that switch instants are listed inside the open interval."""
        self.assertEqual(self.steps.switch_times(0.0, 2.0), [0.5, 1.0, 1.5])
        self.assertEqual(self.harmonic.switch_times(0.0, 2.0), [])

    def test_shifted(self):
        """Test that shifting keeps the closed form and moves the graph."""
        shifted = self.mixed.shifted(0.3)
        self.assertIsInstance(shifted, PeriodicCoefficient)
        times = np.linspace(0.01, 0.99, 41)
        np.testing.assert_allclose(
            shifted.evaluate(times), self.mixed.evaluate(times + 0.3), atol=1e-12
        )
        self.assertAlmostEqual(shifted.average(), self.mixed.average(), places=14)

    def test_knob_helpers(self):
        """Test scaled, with_base and with_segment_value."""
        self.assertEqual(self.steps.scaled(2.0).average(), 2.0)
        self.assertEqual(self.harmonic.with_base(2.0).average(), 2.0)
        changed = self.steps.with_segment_value(1, 1.0)
        self.assertEqual(changed(0.75), 1.0)
        with self.assertRaises(IndexError):
            self.steps.with_segment_value(2, 1.0)

    def test_spec_round_trip(self):
        """Test that the config form rebuilds an equal coefficient."""
        self.assertEqual(self.constant.to_spec(), 3.0)
        spec = self.mixed.to_spec()
        rebuilt = PeriodicCoefficient.from_spec(spec, 1.0)
        times = np.linspace(0.0, 1.0, 33)
        np.testing.assert_array_equal(rebuilt.evaluate(times), self.mixed.evaluate(times))

    def test_segments_must_tile(self):
        """Test that gaps and overlaps in the seasonal steps are rejected."""
        with self.assertRaises(ValidationError):
            PeriodicCoefficient(period=1.0, segments=[[0.0, 0.4, 1.0], [0.5, 1.0, 0.0]])
        with self.assertRaises(ValidationError):
            PeriodicCoefficient(period=1.0, segments=[[0.0, 0.6, 1.0], [0.5, 1.0, 0.0]])

    def test_negative_values_rejected(self):
        """Test that a coefficient dipping below zero is a domain error."""
        with self.assertRaises(DomainError):
            PeriodicCoefficient(period=1.0, base=0.2, harmonics=[[0.5, 1, 0.0]])

    def test_strict_positivity(self):
        """Test the strictly_positive flag."""
        with self.assertRaises(DomainError):
            PeriodicCoefficient(
                period=1.0, segments=[[0.0, 0.5, 1.0], [0.5, 1.0, 0.0]], strictly_positive=True
            )


class TestRandomizedAverages(unittest.TestCase):
    """Closed-form averages against quadrature over random constructions."""

    def setUp(self):
        """Seed the generator."""
        self.rng = np.random.default_rng(20240611)

    def random_coefficient(self):
        period = float(self.rng.uniform(0.5, 3.0))
        harmonics = [
            [float(self.rng.uniform(-0.3, 0.3)), int(self.rng.integers(1, 5)),
             float(self.rng.uniform(0.0, 2.0 * math.pi))]
            for _ in range(int(self.rng.integers(0, 3)))
        ]
        cut = float(self.rng.uniform(0.1, 0.9))
        segments = [
            [0.0, cut, float(self.rng.uniform(0.0, 1.0))],
            [cut, 1.0, float(self.rng.uniform(0.0, 1.0))],
        ]
        base = float(self.rng.uniform(1.0, 2.0))
        return PeriodicCoefficient(
            period=period, base=base, harmonics=harmonics, segments=segments
        )

    def test_average_matches_quadrature(self):
        """Test that the exact mean and Gauss-Legendre agree to 1e-10."""
        for _ in range(1000):
            c = self.random_coefficient()
            self.assertAlmostEqual(c.average(), c.quadrature_average().value, delta=1e-10)

    def test_integral_over_whole_periods(self):
        """Test that harmonics integrate to zero over full periods."""
        for _ in range(50):
            c = self.random_coefficient()
            self.assertAlmostEqual(
                c.integral(2.0 * c.period), 2.0 * c.period * c.average(), delta=1e-10
            )


class TestExpressions(unittest.TestCase):
    """Unit tests for lazy arithmetic on coefficients."""

    def setUp(self):
        """Set up operands."""
        self.one = PeriodicCoefficient(period=1.0, base=1.0)
        self.wave = PeriodicCoefficient(period=1.0, base=1.0, harmonics=[[0.5, 1, 0.0]])
        self.steps = PeriodicCoefficient(
            period=1.0, segments=[[0.0, 0.5, 2.0], [0.5, 1.0, 0.0]]
        )

    def test_constants_collapse(self):
        """Test that arithmetic on constants stays exact."""
        alpha, beta, rho, vs = Constant(2.0), Constant(1.0), Constant(0.0), Constant(1.0)
        expr = alpha * (vs - rho) / (beta + vs)
        self.assertIsInstance(expr, Constant)
        self.assertEqual(constant_value(expr), 1.0)
        self.assertEqual(constant_value(self.one * 3.0 - 1.0), 2.0)

    def test_lazy_average(self):
        """Test the quadrature average of a nonlinear expression."""
        expr = self.wave * self.wave
        self.assertIsInstance(expr, CoefficientExpr)
        # A((1 + 0.5 sin)^2) = 1 + 0.25/2
        self.assertAlmostEqual(expr.average(), 1.125, places=12)

    def test_division_needs_positive_denominator(self):
        """Test that a denominator touching zero is a domain error."""
        with self.assertRaises(DomainError):
            combine("div", self.one, self.steps)
        with self.assertRaises(DomainError):
            self.one / (self.wave - 0.5)

    def test_period_mismatch(self):
        """Test that mixing periods is rejected."""
        other = PeriodicCoefficient(period=2.0, base=1.0, harmonics=[[0.1, 1, 0.0]])
        with self.assertRaises(DomainError):
            self.wave + other

    def test_fold_linear_combinations(self):
        """Test that sums and step products fold back to closed form."""
        folded = fold(2.0 * self.wave + self.steps, 1.0)
        self.assertIsInstance(folded, PeriodicCoefficient)
        times = np.linspace(0.0, 1.0, 17, endpoint=False) + 0.01
        np.testing.assert_allclose(
            folded.evaluate(times), 2.0 * self.wave.evaluate(times) + self.steps.evaluate(times),
            atol=1e-14,
        )
        product = fold(self.steps * self.steps, 1.0)
        self.assertIsInstance(product, PeriodicCoefficient)
        self.assertEqual(product.average(), 2.0)

    def test_fold_gives_up_on_products_of_waves(self):
        """Test that products of sine terms stay lazy."""
        self.assertIsNone(fold(self.wave * self.wave, 1.0))


if __name__ == "__main__":
    unittest.main()
