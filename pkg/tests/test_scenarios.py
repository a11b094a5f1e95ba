"""
Seeded scenario suites for the long-run behaviour of the reduced system: the
periodic logistic solution, comparison and positivity, interior equilibria,
extinction, permanence, boundary multipliers and the Lyapunov functions.
"""
import itertools
import math
import unittest

import numpy as np

from osdyn.analysis import (
    check_gas,
    check_permanence_iff,
    check_sufficient_permanence,
    comparison_gap,
    estimate_bounds,
    lyapunov_W,
    lyapunov_X,
    max_increase,
    reference_logistic,
)
from osdyn.integrate import flow_map, integrate
from osdyn.models import IntegratorConfig, State
from osdyn.models.params import SimplifiedParams, simplified_constants
from osdyn.periodic import (
    FixedPointOptions,
    boundary_multipliers,
    find_fixed_point,
    monodromy,
)
from osdyn.system import equilibrium, rhs

SEED = 7211

PERMANENT = dict(a=1.0, b=1.0, c=1.0, alpha=2.0, beta=1.0, gamma=0.05, rho=0.0, R=0.2)

# Interior equilibrium near (0.835, 0.607) with both eigenvalues real and negative.
DAMPED = dict(a=2.0, b=2.0, c=1.0, alpha=2.0, beta=1.0, gamma=0.05, rho=0.0, R=0.8)

TIGHT = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
LONG_RUN = IntegratorConfig(max_step=0.25)

LOGISTIC_SUITE = {
    "constants": {"a": 1.5, "b": 0.75},
    "one_harmonic": {"a": {"base": 1.0, "harmonics": [[0.5, 1, 0.0]]}},
    "two_harmonics": {
        "a": {"base": 1.0, "harmonics": [[0.4, 1, 0.3], [0.2, 3, 1.1]]},
        "b": {"base": 1.0, "harmonics": [[0.3, 2, 0.0]]},
    },
    "dry_season": {"a": {"base": 0.5, "segments": [[0.0, 0.4, 1.0], [0.4, 1.0, 0.0]]}},
    "dry_season_with_harmonic": {
        "a": {
            "base": 0.5,
            "harmonics": [[0.3, 1, 0.5]],
            "segments": [[0.0, 0.6, 0.8], [0.6, 1.0, 0.0]],
        },
        "b": {"base": 1.0, "harmonics": [[0.2, 1, 2.0]]},
    },
}

EXTINCTION_SUITE = {
    "weak_conversion": {"alpha": 0.1},
    "costly_upkeep": {"alpha": 0.5, "R": 0.5},
    "seasonal_growth": {"alpha": 0.2, "a": {"base": 1.0, "harmonics": [[0.5, 1, 0.0]]}},
    "dry_season": {
        "alpha": 0.3,
        "R": 0.3,
        "a": {"base": 0.5, "segments": [[0.0, 0.5, 1.0], [0.5, 1.0, 0.0]]},
    },
    "reserve": {"alpha": 0.6, "R": 0.4, "rho": 0.2},
}

PERMANENCE_SUITE = {
    "damped": DAMPED,
    "strong_self_limitation": {**DAMPED, "a": 3.0, "b": 3.0},
    "seasonal_growth": {**DAMPED, "a": {"base": 2.0, "harmonics": [[0.2, 1, 0.0]]}},
    "dry_season": {**DAMPED, "a": {"base": 1.5, "segments": [[0.0, 0.5, 1.0], [0.5, 1.0, 0.0]]}},
    "reserve": {**DAMPED, "alpha": 2.5, "rho": 0.1},
}

SEASONAL_SUITE = {
    "one_harmonic": {"a": {"base": 1.0, "harmonics": [[0.5, 1, 0.0]]}},
    "two_harmonics": {
        "a": {"base": 1.0, "harmonics": [[0.4, 1, 0.3], [0.2, 3, 1.1]]},
        "b": {"base": 1.0, "harmonics": [[0.3, 2, 0.0]]},
    },
    "dry_season": {"a": {"base": 0.5, "segments": [[0.0, 0.5, 1.0], [0.5, 1.0, 0.0]]}},
    "seasonal_herbivores": {
        "alpha": {"base": 2.0, "harmonics": [[0.5, 1, 1.0]]},
        "R": {"base": 0.2, "segments": [[0.0, 0.5, 0.1], [0.5, 1.0, 0.0]]},
    },
    "seasonal_reserve": {
        "rho": {"base": 0.1, "harmonics": [[0.05, 1, 0.0]]},
        "gamma": {"base": 0.05, "harmonics": [[0.02, 2, 0.5]]},
    },
}

INITIAL_STATES = [
    State(v=0.5, h=0.5),
    State(v=1.5, h=0.2),
    State(v=0.3, h=1.0),
    State(v=1.0, h=2.0),
]


def suite_params(overrides, period=1.0):
    """PERMANENT with some coefficients replaced."""
    return simplified_constants(period=period, **PERMANENT).replace(**overrides)


def random_seasonal(rng, low, high, amplitude):
    """A positive coefficient with one harmonic of relative size below ``amplitude``."""
    base = float(rng.uniform(low, high))
    wave = [
        float(rng.uniform(0.0, amplitude)) * base,
        int(rng.integers(1, 3)),
        float(rng.uniform(0.0, 2.0 * math.pi)),
    ]
    return {"base": base, "harmonics": [wave]}


def random_scenario(rng):
    """A seasonal parameter set without reserve."""
    return SimplifiedParams(
        period=float(rng.uniform(0.5, 2.0)),
        a=random_seasonal(rng, 0.5, 2.0, 0.5),
        b=random_seasonal(rng, 0.75, 2.0, 0.3),
        c=float(rng.uniform(0.2, 1.5)),
        alpha=random_seasonal(rng, 0.5, 2.5, 0.3),
        beta=float(rng.uniform(0.5, 2.0)),
        gamma=float(rng.uniform(0.01, 0.1)),
        rho=0.0,
        R=random_seasonal(rng, 0.05, 1.0, 0.3),
    )


def random_state(rng):
    return State(v=float(rng.uniform(0.1, 3.0)), h=float(rng.uniform(0.05, 2.0)))


class TestLogisticSuite(unittest.TestCase):
    """The closed-form v* and the herbivore-free flow on five seasonal patterns."""

    def setUp(self):
        """Build one parameter set per seasonal pattern."""
        self.suite = {name: suite_params(overrides) for name, overrides in LOGISTIC_SUITE.items()}
        self.rng = np.random.default_rng(SEED)

    def test_closed_form_matches_integration(self):
        """Test that integrating from v*(0) follows v* to 1e-7 over five periods."""
        for name, p in self.suite.items():
            with self.subTest(scenario=name):
                vs = reference_logistic(p)
                traj = integrate(p, (vs(0.0), 0.0), 0.0, 5.0, TIGHT)
                error = np.abs(traj.y[:, 0] - vs.evaluate(traj.t))
                self.assertLessEqual(float(error.max()), 1e-7)

    def test_global_attraction(self):
        """Test that ten random positive starts reach v* within fifty periods."""
        cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
        for name, p in self.suite.items():
            vs = reference_logistic(p)
            for v0 in self.rng.uniform(0.05, 3.0, size=10):
                with self.subTest(scenario=name, v0=float(v0)):
                    end = flow_map(p, State(v=float(v0), h=0.0), 0.0, 50.0, cfg)
                    self.assertAlmostEqual(end.v, vs(50.0), delta=1e-7)

    def test_w_never_increases(self):
        """Test that the log distance to v* decreases along every step."""
        for name, p in self.suite.items():
            vs = reference_logistic(p)
            for v0 in (0.1, 0.8, 3.0):
                with self.subTest(scenario=name, v0=v0):
                    traj = integrate(p, (v0, 0.0), 0.0, 10.0, TIGHT)
                    self.assertLessEqual(max_increase(lyapunov_W(traj, vs)), 1e-8)


class TestRandomScenarios(unittest.TestCase):
    """Comparison with the logistic flow and positivity on random seasonal scenarios."""

    def setUp(self):
        """Seed the generator."""
        self.rng = np.random.default_rng(SEED)

    def test_comparison_principle(self):
        """Test that grazing never lifts vegetation above the logistic run in 20 scenarios."""
        cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
        for index in range(20):
            p = random_scenario(self.rng)
            x0 = random_state(self.rng)
            with self.subTest(index=index):
                self.assertLessEqual(comparison_gap(p, x0, periods=10, cfg=cfg), 1e-8)

    def test_positivity(self):
        """Test that 100 random fifty-period runs keep v > 0 and h >= 0."""
        for index in range(100):
            p = random_scenario(self.rng)
            x0 = random_state(self.rng)
            cfg = IntegratorConfig(rel_tol=1e-7, abs_tol=1e-10, max_step=p.period / 8.0)
            with self.subTest(index=index):
                traj = integrate(p, x0, 0.0, 50.0 * p.period, cfg)
                self.assertTrue(np.all(traj.y[:, 0] > 0.0))
                self.assertTrue(np.all(traj.y[:, 1] >= 0.0))


class TestEquilibria(unittest.TestCase):
    """Interior equilibria of random permanent constant parameter sets."""

    def setUp(self):
        """Draw ten constant sets with a positive permanence margin."""
        rng = np.random.default_rng(SEED)
        self.rng = rng
        self.sets = []
        while len(self.sets) < 10:
            p = simplified_constants(
                a=float(rng.uniform(1.0, 2.0)),
                b=float(rng.uniform(0.5, 1.5)),
                c=float(rng.uniform(0.5, 1.5)),
                alpha=float(rng.uniform(1.5, 3.0)),
                beta=float(rng.uniform(0.5, 1.5)),
                gamma=float(rng.uniform(0.01, 0.1)),
                rho=float(rng.uniform(0.0, 0.05)),
                R=float(rng.uniform(0.1, 0.5)),
            )
            if check_permanence_iff(p).margin("permanence_iff") >= 0.05 and equilibrium(p) is not None:
                self.sets.append(p)

    def test_vector_field_vanishes(self):
        """Test that the algebraic equilibrium zeroes the vector field to 1e-12."""
        for index, p in enumerate(self.sets):
            with self.subTest(index=index):
                dv, dh = rhs(p, 0.0, equilibrium(p))
                self.assertLessEqual(abs(dv), 1e-12)
                self.assertLessEqual(abs(dh), 1e-12)

    def test_newton_recovers_equilibrium(self):
        """Test that the period-map search returns the equilibrium from a 20% offset."""
        opts = FixedPointOptions(fp_tol=1e-12)
        for index, p in enumerate(self.sets):
            eq = equilibrium(p)
            signs = self.rng.choice([-1.0, 1.0], size=2)
            guess = State(v=eq.v * (1.0 + 0.2 * signs[0]), h=eq.h * (1.0 + 0.2 * signs[1]))
            with self.subTest(index=index):
                result = find_fixed_point(p, guess, opts=opts)
                self.assertAlmostEqual(result.fixed_state.v, eq.v, delta=1e-9)
                self.assertAlmostEqual(result.fixed_state.h, eq.h, delta=1e-9)


class TestExtinctionSuite(unittest.TestCase):
    """Herbivores die out wherever the permanence criterion fails."""

    def test_criterion_fails(self):
        """Test that every scenario sits at least 0.05 below the threshold."""
        for name, overrides in EXTINCTION_SUITE.items():
            with self.subTest(scenario=name):
                margin = check_permanence_iff(suite_params(overrides)).margin("permanence_iff")
                self.assertLessEqual(margin, -0.05)

    def test_herbivores_vanish(self):
        """Test h(200 periods) < 1e-6 from four initial states."""
        for name, overrides in EXTINCTION_SUITE.items():
            p = suite_params(overrides)
            for x0 in INITIAL_STATES:
                with self.subTest(scenario=name, v0=x0.v, h0=x0.h):
                    end = flow_map(p, x0, 0.0, 200.0 * p.period, LONG_RUN)
                    self.assertLess(end.h, 1e-6)

    def test_boundary_orbit_attracts_herbivore_direction(self):
        """Test that the herbivore multiplier of (v*, 0) is at most one."""
        for name, overrides in EXTINCTION_SUITE.items():
            p = suite_params(overrides)
            with self.subTest(scenario=name):
                self.assertLessEqual(boundary_multipliers(p)[1], 1.0)
                matrix, _ = monodromy(p, State(v=reference_logistic(p)(0.0), h=0.0))
                self.assertLessEqual(matrix[1, 1], 1.0)


class TestPermanenceSuite(unittest.TestCase):
    """Long runs of five permanent scenarios from four initial states each."""

    @classmethod
    def setUpClass(cls):
        """Integrate every scenario and initial state over 200 periods."""
        cls.runs = {}
        for name, spec in PERMANENCE_SUITE.items():
            p = SimplifiedParams(period=1.0, **spec)
            trajectories = [integrate(p, x0, 0.0, 200.0, LONG_RUN) for x0 in INITIAL_STATES]
            bounds = estimate_bounds(p, LONG_RUN, periods=20)
            gas = check_gas(p, trajectories[0], bounds)
            cls.runs[name] = (p, trajectories, bounds, gas)

    def test_theorem_verdicts(self):
        """Test the criterion margin and both persistence verdicts."""
        for name, (p, _, bounds, _) in self.runs.items():
            with self.subTest(scenario=name):
                self.assertGreaterEqual(check_permanence_iff(p).margin("permanence_iff"), 0.05)
                report = check_sufficient_permanence(p, bounds)
                self.assertTrue(report.verdict("vegetation_persistence").passed)
                self.assertTrue(report.verdict("herbivore.persistence_average").passed)

    def test_uniform_lower_bounds(self):
        """Test min v and min h over [100, 200] periods stay above 1e-4."""
        for name, (_, trajectories, _, _) in self.runs.items():
            for x0, traj in zip(INITIAL_STATES, trajectories):
                with self.subTest(scenario=name, v0=x0.v, h0=x0.h):
                    tail = traj.window(100.0, 200.0)
                    self.assertGreaterEqual(float(tail[:, 1].min()), 1e-4)
                    self.assertGreaterEqual(float(tail[:, 2].min()), 1e-4)

    def test_damped_scenario_is_stable(self):
        """Test that every stability verdict holds on the damped constant set."""
        gas = self.runs["damped"][3]
        self.assertTrue(gas.verdict("gas").passed)

    def test_common_attracting_orbit(self):
        """Test that stable scenarios bring all starts within 1e-5 at 200 periods."""
        for name, (_, trajectories, _, gas) in self.runs.items():
            if not gas.verdict("gas").passed:
                continue
            ends = [traj.final_state.as_array() for traj in trajectories]
            for (i, first), (j, second) in itertools.combinations(enumerate(ends), 2):
                with self.subTest(scenario=name, pair=(i, j)):
                    self.assertLessEqual(float(np.max(np.abs(first - second))), 1e-5)

    def test_x_contracts(self):
        """Test X(150 periods) <= 1e-6 X(0) wherever the stability verdicts hold."""
        for name, (_, trajectories, _, gas) in self.runs.items():
            if not gas.verdict("gas").passed:
                continue
            reference = trajectories[0]
            for index, traj in enumerate(trajectories[1:], start=1):
                with self.subTest(scenario=name, start=index):
                    x = lyapunov_X(traj, reference, times=[0.0, 150.0])
                    self.assertLessEqual(x.iloc[1], 1e-6 * x.iloc[0])


class TestBoundaryMultipliers(unittest.TestCase):
    """Finite-difference multipliers of (v*, 0) against the closed form."""

    def test_seasonal_suite(self):
        """Test both diagonal entries of the monodromy matrix to 1e-5 relative."""
        for name, overrides in SEASONAL_SUITE.items():
            p = suite_params(overrides)
            with self.subTest(scenario=name):
                logistic, herbivore = boundary_multipliers(p)
                matrix, _ = monodromy(p, State(v=reference_logistic(p)(0.0), h=0.0))
                self.assertEqual(matrix[1, 0], 0.0)
                self.assertAlmostEqual(matrix[0, 0], logistic, delta=1e-5 * logistic)
                self.assertAlmostEqual(matrix[1, 1], herbivore, delta=1e-5 * herbivore)


if __name__ == "__main__":
    unittest.main()
