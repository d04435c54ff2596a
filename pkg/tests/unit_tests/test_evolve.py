from unittest import TestCase

import numpy as np

from relativistic_heat.constants.equation import EquationTag, TimeMethod
from relativistic_heat.exceptions import (
    BlowUpError,
    CFLViolationError,
    InvalidParameterError,
    NegativeDensityError,
    TransformDomainError,
)
from relativistic_heat.features import initial_conditions as ic
from relativistic_heat.features.core import ModelParams
from relativistic_heat.features.evolve import (
    TimeStepConfig,
    common_dt,
    evolve,
    evolve_classical_heat,
    evolve_telegraph,
    front_position,
    is_constant,
    stable_dt,
    step_explicit,
    step_implicit,
    telegraph_dt,
)
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField
from relativistic_heat.features.verify import measure_front_speed

GRID = Grid.uniform(50, -1.0, 1.0)


def _bump(floor=0.2):
    return ic.gaussian_bump(GRID, amplitude=1.0, width=0.2, floor=floor)


class TestTimeStepConfig(TestCase):
    def test_defaults(self):
        config = TimeStepConfig()
        self.assertIs(TimeMethod.EXPLICIT_EULER, config.method)
        self.assertEqual(0.25, config.cfl_parabolic)

    def test_method_from_string(self):
        self.assertIs(TimeMethod.IMPLICIT_EULER, TimeStepConfig(method="implicit").method)

    def test_validation(self):
        for kwargs in (
            {"t_end": 0.0},
            {"cfl_parabolic": 0.6},
            {"cfl_hyperbolic": 0.0},
            {"dt": -1.0},
            {"snapshot_times": (2.0,)},
            {"snapshot_every": 0},
        ):
            with self.assertRaises(InvalidParameterError):
                TimeStepConfig(**kwargs)


class TestStableStep(TestCase):
    def test_parabolic_limit(self):
        h = GRID.h_min
        self.assertAlmostEqual(0.25 * h * h, stable_dt(_bump(), ModelParams(c=1.0)))

    def test_hyperbolic_limit(self):
        h = GRID.h_min
        self.assertAlmostEqual(0.5 * h / 1e4, stable_dt(_bump(), ModelParams(c=1e4)))

    def test_hyperbolic_limit_dominates_for_fast_light(self):
        grid = Grid.uniform(20, -1.0, 1.0)
        dt = stable_dt(ScalarField.constant(grid, 1.0), ModelParams(c=100.0))
        self.assertAlmostEqual(0.0005, dt)
        self.assertLess(dt, 0.25 * grid.h_min**2)

    def test_common_dt_covers_heat(self):
        dt = common_dt(GRID, (2.0, 1e4))
        self.assertLessEqual(dt, stable_dt(_bump(), ModelParams(c=1e4)))
        self.assertLessEqual(dt, 0.25 * GRID.h_min**2)

    def test_telegraph_limit(self):
        grid = Grid.uniform(20, 0.0, 1.0, dim=2)
        limit = grid.h_min / np.sqrt(2.0)
        self.assertAlmostEqual(0.5 * limit, telegraph_dt(grid))
        with self.assertRaises(CFLViolationError):
            telegraph_dt(grid, config=TimeStepConfig(dt=1.01 * limit))


class TestExplicit(TestCase):
    def test_mass_is_conserved(self):
        report = evolve(_bump(), BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=0.02))
        drift = np.abs(report.mass_series - report.mass_series[0]).max()
        self.assertLess(drift, 1e-12 * report.mass_series[0])

    def test_entropy_decreases(self):
        report = evolve(_bump(), BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=0.02))
        self.assertLessEqual(np.diff(report.entropy_series).max(), 1e-10)

    def test_weak_maximum(self):
        u0 = _bump()
        report = evolve(u0, BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=0.02))
        self.assertLessEqual(report.max_series.max(), u0.values.max() + 1e-10)
        self.assertGreaterEqual(report.min_series.min(), u0.values.min() - 1e-10)

    def test_constant_state_is_steady(self):
        u0 = ScalarField.constant(GRID, 0.7)
        bc = BoundaryCondition.dirichlet_constant(GRID, 0.7)
        report = evolve(u0, bc, config=TimeStepConfig(t_end=0.01))
        np.testing.assert_allclose(0.7, report.final.values, rtol=1e-14)

    def test_report_shape(self):
        config = TimeStepConfig(t_end=0.01, snapshot_times=(0.005,))
        report = evolve(_bump(), BoundaryCondition.no_flux(), config=config)
        self.assertEqual(EquationTag.RELATIVISTIC, report.equation_tag)
        self.assertEqual(0.01, report.t_end)
        self.assertEqual(0.0, report.times[0])
        self.assertEqual(report.times.size, report.mass_series.size)
        self.assertEqual(report.times.size, report.front_position_series.size)
        self.assertEqual(3, len(report.snapshots))
        self.assertAlmostEqual(0.005, report.snapshots[1][0], delta=report.dt)
        np.testing.assert_array_equal(report.final.values, report.snapshot_at(0.01).values)
        frame = report.to_frame()
        self.assertEqual(["t", "mass", "entropy", "max", "min", "front"], list(frame.columns))

    def test_last_step_hits_t_end(self):
        config = TimeStepConfig(t_end=0.0123)
        report = evolve(_bump(), BoundaryCondition.no_flux(), config=config)
        self.assertEqual(0.0123, report.times[-1])
        self.assertTrue(np.all(np.diff(report.times) <= report.dt * (1 + 1e-12)))

    def test_clips_roundoff_negatives(self):
        u0 = ic.compact_bump(GRID, amplitude=1.0, radius=0.3)
        report = evolve(u0, BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=0.02))
        self.assertGreaterEqual(report.min_series.min(), 0.0)
        self.assertGreaterEqual(report.clip_count, 0)

    def test_oversized_step_blows_up(self):
        u0 = _bump(floor=0.01)
        with self.assertRaises(BlowUpError):
            evolve(u0, BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=1.0, dt=0.5))

    def test_rejects_negative_initial_data(self):
        u0 = ScalarField(GRID, np.linspace(-1.0, 1.0, 50))
        with self.assertRaises(NegativeDensityError):
            evolve(u0, BoundaryCondition.no_flux())

    def test_rejects_non_positive_dirichlet(self):
        with self.assertRaises(InvalidParameterError):
            evolve(_bump(), BoundaryCondition.dirichlet_constant(GRID, 0.0))

    def test_step_explicit_is_one_step(self):
        u0 = _bump()
        dt = stable_dt(u0)
        once = step_explicit(u0, BoundaryCondition.no_flux(), dt=dt)
        report = evolve(u0, BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=dt))
        np.testing.assert_array_equal(once.values, report.final.values)

    def test_step_halving_halves_the_gap(self):
        finals = [
            evolve(_bump(), BoundaryCondition.no_flux(), config=TimeStepConfig(t_end=0.02, dt=dt))
            .final.values
            for dt in (4e-4, 2e-4, 1e-4)
        ]
        coarse = np.abs(finals[0] - finals[1]).max()
        fine = np.abs(finals[1] - finals[2]).max()
        self.assertGreater(coarse / fine, 1.6)
        self.assertLess(coarse / fine, 2.4)

    def test_runs_are_deterministic(self):
        config = TimeStepConfig(t_end=0.01)
        a = evolve(_bump(), BoundaryCondition.no_flux(), config=config)
        b = evolve(_bump(), BoundaryCondition.no_flux(), config=config)
        self.assertTrue(a.to_frame().equals(b.to_frame()))


class TestImplicit(TestCase):
    def test_agrees_with_explicit(self):
        config = TimeStepConfig(t_end=0.005)
        explicit = evolve(_bump(), BoundaryCondition.no_flux(), config=config)
        implicit = evolve(
            _bump(),
            BoundaryCondition.no_flux(),
            config=TimeStepConfig(
                t_end=0.005, method=TimeMethod.IMPLICIT_EULER, dt=4 * explicit.dt
            ),
        )
        distance = np.abs(explicit.final.values - implicit.final.values).max()
        self.assertLess(distance, 10 * (explicit.dt + implicit.dt) + 10 * GRID.h_min**2)
        self.assertGreater(implicit.newton_iterations, 0)

    def test_large_steps_converge(self):
        field = _bump()
        dt = 10 * stable_dt(field)
        config = TimeStepConfig(t_end=dt, dt=dt, method=TimeMethod.IMPLICIT_EULER)
        for _ in range(5):
            report = evolve(field, BoundaryCondition.no_flux(), config=config)
            self.assertEqual(2, report.times.size)
            self.assertLessEqual(report.newton_iterations, 50)
            field = report.final
        self.assertTrue(np.all(field.values > 0))

    def test_one_step_gap_to_explicit_is_second_order(self):
        bc = BoundaryCondition.no_flux()
        dt = 0.1 * stable_dt(_bump())
        gaps = []
        for step in (dt, 0.5 * dt):
            explicit = step_explicit(_bump(), bc, dt=step)
            implicit = step_implicit(_bump(), bc, dt=step, newton_tol=1e-12)
            gaps.append(np.abs(explicit.values - implicit.values).max())
        ratio = gaps[0] / gaps[1]
        self.assertGreater(ratio, 3.0)
        self.assertLess(ratio, 5.0)

    def test_conserves_mass(self):
        report = evolve(
            _bump(),
            BoundaryCondition.no_flux(),
            config=TimeStepConfig(t_end=0.01, dt=0.002, method=TimeMethod.IMPLICIT_EULER),
        )
        drift = np.abs(report.mass_series - report.mass_series[0]).max()
        self.assertLess(drift, 1e-8)

    def test_needs_positive_data(self):
        u0 = ic.compact_bump(GRID, radius=0.3)
        with self.assertRaises(TransformDomainError):
            step_implicit(u0, BoundaryCondition.no_flux(), dt=1e-3)


class TestClassicalHeat(TestCase):
    def test_explicit_and_implicit_agree(self):
        u0 = _bump()
        config = TimeStepConfig(t_end=0.01)
        explicit = evolve_classical_heat(u0, BoundaryCondition.no_flux(), config)
        implicit = evolve_classical_heat(
            u0,
            BoundaryCondition.no_flux(),
            TimeStepConfig(t_end=0.01, method=TimeMethod.IMPLICIT_EULER, dt=explicit.dt),
        )
        distance = np.abs(explicit.final.values - implicit.final.values).max()
        self.assertLess(distance, 10 * explicit.dt)
        self.assertIsNone(explicit.params)
        self.assertEqual(EquationTag.CLASSICAL_HEAT, explicit.equation_tag)

    def test_heat_kernel(self):
        grid = Grid.uniform(400, -4.0, 4.0)
        t0, t = 0.05, 0.1

        def kernel(x, s):
            return np.sqrt(t0 / s) * np.exp(-x * x / (4.0 * s))

        u0 = ScalarField.from_function(grid, lambda x: kernel(x, t0))
        report = evolve_classical_heat(u0, BoundaryCondition.no_flux(), TimeStepConfig(t_end=t))
        exact = kernel(grid.centers(0), t0 + t)
        self.assertLessEqual(np.abs(report.final.values - exact).max(), 5 * grid.h_min**2)

    def test_large_c_approaches_heat(self):
        u0 = _bump()
        dt = common_dt(GRID, (1e3,))
        config = TimeStepConfig(t_end=0.01, dt=dt)
        heat = evolve_classical_heat(u0, BoundaryCondition.no_flux(), config)
        relativistic = evolve(u0, BoundaryCondition.no_flux(), ModelParams(c=1e3), config)
        self.assertLess(np.abs(heat.final.values - relativistic.final.values).max(), 1e-4)

    def test_infinite_speed(self):
        u0 = ic.compact_bump(GRID, radius=0.2)
        config = TimeStepConfig(t_end=0.001, dt=0.001, method=TimeMethod.IMPLICIT_EULER)
        report = evolve_classical_heat(u0, BoundaryCondition.no_flux(), config)
        self.assertTrue(np.all(report.final.values > 0))


class TestTelegraph(TestCase):
    def test_uniform_steps(self):
        grid = Grid.uniform(100, -1.0, 1.0)
        u0, ut0 = ic.pulse(grid)
        config = TimeStepConfig(t_end=0.1)
        report = evolve_telegraph(u0, ut0, BoundaryCondition.no_flux(), config=config)
        steps = np.diff(report.times)
        np.testing.assert_allclose(steps, steps[0], rtol=1e-9)
        self.assertEqual(0.1, report.t_end)
        self.assertEqual(EquationTag.TELEGRAPH, report.equation_tag)

    def test_converging_pulses_overshoot(self):
        grid = Grid.uniform(200, -1.0, 1.0)
        u0, ut0 = ic.two_pulses(grid)
        config = TimeStepConfig(t_end=0.6)
        report = evolve_telegraph(u0, ut0, BoundaryCondition.no_flux(), config=config)
        self.assertGreater(report.max_series.max(), 0.55)

    def test_single_pulse_front_speed(self):
        grid = Grid.uniform(400, -1.0, 1.0)
        params = ModelParams(c=1.0)
        u0, ut0 = ic.pulse(grid, params, center=-0.5)
        report = evolve_telegraph(
            u0, ut0, BoundaryCondition.no_flux(), params, TimeStepConfig(t_end=0.6)
        )
        speed = measure_front_speed(report)
        self.assertGreater(speed, 0.5)
        self.assertLessEqual(speed, params.c * (1.0 + 2.0 * grid.h_min))

    def test_rejects_mismatched_grids(self):
        u0, _ = ic.pulse(Grid.uniform(100, -1.0, 1.0))
        _, ut0 = ic.pulse(Grid.uniform(50, -1.0, 1.0))
        with self.assertRaises(InvalidParameterError):
            evolve_telegraph(u0, ut0, BoundaryCondition.no_flux())


class TestHelpers(TestCase):
    def test_front_position(self):
        field = ScalarField(Grid.uniform(4, 0.0, 1.0), [1.0, 0.5, 1e-9, 0.0])
        self.assertEqual(0.375, front_position(field, 1e-8))
        self.assertTrue(np.isnan(front_position(field, 2.0)))

    def test_is_constant(self):
        self.assertTrue(is_constant(ScalarField.constant(GRID, 3.0)))
        self.assertFalse(is_constant(_bump()))
