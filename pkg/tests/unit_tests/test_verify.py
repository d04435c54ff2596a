import dataclasses
from unittest import TestCase

import numpy as np

from relativistic_heat.constants.equation import TimeMethod, Verdict
from relativistic_heat.exceptions import (
    DomainError,
    DomainTooSmallError,
    GridMismatchError,
    InvalidParameterError,
)
from relativistic_heat.features import initial_conditions as ic
from relativistic_heat.features import verify as vf
from relativistic_heat.features.checks import CheckResult
from relativistic_heat.features.core import ModelParams
from relativistic_heat.features.evolve import TimeStepConfig, evolve, evolve_classical_heat
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField

GRID = Grid.uniform(40, -1.0, 1.0)
NO_FLUX = BoundaryCondition.no_flux()


def _bump(grid=GRID, floor=0.1, width=0.2):
    return ic.gaussian_bump(grid, amplitude=1.0, width=width, floor=floor)


class TestCheckResult(TestCase):
    def test_passed_is_derived(self):
        self.assertTrue(CheckResult("a", 1e-3, 1e-3).passed)
        self.assertFalse(CheckResult("a", 2e-3, 1e-3).passed)

    def test_non_finite_violation_fails(self):
        result = CheckResult("a", float("nan"), 1.0)
        self.assertEqual(float("inf"), result.violation)
        self.assertFalse(result.passed)

    def test_to_dict(self):
        payload = CheckResult("a", np.float64(0.5), 1, {"x": np.arange(2)}).to_dict()
        keys = {"name", "passed", "violation", "tolerance", "exploratory", "context"}
        self.assertEqual(keys, set(payload))
        self.assertEqual([0, 1], payload["context"]["x"])
        self.assertIsInstance(payload["violation"], float)


class TestParabolicChecks(TestCase):
    def test_weak_max(self):
        report = evolve(_bump(), NO_FLUX, config=TimeStepConfig(t_end=0.05))
        self.assertTrue(vf.check_weak_max(report).passed)

    def test_weak_max_with_dirichlet(self):
        bc = BoundaryCondition.dirichlet_sides(GRID, (0.2, 0.8))
        report = evolve(_bump(), bc, config=TimeStepConfig(t_end=0.05))
        result = vf.check_weak_max(report)
        self.assertTrue(result.passed)
        self.assertAlmostEqual(0.1, result.context["boundary_min"], places=4)

    def test_comparison(self):
        config = TimeStepConfig(t_end=0.05, snapshot_every=1)
        low = evolve(_bump(width=0.1), NO_FLUX, config=config)
        high = evolve(_bump(width=0.2), NO_FLUX, config=config)
        result = vf.check_comparison_parabolic(low, high)
        self.assertTrue(result.passed)
        self.assertEqual(low.times.size, result.context["compared_times"])
        self.assertFalse(vf.check_comparison_parabolic(high, low).passed)

    def test_comparison_needs_every_time_level(self):
        config = TimeStepConfig(t_end=0.05, snapshot_every=10)
        low = evolve(_bump(width=0.1), NO_FLUX, config=config)
        high = evolve(_bump(width=0.2), NO_FLUX, config=config)
        with self.assertRaises(InvalidParameterError) as e:
            vf.check_comparison_parabolic(low, high)
        self.assertEqual("time.snapshot_every", e.exception.field)

    def test_comparison_catches_intermediate_crossing(self):
        config = TimeStepConfig(t_end=0.05, snapshot_every=1)
        low = evolve(_bump(width=0.1), NO_FLUX, config=config)
        high = evolve(_bump(width=0.2), NO_FLUX, config=config)
        snapshots = list(high.snapshots)
        middle = len(snapshots) // 2
        t, field = snapshots[middle]
        snapshots[middle] = (t, field.with_values(low.snapshots[middle][1].values - 0.1))
        crossed = dataclasses.replace(high, snapshots=snapshots)
        np.testing.assert_array_equal(high.final.values, crossed.final.values)
        result = vf.check_comparison_parabolic(low, crossed)
        self.assertFalse(result.passed)
        self.assertAlmostEqual(0.1, result.violation, places=12)

    def test_comparison_needs_same_grid(self):
        config = TimeStepConfig(t_end=0.01)
        a = evolve(_bump(), NO_FLUX, config=config)
        other = Grid.uniform(20, -1.0, 1.0)
        b = evolve(_bump(other), NO_FLUX, config=config)
        with self.assertRaises(GridMismatchError):
            vf.check_comparison_parabolic(a, b)

    def test_uniqueness(self):
        explicit = evolve(_bump(), NO_FLUX, config=TimeStepConfig(t_end=0.02))
        implicit = evolve(
            _bump(),
            NO_FLUX,
            config=TimeStepConfig(t_end=0.02, method=TimeMethod.IMPLICIT_EULER),
        )
        self.assertTrue(vf.check_uniqueness(explicit, implicit).passed)


class TestPropagation(TestCase):
    def test_relativistic_front_is_finite(self):
        grid = Grid.uniform(200, -1.0, 1.0)
        u0 = ic.compact_bump(grid, amplitude=1.0, radius=0.2)
        report = evolve(u0, NO_FLUX, config=TimeStepConfig(t_end=0.3))
        speed = vf.measure_front_speed(report)
        self.assertGreater(speed, 0.0)
        self.assertLess(speed, 1.3)

    def test_front_speed_over_late_window(self):
        grid = Grid.uniform(400, -1.0, 1.0)
        u0 = ic.compact_bump(grid, amplitude=1.0, center=-0.7, radius=0.2)
        config = TimeStepConfig(t_end=1.3, front_threshold=1e-6)
        report = evolve(u0, NO_FLUX, config=config)
        speed = vf.measure_front_speed(report)
        self.assertGreater(speed, 0.8)
        self.assertLess(speed, 1.1)

    def test_no_front(self):
        zero = ScalarField.constant(GRID, 0.0)
        report = evolve(zero, NO_FLUX, config=TimeStepConfig(t_end=0.01))
        self.assertEqual(0.0, vf.measure_front_speed(report))

    def test_domain_too_small(self):
        u0 = ic.compact_bump(GRID, center=0.9, radius=0.2)
        report = evolve(u0, NO_FLUX, config=TimeStepConfig(t_end=0.01))
        with self.assertRaises(DomainTooSmallError):
            vf.measure_front_speed(report)

    def test_classical_front_outruns_light(self):
        grid = Grid.uniform(200, -1.0, 1.0)
        u0 = ic.compact_bump(grid, amplitude=1.0, radius=0.2)
        report = evolve_classical_heat(u0, NO_FLUX, TimeStepConfig(t_end=0.002))
        self.assertGreater(vf.measure_front_speed(report), 1.0)


class TestTelegraph(TestCase):
    def test_counterexample(self):
        result = vf.telegraph_counterexample()
        self.assertTrue(result.passed)
        self.assertGreater(result.context["peak"], 0.55)

    def test_weak_max_fails_for_telegraph(self):
        report = vf.telegraph_two_pulse_run()
        self.assertFalse(vf.check_weak_max(report).passed)

    def test_single_pulse_control(self):
        self.assertTrue(vf.telegraph_single_pulse_control().passed)

    def test_relativistic_contrast(self):
        grid = Grid.uniform(100, -1.0, 1.0)
        self.assertTrue(vf.relativistic_contrast(grid=grid).passed)


class TestClassicalLimit(TestCase):
    def test_distance_shrinks(self):
        table = vf.classical_limit_study(_bump(floor=0.5), NO_FLUX, 0.01)
        self.assertEqual(["c", "distance", "distance_c2"], list(table.columns))
        self.assertTrue(vf.check_classical_limit(table).passed)
        self.assertTrue(np.all(np.diff(table["distance"]) < 0))


class TestLightCone(TestCase):
    def setUp(self):
        self.config = TimeStepConfig(t_end=0.1, snapshot_every=10)
        self.params = ModelParams(c=1.0)

    def test_constant_run_is_consistent(self):
        report = evolve(ScalarField.constant(GRID, 2.0), NO_FLUX, self.params, self.config)
        evidence = vf.light_cone_probe(report, (0.0, 0.05))
        self.assertEqual(Verdict.CONSISTENT, evidence.verdict)
        self.assertTrue(evidence.to_dict()["exploratory"])
        self.assertGreater(evidence.cone_cells, 0)

    def test_flat_cone_with_varying_exterior(self):
        report = evolve(ScalarField.constant(GRID, 1.0), NO_FLUX, self.params, self.config)
        apex_time = max(t for t, _ in report.snapshots if t <= 0.05 + 1e-12)
        centre = GRID.centers(0)[int((0.0 - GRID.lower[0]) / GRID.h[0])]
        distance = np.abs(GRID.centers(0) - centre)
        snapshots = [
            (t, f.with_values(1.0 - 0.5 * np.maximum(0.0, distance - (apex_time - t))))
            for t, f in report.snapshots
        ]
        shaped = dataclasses.replace(report, snapshots=snapshots)
        evidence = vf.light_cone_probe(shaped, (0.0, 0.05))
        self.assertEqual(Verdict.CONSISTENT, evidence.verdict)
        self.assertAlmostEqual(0.0, evidence.max_deviation_in_cone, places=10)
        self.assertGreater(evidence.deviation_outside_cone, 0.0)
        self.assertEqual(centre, evidence.apex[0][0])

    def test_decaying_peak_is_inconclusive(self):
        report = evolve(_bump(), NO_FLUX, self.params, self.config)
        evidence = vf.light_cone_probe(report, (0.0, 0.05))
        self.assertEqual(Verdict.INCONCLUSIVE, evidence.verdict)

    def test_apex_outside_domain(self):
        report = evolve(_bump(), NO_FLUX, self.params, self.config)
        with self.assertRaises(DomainError):
            vf.light_cone_probe(report, (0.0, 1.0))
        with self.assertRaises(DomainError):
            vf.light_cone_probe(report, (2.0, 0.05))

    def test_tangency_needs_contact(self):
        low = evolve(_bump(), NO_FLUX, self.params, self.config)
        high = evolve(_bump(floor=0.2), NO_FLUX, self.params, self.config)
        evidence = vf.light_cone_tangency_probe(low, high, (0.0, 0.05))
        self.assertEqual(Verdict.INCONCLUSIVE, evidence.verdict)
        self.assertFalse(evidence.context["touching"])


class TestClassifyRun(TestCase):
    def test_shares_sum_to_one(self):
        config = TimeStepConfig(t_end=0.05, snapshot_every=5)
        report = evolve(_bump(floor=0.3), NO_FLUX, config=config)
        table = vf.classify_run(report)
        self.assertEqual(len(report.snapshots) - 1, len(table))
        shares = table[["subsolution", "supersolution", "solution"]].sum(axis=1)
        np.testing.assert_allclose(1.0, shares)

    def test_boundary_is_explicit_or_from_report(self):
        config = TimeStepConfig(t_end=0.02, snapshot_every=5)
        bc = BoundaryCondition.dirichlet_sides(GRID, (0.3, 0.6))
        report = evolve(_bump(floor=0.3), bc, config=config)
        implied = vf.classify_run(report)
        explicit = vf.classify_run(report, bc)
        self.assertTrue(implied.equals(explicit))
        planar = BoundaryCondition.dirichlet_constant(Grid.uniform(8, dim=2), 1.0)
        with self.assertRaises(InvalidParameterError):
            vf.classify_run(report, planar)
