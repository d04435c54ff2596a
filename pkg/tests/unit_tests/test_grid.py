from unittest import TestCase

import numpy as np

from relativistic_heat.exceptions import (
    DomainError,
    InvalidParameterError,
    InvalidStateError,
    NegativeDensityError,
)
from relativistic_heat.features import grid as fv
from relativistic_heat.features.core import ModelParams, q_operator
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField


def _random_field(grid, seed=0, low=0.1, high=2.0):
    rng = np.random.default_rng(seed)
    return ScalarField(grid, rng.uniform(low, high, grid.shape))


def _q_error(n):
    grid = Grid.uniform(n, 0.0, 1.0)
    x = grid.centers(0)
    w = ScalarField(grid, np.sin(np.pi * x))
    bc = BoundaryCondition.dirichlet_function(grid, lambda x: np.sin(np.pi * x))
    p = (np.pi * np.cos(np.pi * x))[:, None]
    hess = (-(np.pi**2) * np.sin(np.pi * x))[:, None, None]
    exact = q_operator(0.0, p, hess)
    return float(np.max(np.abs(fv.discrete_q(w, bc).values - exact)))


class TestGrid(TestCase):
    def test_uniform(self):
        grid = Grid.uniform(10, -1.0, 1.0, dim=2)
        self.assertEqual((10, 10), grid.shape)
        self.assertEqual(100, grid.size)
        self.assertAlmostEqual(0.2, grid.h_min)
        self.assertAlmostEqual(0.04, grid.cell_volume)
        self.assertAlmostEqual(-0.9, grid.centers(1)[0])
        self.assertEqual(11, grid.faces(0).size)

    def test_rejects_bad_extent(self):
        with self.assertRaises(InvalidParameterError):
            Grid.uniform(10, 1.0, 1.0)
        with self.assertRaises(InvalidParameterError):
            Grid.uniform(2)
        with self.assertRaises(InvalidParameterError):
            Grid((4, 4, 4), (0.0,) * 3, (1.0,) * 3)

    def test_field_validation(self):
        grid = Grid.uniform(8)
        with self.assertRaises(InvalidStateError):
            ScalarField(grid, np.ones(7))
        with self.assertRaises(InvalidStateError):
            ScalarField(grid, np.full(8, np.nan))

    def test_field_from_function(self):
        grid = Grid.uniform(4, 0.0, 1.0, dim=2)
        field = ScalarField.from_function(grid, lambda x, y: x + 10 * y)
        self.assertAlmostEqual(0.125 + 10 * 0.875, field.values[0, 3])


class TestBoundaryCondition(TestCase):
    def test_sides(self):
        grid = Grid.uniform(6, dim=2)
        bc = BoundaryCondition.dirichlet_sides(grid, (1.0, 2.0, 3.0, 4.0))
        self.assertTrue(bc.is_dirichlet)
        self.assertEqual(4.0, bc.max_value())
        self.assertEqual(1.0, bc.min_value())
        self.assertEqual((6,), bc.trace(1)[0].shape)

    def test_sides_count(self):
        with self.assertRaises(InvalidParameterError):
            BoundaryCondition.dirichlet_sides(Grid.uniform(6), (1.0, 2.0, 3.0))

    def test_mapped_and_shifted(self):
        grid = Grid.uniform(6)
        bc = BoundaryCondition.dirichlet_sides(grid, (0.0, 1.0))
        self.assertAlmostEqual(np.e, bc.mapped(np.exp).max_value())
        self.assertEqual(-1.0, bc.shifted(-1.0).min_value())
        self.assertIsNone(BoundaryCondition.no_flux().max_value())

    def test_require_positive(self):
        bc = BoundaryCondition.dirichlet_constant(Grid.uniform(6), 0.0)
        with self.assertRaises(InvalidParameterError):
            bc.require_positive()

    def test_grid_mismatch(self):
        bc = BoundaryCondition.dirichlet_constant(Grid.uniform(6, dim=2), 1.0)
        with self.assertRaises(InvalidParameterError):
            bc.check_grid(Grid.uniform(8, dim=2))


class TestStencils(TestCase):
    def test_dirichlet_ghost(self):
        grid = Grid.uniform(4, 0.0, 1.0)
        field = ScalarField(grid, [1.0, 2.0, 3.0, 4.0])
        bc = BoundaryCondition.dirichlet_sides(grid, (0.5, 5.0))
        gradient = fv.face_gradient(field, 0, bc)
        self.assertAlmostEqual(2 * (1.0 - 0.5) / 0.25, gradient[0])
        self.assertAlmostEqual(2 * (5.0 - 4.0) / 0.25, gradient[-1])
        self.assertAlmostEqual(4.0, gradient[1])

    def test_interior_face_gradient(self):
        field = ScalarField(Grid.uniform(4, 0.0, 1.0), [1.0, 2.0, 4.0, 8.0])
        np.testing.assert_allclose([4.0, 8.0, 16.0], fv.face_gradient(field))

    def test_no_flux_walls(self):
        grid = Grid.uniform(8, dim=2)
        fluxes = fv.face_flux(_random_field(grid), BoundaryCondition.no_flux())
        for axis, f in enumerate(fluxes.values):
            self.assertEqual(9, f.shape[axis])
            self.assertTrue(np.all(np.take(f, [0, -1], axis=axis) == 0.0))

    def test_conservation(self):
        for grid in (Grid.uniform(32), Grid.uniform(12, dim=2)):
            field = _random_field(grid, seed=grid.dim)
            div = fv.divergence(fv.face_flux(field, BoundaryCondition.no_flux())).values
            self.assertLess(abs(div.sum()), 1e-13 * np.abs(div).sum())

    def test_constant_field_is_stationary(self):
        grid = Grid.uniform(10, dim=2)
        field = ScalarField.constant(grid, 3.0)
        bc = BoundaryCondition.dirichlet_constant(grid, 3.0)
        div = fv.divergence(fv.face_flux(field, bc)).values
        self.assertTrue(np.allclose(div, 0.0, atol=1e-12))

    def test_face_flux_bound(self):
        grid = Grid.uniform(64)
        field = _random_field(grid, seed=5, low=0.0, high=5.0)
        params = ModelParams(c=0.7)
        f = fv.face_flux(field, BoundaryCondition.no_flux(), params).values[0][1:-1]
        neighbours = np.maximum(field.values[:-1], field.values[1:])
        self.assertTrue(np.all(np.abs(f) <= params.c * neighbours * (1 + 1e-14)))

    def test_face_flux_classical_limit(self):
        grid = Grid.uniform(16)
        field = _random_field(grid, seed=2)
        bc = BoundaryCondition.no_flux()
        relativistic = fv.face_flux(field, bc, ModelParams(c=1e9)).values[0]
        classical = fv.face_gradients(field, bc).values[0]
        np.testing.assert_allclose(classical, relativistic, rtol=1e-6, atol=1e-12)

    def test_negative_density(self):
        grid = Grid.uniform(4)
        with self.assertRaises(NegativeDensityError):
            fv.face_flux(ScalarField(grid, [1.0, -1.0, 1.0, 1.0]), BoundaryCondition.no_flux())

    def test_laplacian_of_linear_data(self):
        grid = Grid.uniform(16, 0.0, 1.0, dim=2)
        field = ScalarField.from_function(grid, lambda x, y: 2 * x - y)
        bc = BoundaryCondition.dirichlet_function(grid, lambda x, y: 2 * x - y)
        lap = fv.discrete_laplacian(field, bc).values
        self.assertLess(np.abs(lap).max(), 1e-9)

    def test_laplacian_system(self):
        for grid in (Grid.uniform(9, -1.0, 1.0), Grid.uniform(7, 0.0, 2.0, dim=2)):
            field = _random_field(grid, seed=11)
            for bc in (
                BoundaryCondition.no_flux(),
                BoundaryCondition.dirichlet_function(grid, lambda *x: 1.0 + x[0]),
            ):
                matrix, b = fv.laplacian_system(grid, bc)
                expected = fv.discrete_laplacian(field, bc).values.ravel()
                np.testing.assert_allclose(expected, matrix @ field.values.ravel() + b, atol=1e-9)

    def test_discrete_q_order(self):
        order = np.log2(_q_error(32) / _q_error(64))
        self.assertGreater(order, 1.9)

    def test_cell_derivatives_of_quadratic(self):
        grid = Grid.uniform(8, 0.0, 1.0, dim=2)

        def fn(x, y):
            return x * y + 0.5 * x * x

        field = ScalarField.from_function(grid, fn)
        grad, hess = fv.cell_derivatives(field, BoundaryCondition.dirichlet_function(grid, fn))
        np.testing.assert_allclose(1.0, hess[2:-2, 2:-2, 0, 1], rtol=1e-10)
        np.testing.assert_allclose(1.0, hess[2:-2, 2:-2, 0, 0], rtol=1e-10)
        x, y = grid.mesh()
        np.testing.assert_allclose((y + x)[2:-2, 2:-2], grad[2:-2, 2:-2, 0], rtol=1e-10)


class TestDiagnostics(TestCase):
    def test_mass_and_entropy(self):
        grid = Grid.uniform(4, 0.0, 2.0)
        field = ScalarField(grid, [0.0, 1.0, np.e, 2.0])
        self.assertAlmostEqual(0.5 * (3.0 + np.e), fv.mass(field))
        self.assertAlmostEqual(0.5 * (np.e + 2 * np.log(2.0)), fv.entropy(field))

    def test_entropy_rejects_negative(self):
        with self.assertRaises(NegativeDensityError):
            fv.entropy(ScalarField(Grid.uniform(4), [1.0, -1.0, 0.0, 0.0]))

    def test_extrema(self):
        field = ScalarField(Grid.uniform(4, dim=2), np.arange(16.0))
        low, high, argmin, argmax = fv.extrema(field)
        self.assertEqual((0.0, 15.0), (low, high))
        self.assertEqual(((0, 0), (3, 3)), (argmin, argmax))

    def test_flux_balance_of_constant(self):
        grid = Grid.uniform(20, dim=2)
        field = ScalarField.constant(grid, 1.5)
        self.assertEqual(0.0, fv.flux_balance_sphere(field, (0.5, 0.5), 0.3))

    def test_flux_balance_equals_enclosed_divergence(self):
        grid = Grid.uniform(20, dim=2)
        field = _random_field(grid, seed=4)
        bc = BoundaryCondition.no_flux()
        mask = fv.ball_mask(grid, (0.5, 0.5), 0.3)
        div = fv.divergence(fv.face_flux(field, bc)).values
        expected = float(np.sum(div[mask])) * grid.cell_volume
        self.assertAlmostEqual(expected, fv.flux_balance_sphere(field, (0.5, 0.5), 0.3), places=10)

    def test_ball_outside_domain(self):
        grid = Grid.uniform(20, dim=2)
        with self.assertRaises(DomainError):
            fv.ball_mask(grid, (0.1, 0.5), 0.3)
        with self.assertRaises(DomainError):
            fv.ball_mask(grid, (0.5,), 0.1)
