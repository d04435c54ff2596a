"""Relativistically harmonic functions: Dirichlet solver, 1D shooting oracle
and the elliptic maximum / comparison / tangency checks.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse.linalg as spla
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import bisect

from relativistic_heat.constants.equation import DiscreteForm
from relativistic_heat.constants.tolerances import (
    CONSTANT_FIELD_TOL,
    NEWTON_TOL,
    SHOOTING_MAX_SLOPE,
    SHOOTING_MISMATCH,
    STATIONARY_NEWTON_MAX_ITER,
    spatial_tolerance,
)
from relativistic_heat.exceptions import (
    BracketError,
    ConvergenceError,
    GridMismatchError,
    InvalidParameterError,
)
from relativistic_heat.features import grid as fv
from relativistic_heat.features.checks import CheckResult
from relativistic_heat.features.core import DEFAULT_PARAMS, ModelParams
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField
from relativistic_heat.utils.io import write_json
from relativistic_heat.utils.newton import NewtonIterate, damped_newton

logger = logging.getLogger(__name__)

BLOWN_UP = -1e300


@dataclass(frozen=True)
class StationaryProblem:
    grid: Grid
    bc: BoundaryCondition
    initial_guess: Optional[ScalarField] = None
    newton_tol: float = NEWTON_TOL
    newton_max_iter: int = STATIONARY_NEWTON_MAX_ITER
    form: DiscreteForm = DiscreteForm.Q

    def __post_init__(self):
        object.__setattr__(self, "form", DiscreteForm(self.form))
        if not self.bc.is_dirichlet:
            raise InvalidParameterError(
                "stationary problems need dirichlet data", "boundary"
            )
        self.bc.check_grid(self.grid)
        if self.initial_guess is not None and self.initial_guess.grid != self.grid:
            raise GridMismatchError("mismatched discretization: initial guess")
        if not self.newton_tol > 0:
            raise InvalidParameterError("must be > 0", "newton_tol")
        if int(self.newton_max_iter) < 1:
            raise InvalidParameterError("must be >= 1", "newton_max_iter")


@dataclass
class StationarySolution:
    w: ScalarField
    residual_norm: float
    iterations: int
    history: List[NewtonIterate]
    form: DiscreteForm

    @property
    def u(self) -> ScalarField:
        return self.w.with_values(np.exp(self.w.values))

    def convergence_log(self) -> List[dict]:
        return [it.to_dict() for it in self.history]


def laplace_interpolant(grid: Grid, bc: BoundaryCondition) -> ScalarField:
    """Discrete harmonic (Δ_h w = 0) extension of the Dirichlet data."""
    if not bc.is_dirichlet:
        raise InvalidParameterError("laplace interpolant needs dirichlet data", "boundary")
    low, high = bc.min_value(), bc.max_value()
    if low == high:
        return ScalarField.constant(grid, low)
    matrix, b = fv.laplacian_system(grid, bc)
    return ScalarField(grid, spla.spsolve(matrix.tocsc(), -b))


def q_residual(
    w: np.ndarray, grid: Grid, bc: BoundaryCondition, params: ModelParams
) -> np.ndarray:
    return fv.discrete_q(ScalarField(grid, w), bc, params).values


def flux_residual(
    w: np.ndarray, grid: Grid, bc_u: BoundaryCondition, params: ModelParams
) -> np.ndarray:
    u = ScalarField(grid, np.exp(w))
    return fv.divergence(fv.face_flux(u, bc_u, params)).values


def solve(problem: StationaryProblem, params: ModelParams = DEFAULT_PARAMS) -> StationarySolution:
    """Damped Newton on the chosen discrete form.

    Both forms are second order. The Q form carries a larger boundary-stencil
    constant: against the shooting profile w(0) = 0, w(1) = -0.5 at h = 1/200 it
    lands near 2.4e-6, the FLUX form below 1e-6. Use ``form="flux"`` when the
    1e-6 level matters.
    """
    grid = problem.grid
    guess = problem.initial_guess or laplace_interpolant(grid, problem.bc)

    if problem.form is DiscreteForm.FLUX:
        bc_u = problem.bc.mapped(np.exp)

        def residual(w):
            return flux_residual(w, grid, bc_u, params)

    else:

        def residual(w):
            return q_residual(w, grid, problem.bc, params)

    try:
        result = damped_newton(
            residual, guess.values, problem.newton_tol, problem.newton_max_iter, grid.h
        )
    except ConvergenceError as e:
        logger.error("stationary %s solve failed: %s", problem.form.value, e)
        raise

    logger.info(
        "stationary %s solve on %s cells: %d iterations, residual %.3e",
        problem.form.value,
        "x".join(str(k) for k in grid.n),
        result.iterations,
        result.residual_norm,
    )
    return StationarySolution(
        w=ScalarField(grid, result.x),
        residual_norm=result.residual_norm,
        iterations=result.iterations,
        history=result.history,
        form=problem.form,
    )


def solve_harmonic(
    problem: StationaryProblem, params: ModelParams = DEFAULT_PARAMS
) -> ScalarField:
    """The w field of ``solve``; the problem's form decides the accuracy, see ``solve``."""
    return solve(problem, params).w


@dataclass
class ShootingProfile:
    x: np.ndarray
    w: np.ndarray
    p: np.ndarray
    slope: float
    mismatch: float

    def at(self, x):
        spline = CubicHermiteSpline(self.x, self.w, self.p)
        result = spline(x)
        return float(result) if np.ndim(result) == 0 else result


def _rk4(
    w0: float, slope: float, lower: float, upper: float, n_steps: int, inv_c2: float, keep: bool
):
    h = (upper - lower) / n_steps

    def rhs(p):
        return -p * p * (1.0 + inv_c2 * p * p)

    w, p = w0, slope
    ws, ps = ([w], [p]) if keep else (None, None)
    for _ in range(n_steps):
        k1w, k1p = p, rhs(p)
        p2 = p + 0.5 * h * k1p
        k2w, k2p = p2, rhs(p2)
        p3 = p + 0.5 * h * k2p
        k3w, k3p = p3, rhs(p3)
        p4 = p + h * k3p
        k4w, k4p = p4, rhs(p4)
        w += h * (k1w + 2.0 * k2w + 2.0 * k3w + k4w) / 6.0
        p += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        if not (math.isfinite(w) and math.isfinite(p)):
            return BLOWN_UP, ws, ps
        if keep:
            ws.append(w)
            ps.append(p)
    return w, ws, ps


def shoot_1d(
    w_left: float,
    w_right: float,
    params: ModelParams = DEFAULT_PARAMS,
    n_steps: int = 2000,
    lower: float = 0.0,
    upper: float = 1.0,
) -> ShootingProfile:
    """Solve w'' = -(w')^2 (1 + c^-2 (w')^2) on [lower, upper] by shooting on w'(lower).

    w(upper) increases with the initial slope, so the slope is bracketed by
    geometric expansion and then bisected.
    """
    if not (math.isfinite(w_left) and math.isfinite(w_right)):
        raise InvalidParameterError("boundary values must be finite", "boundary")
    if n_steps < 2:
        raise InvalidParameterError("must be >= 2", "n_steps")
    x = np.linspace(lower, upper, n_steps + 1)
    if w_left == w_right:
        flat = np.full(x.shape, float(w_left))
        return ShootingProfile(x, flat, np.zeros(x.shape), 0.0, 0.0)

    inv_c2 = params.inv_c2

    def miss(slope):
        return _rk4(w_left, slope, lower, upper, n_steps, inv_c2, False)[0] - w_right

    scale = max(1.0, abs(w_right - w_left) / (upper - lower))
    lo, hi = -scale, scale
    while miss(lo) > 0:
        lo *= 2.0
        if abs(lo) > SHOOTING_MAX_SLOPE:
            raise BracketError("no slope reaches w_right from below", (lo, hi))
    while miss(hi) < 0:
        lo = max(lo, hi)
        hi *= 2.0
        if hi > SHOOTING_MAX_SLOPE:
            raise BracketError(
                "w_right={} lies above every reachable value".format(w_right), (lo, hi)
            )

    slope = bisect(miss, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    end, ws, ps = _rk4(w_left, slope, lower, upper, n_steps, inv_c2, True)
    mismatch = abs(end - w_right)
    if mismatch > SHOOTING_MISMATCH:
        raise ConvergenceError(
            "shooting mismatch {:.3e} above {:.0e}".format(mismatch, SHOOTING_MISMATCH),
            residual=mismatch,
        )
    logger.debug("shoot_1d: slope %.17g, mismatch %.3e", slope, mismatch)
    return ShootingProfile(x, np.array(ws), np.array(ps), float(slope), float(mismatch))


def freeze_oracle_fixture(
    path,
    w_left: float = 0.0,
    w_right: float = -0.5,
    params: ModelParams = DEFAULT_PARAMS,
    n_steps: int = 100000,
    points: Sequence[float] = (0.25, 0.5, 0.75),
) -> dict:
    profile = shoot_1d(w_left, w_right, params, n_steps)
    payload = {
        "generator": "shoot_1d",
        "w_left": w_left,
        "w_right": w_right,
        "c": params.c,
        "n_steps": n_steps,
        "slope": profile.slope,
        "mismatch": profile.mismatch,
        "values": [{"x": float(x), "w": profile.at(x)} for x in points],
    }
    write_json(path, payload)
    return payload


def _is_constant(values: np.ndarray) -> bool:
    return float(values.max() - values.min()) <= CONSTANT_FIELD_TOL * max(
        1.0, float(np.abs(values).max())
    )


def verify_strong_max(w: ScalarField, bc: BoundaryCondition) -> CheckResult:
    """Interior values stay within the boundary extrema unless w is constant."""
    if not bc.is_dirichlet:
        raise InvalidParameterError("strong max check needs dirichlet data", "boundary")
    tol = spatial_tolerance(w.grid.h_min)
    if _is_constant(w.values):
        return CheckResult("strong_max", 0.0, tol, {"mode": "constant"})

    b_max, b_min = bc.max_value(), bc.min_value()
    above = float(w.values.max()) - b_max
    below = b_min - float(w.values.min())
    return CheckResult(
        "strong_max",
        max(above, below, 0.0),
        tol,
        {
            "mode": "bounded",
            "interior_max": float(w.values.max()),
            "interior_min": float(w.values.min()),
            "boundary_max": b_max,
            "boundary_min": b_min,
        },
    )


def _same_grid(a: ScalarField, b: ScalarField):
    if a.grid != b.grid:
        raise GridMismatchError("mismatched discretization")


def _boundary_ordered(bc: BoundaryCondition, bc_prime: BoundaryCondition) -> bool:
    return all(
        np.all(lo <= hi) for lo, hi in zip(bc.dirichlet_values, bc_prime.dirichlet_values)
    )


def _boundary_equal(bc: BoundaryCondition, bc_prime: BoundaryCondition) -> bool:
    return all(
        np.array_equal(lo, hi)
        for lo, hi in zip(bc.dirichlet_values, bc_prime.dirichlet_values)
    )


def verify_comparison_elliptic(
    w: ScalarField,
    w_prime: ScalarField,
    residual_tol: float,
    bc: BoundaryCondition,
    bc_prime: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
) -> CheckResult:
    """w <= w' on the boundary and Qw >= Qw' - residual_tol imply w <= w' inside."""
    _same_grid(w, w_prime)
    tol = spatial_tolerance(w.grid.h_min) + residual_tol
    gap = w_prime.values - w.values
    context = {"min_gap": float(gap.min()), "max_gap": float(gap.max())}

    q = fv.discrete_q(w, bc, params).values
    q_prime = fv.discrete_q(w_prime, bc_prime, params).values
    hypothesis = _boundary_ordered(bc, bc_prime) and bool(
        np.all(q >= q_prime - residual_tol)
    )
    context["hypothesis"] = hypothesis
    if not hypothesis:
        return CheckResult("comparison_elliptic", 0.0, tol, context)
    return CheckResult("comparison_elliptic", max(0.0, -float(gap.min())), tol, context)


def verify_tangency(
    w: ScalarField,
    w_prime: ScalarField,
    bc: BoundaryCondition,
    bc_prime: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
    residual_tol: float = NEWTON_TOL,
) -> CheckResult:
    """Ordered solutions with distinct boundary data never touch inside."""
    _same_grid(w, w_prime)
    gap = w_prime.values - w.values
    min_gap = float(gap.min())
    argmin = np.unravel_index(np.argmin(gap), gap.shape)
    context = {"min_gap": min_gap, "argmin": [int(i) for i in argmin]}

    if _boundary_equal(bc, bc_prime):
        context["mode"] = "coincide"
        return CheckResult(
            "tangency", float(np.abs(gap).max()), spatial_tolerance(w.grid.h_min), context
        )
    if not _boundary_ordered(bc, bc_prime):
        raise InvalidParameterError("boundary data are not ordered", "boundary")

    q = fv.discrete_q(w, bc, params).values
    q_prime = fv.discrete_q(w_prime, bc_prime, params).values
    context["hypothesis"] = bool(np.all(q >= q_prime - residual_tol))
    context["mode"] = "separated"
    if min_gap > 0:
        return CheckResult("tangency", 0.0, 0.0, context)
    return CheckResult("tangency", max(-min_gap, np.finfo(float).eps), 0.0, context)
