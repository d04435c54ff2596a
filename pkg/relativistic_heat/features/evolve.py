"""Time integration of the relativistic heat equation and its two baselines.

All three integrators share one bookkeeping path (``_Recorder``) so their
reports line up cell for cell and time for time, which the comparison
checks in ``verify`` rely on.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from relativistic_heat.constants.equation import EquationTag, TimeMethod
from relativistic_heat.constants.tolerances import (
    CFL_HYPERBOLIC,
    CFL_PARABOLIC,
    CLIP_FLOOR,
    CONSTANT_FIELD_TOL,
    FRONT_THRESHOLD,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
)
from relativistic_heat.exceptions import (
    BlowUpError,
    CFLViolationError,
    InvalidParameterError,
    NegativeDensityError,
)
from relativistic_heat.features import grid as fv
from relativistic_heat.features.core import DEFAULT_PARAMS, ModelParams, u_to_w
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField
from relativistic_heat.utils.newton import NewtonResult, damped_newton

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeStepConfig:
    method: TimeMethod = TimeMethod.EXPLICIT_EULER
    t_end: float = 1.0
    cfl_parabolic: float = CFL_PARABOLIC
    cfl_hyperbolic: float = CFL_HYPERBOLIC
    newton_tol: float = NEWTON_TOL
    newton_max_iter: int = NEWTON_MAX_ITER
    snapshot_times: Tuple[float, ...] = ()
    dt: Optional[float] = None
    front_threshold: float = FRONT_THRESHOLD
    snapshot_every: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "method", TimeMethod(self.method))
        object.__setattr__(
            self, "snapshot_times", tuple(float(s) for s in self.snapshot_times)
        )
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise InvalidParameterError("must be > 0", "t_end")
        if not (0 < self.cfl_parabolic <= 0.5):
            raise InvalidParameterError("must lie in (0, 0.5]", "cfl_parabolic")
        if not (0 < self.cfl_hyperbolic <= 1):
            raise InvalidParameterError("must lie in (0, 1]", "cfl_hyperbolic")
        if not self.newton_tol > 0:
            raise InvalidParameterError("must be > 0", "newton_tol")
        if int(self.newton_max_iter) < 1:
            raise InvalidParameterError("must be >= 1", "newton_max_iter")
        if self.dt is not None and not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidParameterError("must be > 0", "dt")
        if not self.front_threshold > 0:
            raise InvalidParameterError("must be > 0", "front_threshold")
        if self.snapshot_every is not None and int(self.snapshot_every) < 1:
            raise InvalidParameterError("must be >= 1", "snapshot_every")
        for s in self.snapshot_times:
            if not (0 <= s <= self.t_end):
                raise InvalidParameterError(
                    "{} lies outside [0, t_end]".format(s), "snapshot_times"
                )


@dataclass
class RunReport:
    times: np.ndarray
    mass_series: np.ndarray
    entropy_series: np.ndarray
    max_series: np.ndarray
    min_series: np.ndarray
    front_position_series: Optional[np.ndarray]
    snapshots: List[Tuple[float, ScalarField]]
    equation_tag: EquationTag
    params: Optional[ModelParams]
    grid: Grid
    dt: float
    boundary: BoundaryCondition
    initial: ScalarField
    final: ScalarField
    clip_count: int = 0
    newton_iterations: int = 0
    front_threshold: float = FRONT_THRESHOLD
    method: Optional[TimeMethod] = None

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def to_frame(self) -> pd.DataFrame:
        front = self.front_position_series
        if front is None:
            front = np.full(self.times.shape, np.nan)
        return pd.DataFrame(
            {
                "t": self.times,
                "mass": self.mass_series,
                "entropy": self.entropy_series,
                "max": self.max_series,
                "min": self.min_series,
                "front": front,
            }
        )

    def snapshot_at(self, t: float) -> ScalarField:
        """The recorded snapshot closest to ``t``."""
        times = np.array([s for s, _ in self.snapshots])
        return self.snapshots[int(np.argmin(np.abs(times - t)))][1]


def _entropy_or_nan(field: ScalarField) -> float:
    if np.any(field.values < 0):
        return float("nan")
    return fv.entropy(field)


def front_position(field: ScalarField, threshold: float) -> float:
    """Center of the rightmost cell above ``threshold``; NaN when there is none."""
    above = np.nonzero(field.values > threshold)[0]
    if above.size == 0:
        return float("nan")
    return float(field.grid.centers(0)[above[-1]])


def _time_levels(t_end: float, dt: float) -> np.ndarray:
    steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    times = dt * np.arange(steps + 1)
    times[-1] = t_end
    return times


class _Recorder:
    def __init__(self, times: np.ndarray, grid: Grid, config: TimeStepConfig):
        self.times = times
        self.grid = grid
        self.config = config
        self.mass = []
        self.entropy = []
        self.max = []
        self.min = []
        self.front = [] if grid.dim == 1 else None
        self.snapshots: Dict[int, ScalarField] = {}

        wanted = {0, times.size - 1}
        for s in config.snapshot_times:
            wanted.add(int(np.argmin(np.abs(times - s))))
        if config.snapshot_every:
            wanted.update(range(0, times.size, int(config.snapshot_every)))
        self.wanted = wanted

    def record(self, step: int, field: ScalarField):
        self.mass.append(fv.mass(field))
        self.entropy.append(_entropy_or_nan(field))
        low, high, _, _ = fv.extrema(field)
        self.max.append(high)
        self.min.append(low)
        if self.front is not None:
            self.front.append(front_position(field, self.config.front_threshold))
        if step in self.wanted:
            self.snapshots[step] = field.copy()

    def report(self, **kwargs) -> RunReport:
        return RunReport(
            times=self.times.copy(),
            mass_series=np.array(self.mass),
            entropy_series=np.array(self.entropy),
            max_series=np.array(self.max),
            min_series=np.array(self.min),
            front_position_series=None if self.front is None else np.array(self.front),
            snapshots=[(float(self.times[k]), f) for k, f in sorted(self.snapshots.items())],
            grid=self.grid,
            front_threshold=self.config.front_threshold,
            method=self.config.method,
            **kwargs,
        )


def stable_dt(
    field: ScalarField,
    params: ModelParams = DEFAULT_PARAMS,
    config: TimeStepConfig = TimeStepConfig(),
) -> float:
    if np.any(field.values < 0):
        raise NegativeDensityError("negative density")
    grid = field.grid
    h = grid.h_min
    return min(
        config.cfl_parabolic * h * h / grid.dim,
        config.cfl_hyperbolic * h / params.c,
    )


def _explicit_update(
    field: ScalarField, bc: BoundaryCondition, params: ModelParams, dt: float
) -> Tuple[ScalarField, int]:
    change = fv.divergence(fv.face_flux(field, bc, params)).values
    with np.errstate(over="ignore", invalid="ignore"):
        values = field.values + dt * change
    if not np.all(np.isfinite(values)):
        raise BlowUpError("blow-up: dt too large")
    if np.any(values < -CLIP_FLOOR):
        raise BlowUpError(
            "blow-up: dt too large (value {:.3e} below zero)".format(float(values.min()))
        )
    clipped = values < 0
    clips = int(np.count_nonzero(clipped))
    if clips:
        values = np.where(clipped, 0.0, values)
    return field.with_values(values), clips


def step_explicit(
    field: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
    dt: float = None,
) -> ScalarField:
    """Forward Euler, u + dt div F(u). Roundoff negatives are clipped to 0."""
    if dt is None:
        dt = stable_dt(field, params)
    return _explicit_update(field, bc, params, dt)[0]


def _implicit_solve(
    field: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams,
    dt: float,
    tol: float,
    max_iter: int,
) -> NewtonResult:
    grid = field.grid
    u_old = field.values

    def residual(w: np.ndarray) -> np.ndarray:
        u = ScalarField(grid, np.exp(w))
        return u.values - u_old - dt * fv.divergence(fv.face_flux(u, bc, params)).values

    w0 = u_to_w(u_old)
    return damped_newton(residual, w0, tol, max_iter, grid.h)


def step_implicit(
    field: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
    dt: float = None,
    newton_tol: float = NEWTON_TOL,
    newton_max_iter: int = NEWTON_MAX_ITER,
) -> ScalarField:
    """Backward Euler solved for w = log u_new; requires u > 0."""
    if dt is None:
        dt = stable_dt(field, params)
    result = _implicit_solve(field, bc, params, dt, newton_tol, newton_max_iter)
    return field.with_values(np.exp(result.x))


def _check_inputs(initial: ScalarField, bc: BoundaryCondition):
    bc.check_grid(initial.grid)
    if np.any(initial.values < 0):
        raise NegativeDensityError("negative density")
    bc.require_positive()


def evolve(
    initial: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
    config: TimeStepConfig = TimeStepConfig(),
) -> RunReport:
    _check_inputs(initial, bc)
    implicit = config.method is TimeMethod.IMPLICIT_EULER
    if implicit:
        u_to_w(initial.values)

    dt = config.dt or stable_dt(initial, params, config)
    times = _time_levels(config.t_end, dt)
    recorder = _Recorder(times, initial.grid, config)

    field = initial.copy()
    recorder.record(0, field)
    clips = 0
    iterations = 0
    for k in range(1, times.size):
        step = float(times[k] - times[k - 1])
        if implicit:
            result = _implicit_solve(
                field, bc, params, step, config.newton_tol, config.newton_max_iter
            )
            iterations += result.iterations
            field = field.with_values(np.exp(result.x))
        else:
            field, clipped = _explicit_update(field, bc, params, step)
            if clipped:
                logger.warning(
                    "clipped %d roundoff negatives at t=%.6g", clipped, times[k]
                )
            clips += clipped
        recorder.record(k, field)

    logger.info(
        "relativistic %s run: %d steps, dt=%.3e, clips=%d, newton iterations=%d",
        config.method.value,
        times.size - 1,
        dt,
        clips,
        iterations,
    )
    return recorder.report(
        equation_tag=EquationTag.RELATIVISTIC,
        params=params,
        dt=dt,
        boundary=bc,
        initial=initial,
        final=field,
        clip_count=clips,
        newton_iterations=iterations,
    )


def classical_dt(grid: Grid, config: TimeStepConfig = TimeStepConfig()) -> float:
    return config.cfl_parabolic * grid.h_min**2 / grid.dim


def evolve_classical_heat(
    initial: ScalarField,
    bc: BoundaryCondition,
    config: TimeStepConfig = TimeStepConfig(),
) -> RunReport:
    """u_t = Δu with the 3-point (1D) / 5-point (2D) Laplacian."""
    grid = initial.grid
    bc.check_grid(grid)
    matrix, b = fv.laplacian_system(grid, bc)
    implicit = config.method is TimeMethod.IMPLICIT_EULER

    dt = config.dt or classical_dt(grid, config)
    times = _time_levels(config.t_end, dt)
    recorder = _Recorder(times, grid, config)

    solvers = {}
    identity = sps.identity(grid.size, format="csc")
    u = initial.values.ravel().copy()
    recorder.record(0, initial)
    for k in range(1, times.size):
        step = float(times[k] - times[k - 1])
        if implicit:
            if step not in solvers:
                solvers[step] = spla.factorized((identity - step * matrix).tocsc())
            u = solvers[step](u + step * b)
        else:
            u = u + step * (matrix @ u + b)
        if not np.all(np.isfinite(u)):
            raise BlowUpError("blow-up: dt too large")
        recorder.record(k, ScalarField(grid, u))

    final = ScalarField(grid, u)
    logger.info("heat %s run: %d steps, dt=%.3e", config.method.value, times.size - 1, dt)
    return recorder.report(
        equation_tag=EquationTag.CLASSICAL_HEAT,
        params=None,
        dt=dt,
        boundary=bc,
        initial=initial,
        final=final,
    )


def telegraph_dt(
    grid: Grid, params: ModelParams = DEFAULT_PARAMS, config: TimeStepConfig = TimeStepConfig()
) -> float:
    limit = grid.h_min / (params.c * math.sqrt(grid.dim))
    if config.dt is not None:
        if config.dt > limit:
            raise CFLViolationError(
                "dt={} exceeds the wave limit h/(c sqrt(dim))={}".format(config.dt, limit)
            )
        return config.dt
    return config.cfl_hyperbolic * limit


def evolve_telegraph(
    initial_u: ScalarField,
    initial_ut: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
    config: TimeStepConfig = TimeStepConfig(),
) -> RunReport:
    """c^-2 u_tt + u_t = Δu by leapfrog with the damping term time-averaged.

    The step is shrunk to divide t_end evenly since leapfrog needs a uniform step.
    """
    grid = initial_u.grid
    if initial_ut.grid != grid:
        raise InvalidParameterError("u and u_t live on different grids", "initial")
    bc.check_grid(grid)
    matrix, b = fv.laplacian_system(grid, bc)

    dt = telegraph_dt(grid, params, config)
    steps = max(1, int(math.ceil(config.t_end / dt - 1e-9)))
    dt = config.t_end / steps
    times = dt * np.arange(steps + 1)
    times[-1] = config.t_end
    recorder = _Recorder(times, grid, config)

    inv_c2 = params.inv_c2
    lead = inv_c2 / dt**2 + 0.5 / dt

    u_prev = initial_u.values.ravel().copy()
    v = initial_ut.values.ravel()
    laplace = matrix @ u_prev + b
    u = u_prev + dt * v + 0.5 * dt**2 * params.c**2 * (laplace - v)
    recorder.record(0, initial_u)
    recorder.record(1, ScalarField(grid, u))

    for k in range(2, times.size):
        laplace = matrix @ u + b
        u_next = (
            laplace + inv_c2 * (2.0 * u - u_prev) / dt**2 + u_prev * (0.5 / dt)
        ) / lead
        if not np.all(np.isfinite(u_next)):
            raise BlowUpError("blow-up: dt too large")
        u_prev, u = u, u_next
        recorder.record(k, ScalarField(grid, u))

    final = ScalarField(grid, u)
    logger.info("telegraph run: %d steps, dt=%.3e, peak=%.6g", steps, dt, max(recorder.max))
    return recorder.report(
        equation_tag=EquationTag.TELEGRAPH,
        params=params,
        dt=dt,
        boundary=bc,
        initial=initial_u,
        final=final,
    )


def is_constant(field: ScalarField, tol: float = CONSTANT_FIELD_TOL) -> bool:
    values = field.values
    return float(values.max() - values.min()) <= tol * max(1.0, float(np.abs(values).max()))


def common_dt(
    grid: Grid, c_values: Sequence[float], config: TimeStepConfig = TimeStepConfig()
) -> float:
    """The smallest relativistic stable step over ``c_values``, also valid for heat."""
    steps = [
        stable_dt(ScalarField.constant(grid, 1.0), ModelParams(c=c), config)
        for c in c_values
    ]
    return min(steps + [classical_dt(grid, config)])
