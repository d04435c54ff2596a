"""Uniform Cartesian meshes, cell-centered fields and conservative stencils.

Cells are indexed row-major (``indexing="ij"``: axis 0 is x). Boundary data
enters through one layer of ghost cells at distance h/2 from the boundary
face: ``ghost = 2 g - interior`` for Dirichlet traces, ``ghost = interior``
for no-flux walls.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sps
from scipy.special import xlogy

from relativistic_heat.constants.equation import BoundaryKind
from relativistic_heat.constants.tolerances import MIN_CELLS_PER_AXIS
from relativistic_heat.exceptions import (
    DomainError,
    InvalidParameterError,
    InvalidStateError,
    NegativeDensityError,
)
from relativistic_heat.features import core
from relativistic_heat.features.core import DEFAULT_PARAMS, ModelParams

logger = logging.getLogger(__name__)


def _as_tuple(value, cast) -> tuple:
    return tuple(cast(v) for v in np.atleast_1d(value))


@dataclass(frozen=True)
class Grid:
    n: Tuple[int, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        n = _as_tuple(self.n, int)
        lower = _as_tuple(self.lower, float)
        upper = _as_tuple(self.upper, float)
        if len(n) not in (1, 2):
            raise InvalidParameterError("only 1D and 2D grids are supported", "dim")
        if len(lower) == 1 and len(n) == 2:
            lower = lower * 2
        if len(upper) == 1 and len(n) == 2:
            upper = upper * 2
        if not (len(n) == len(lower) == len(upper)):
            raise InvalidParameterError("n, lower and upper disagree in dim", "extent")
        if any(k < MIN_CELLS_PER_AXIS for k in n):
            raise InvalidParameterError(
                "need at least {} cells per axis".format(MIN_CELLS_PER_AXIS), "n"
            )
        if any(not (hi > lo) for lo, hi in zip(lower, upper)):
            raise InvalidParameterError("upper must exceed lower", "extent")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, n: int, lower: float = 0.0, upper: float = 1.0, dim: int = 1):
        return cls((n,) * dim, (lower,) * dim, (upper,) * dim)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def h(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / k for lo, hi, k in zip(self.lower, self.upper, self.n))

    @property
    def h_min(self) -> float:
        return min(self.h)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    def centers(self, axis: int = 0) -> np.ndarray:
        h = self.h[axis]
        return self.lower[axis] + h * (np.arange(self.n[axis]) + 0.5)

    def faces(self, axis: int = 0) -> np.ndarray:
        return self.lower[axis] + self.h[axis] * np.arange(self.n[axis] + 1)

    def mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*[self.centers(a) for a in range(self.dim)], indexing="ij"))


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size != self.grid.size:
            raise InvalidStateError(
                "invalid state: {} values for a grid of {} cells".format(
                    values.size, self.grid.size
                )
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise InvalidStateError("invalid state: non-finite field values")
        self.values = values

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable) -> "ScalarField":
        return cls(grid, np.broadcast_to(fn(*grid.mesh()), grid.shape))

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values)


@dataclass(frozen=True, eq=False)
class BoundaryCondition:
    """Dirichlet traces, ordered (axis0 low, axis0 high, axis1 low, axis1 high)."""

    kind: BoundaryKind
    dirichlet_values: Optional[Tuple[np.ndarray, ...]] = None

    def __post_init__(self):
        if self.kind is BoundaryKind.NO_FLUX:
            if self.dirichlet_values is not None:
                raise InvalidParameterError("no-flux takes no values", "boundary")
            return
        if self.dirichlet_values is None:
            raise InvalidParameterError("dirichlet needs values", "boundary")
        values = tuple(np.array(v, dtype=float) for v in self.dirichlet_values)
        if len(values) not in (2, 4):
            raise InvalidParameterError("need two traces per axis", "boundary")
        for v in values:
            if not np.all(np.isfinite(v)):
                raise InvalidParameterError("dirichlet values must be finite", "boundary")
        object.__setattr__(self, "dirichlet_values", values)

    @classmethod
    def no_flux(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.NO_FLUX)

    @classmethod
    def dirichlet_constant(cls, grid: Grid, value: float) -> "BoundaryCondition":
        return cls.dirichlet_function(grid, lambda *x: np.full(np.shape(x[0]), value))

    @classmethod
    def dirichlet_function(cls, grid: Grid, fn: Callable) -> "BoundaryCondition":
        traces = []
        for axis in range(grid.dim):
            for side in (grid.lower[axis], grid.upper[axis]):
                coords = [
                    np.array([side]) if a == axis else grid.centers(a)
                    for a in range(grid.dim)
                ]
                mesh = np.meshgrid(*coords, indexing="ij")
                trace = np.broadcast_to(fn(*mesh), mesh[0].shape)
                traces.append(np.squeeze(trace, axis=axis).copy())
        return cls(BoundaryKind.DIRICHLET, tuple(traces))

    @classmethod
    def dirichlet_sides(cls, grid: Grid, values: Sequence[float]) -> "BoundaryCondition":
        """One constant per boundary side, in trace order."""
        if len(values) != 2 * grid.dim:
            raise InvalidParameterError(
                "need {} side values".format(2 * grid.dim), "boundary"
            )
        traces = []
        for axis in range(grid.dim):
            shape = tuple(k for a, k in enumerate(grid.n) if a != axis)
            traces.append(np.full(shape, float(values[2 * axis])))
            traces.append(np.full(shape, float(values[2 * axis + 1])))
        return cls(BoundaryKind.DIRICHLET, tuple(traces))

    @property
    def is_dirichlet(self) -> bool:
        return self.kind is BoundaryKind.DIRICHLET

    def trace(self, axis: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.dirichlet_values[2 * axis], self.dirichlet_values[2 * axis + 1]

    def mapped(self, fn: Callable) -> "BoundaryCondition":
        if not self.is_dirichlet:
            return self
        return BoundaryCondition(self.kind, tuple(fn(v) for v in self.dirichlet_values))

    def shifted(self, kappa: float) -> "BoundaryCondition":
        return self.mapped(lambda v: v + kappa)

    def max_value(self) -> Optional[float]:
        if not self.is_dirichlet:
            return None
        return float(max(np.max(v) for v in self.dirichlet_values))

    def min_value(self) -> Optional[float]:
        if not self.is_dirichlet:
            return None
        return float(min(np.min(v) for v in self.dirichlet_values))

    def require_positive(self):
        if self.is_dirichlet and self.min_value() <= 0:
            raise InvalidParameterError(
                "dirichlet values of a density must be > 0", "boundary"
            )

    def check_grid(self, grid: Grid):
        if not self.is_dirichlet:
            return
        if len(self.dirichlet_values) != 2 * grid.dim:
            raise InvalidParameterError("trace count does not match grid", "boundary")
        for axis in range(grid.dim):
            shape = tuple(k for a, k in enumerate(grid.n) if a != axis)
            for v in self.trace(axis):
                if v.shape != shape:
                    raise InvalidParameterError(
                        "trace shape {} does not match {}".format(v.shape, shape),
                        "boundary",
                    )


@dataclass
class FaceFluxes:
    grid: Grid
    values: Tuple[np.ndarray, ...]


def _at(ndim: int, axis: int, item) -> tuple:
    index = [slice(None)] * ndim
    index[axis] = item
    return tuple(index)


def pad_with_ghosts(values: np.ndarray, grid: Grid, bc: BoundaryCondition) -> np.ndarray:
    """One ghost layer per side; corners come from padding axes in sequence."""
    bc.check_grid(grid)
    padded = values
    dim = grid.dim
    for axis in range(dim):
        widths = [(1, 1) if a == axis else (0, 0) for a in range(dim)]
        padded = np.pad(padded, widths, mode="edge")
        if not bc.is_dirichlet:
            continue
        for side, ghost, inner in ((0, 0, 1), (1, -1, -2)):
            trace = bc.trace(axis)[side]
            # axes already padded need the trace extended linearly
            for other in range(axis):
                trace_widths = [(1, 1) if a == other else (0, 0) for a in range(trace.ndim)]
                trace = np.pad(trace, trace_widths, mode="reflect", reflect_type="odd")
            padded[_at(dim, axis, ghost)] = 2.0 * trace - padded[_at(dim, axis, inner)]
    return padded


def _core(dim: int) -> list:
    return [slice(1, -1)] * dim


def _face_states(padded: np.ndarray, grid: Grid, axis: int):
    dim = grid.dim
    h = grid.h
    left = _core(dim)
    left[axis] = slice(0, -1)
    right = _core(dim)
    right[axis] = slice(1, None)
    u_left = padded[tuple(left)]
    u_right = padded[tuple(right)]

    grad = np.empty(u_left.shape + (dim,))
    grad[..., axis] = (u_right - u_left) / h[axis]
    for b in range(dim):
        if b == axis:
            continue
        plus = _core(dim)
        plus[axis] = slice(None)
        plus[b] = slice(2, None)
        minus = list(plus)
        minus[b] = slice(0, -2)
        central = (padded[tuple(plus)] - padded[tuple(minus)]) / (2.0 * h[b])
        grad[..., b] = 0.5 * (
            central[_at(dim, axis, slice(0, -1))] + central[_at(dim, axis, slice(1, None))]
        )
    return 0.5 * (u_left + u_right), grad


def face_gradient(
    field: ScalarField, axis: int = 0, bc: Optional[BoundaryCondition] = None
) -> np.ndarray:
    """Normal gradient per face: interior faces only, or all faces given ``bc``."""
    grid = field.grid
    if bc is None:
        return np.diff(field.values, axis=axis) / grid.h[axis]
    padded = pad_with_ghosts(field.values, grid, bc)
    return _face_states(padded, grid, axis)[1][..., axis]


def face_flux(
    field: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
) -> FaceFluxes:
    if np.any(field.values < 0):
        raise NegativeDensityError("negative density")
    grid = field.grid
    padded = pad_with_ghosts(field.values, grid, bc)

    values = []
    for axis in range(grid.dim):
        u_face, grad = _face_states(padded, grid, axis)
        f = core.flux(np.maximum(u_face, 0.0), grad, params)[..., axis]
        if not bc.is_dirichlet:
            f[_at(grid.dim, axis, 0)] = 0.0
            f[_at(grid.dim, axis, -1)] = 0.0
        values.append(f)
    return FaceFluxes(grid, tuple(values))


def face_gradients(field: ScalarField, bc: BoundaryCondition) -> FaceFluxes:
    """Face fluxes of the classical heat equation, F = Du."""
    grid = field.grid
    padded = pad_with_ghosts(field.values, grid, bc)
    values = []
    for axis in range(grid.dim):
        g = _face_states(padded, grid, axis)[1][..., axis].copy()
        if not bc.is_dirichlet:
            g[_at(grid.dim, axis, 0)] = 0.0
            g[_at(grid.dim, axis, -1)] = 0.0
        values.append(g)
    return FaceFluxes(grid, tuple(values))


def divergence(fluxes: FaceFluxes) -> ScalarField:
    grid = fluxes.grid
    total = np.zeros(grid.shape)
    for axis, f in enumerate(fluxes.values):
        total += np.diff(f, axis=axis) / grid.h[axis]
    return ScalarField(grid, total)


def discrete_laplacian(field: ScalarField, bc: BoundaryCondition) -> ScalarField:
    grid = field.grid
    padded = pad_with_ghosts(field.values, grid, bc)
    centre = padded[tuple(_core(grid.dim))]
    total = np.zeros(grid.shape)
    for axis in range(grid.dim):
        plus = _core(grid.dim)
        plus[axis] = slice(2, None)
        minus = _core(grid.dim)
        minus[axis] = slice(0, -2)
        total += (padded[tuple(plus)] - 2.0 * centre + padded[tuple(minus)]) / grid.h[axis] ** 2
    return ScalarField(grid, total)


def laplacian_system(grid: Grid, bc: BoundaryCondition):
    """Sparse (A, b) with discrete_laplacian(w) = A @ w.ravel() + b."""
    corner = -3.0 if bc.is_dirichlet else -1.0
    blocks = []
    for axis in range(grid.dim):
        k = grid.n[axis]
        main = np.full(k, -2.0)
        main[0] = main[-1] = corner
        off = np.ones(k - 1)
        blocks.append(sps.diags([off, main, off], [-1, 0, 1]) / grid.h[axis] ** 2)

    if grid.dim == 1:
        matrix = blocks[0]
    else:
        matrix = sps.kron(blocks[0], sps.identity(grid.n[1])) + sps.kron(
            sps.identity(grid.n[0]), blocks[1]
        )
    b = discrete_laplacian(ScalarField.constant(grid, 0.0), bc).values.ravel()
    return sps.csr_matrix(matrix), b


def cell_derivatives(field: ScalarField, bc: BoundaryCondition):
    """Central-difference gradient and Hessian at every cell center."""
    grid = field.grid
    dim = grid.dim
    h = grid.h
    padded = pad_with_ghosts(field.values, grid, bc)
    centre = padded[tuple(_core(dim))]

    grad = np.empty(grid.shape + (dim,))
    hess = np.empty(grid.shape + (dim, dim))
    for a in range(dim):
        plus = _core(dim)
        plus[a] = slice(2, None)
        minus = _core(dim)
        minus[a] = slice(0, -2)
        grad[..., a] = (padded[tuple(plus)] - padded[tuple(minus)]) / (2.0 * h[a])
        hess[..., a, a] = (padded[tuple(plus)] - 2.0 * centre + padded[tuple(minus)]) / h[a] ** 2
        for b in range(a + 1, dim):
            corners = []
            for sa, sb in ((2, 2), (2, 0), (0, 2), (0, 0)):
                index = _core(dim)
                index[a] = slice(sa, sa + grid.n[a])
                index[b] = slice(sb, sb + grid.n[b])
                corners.append(padded[tuple(index)])
            mixed = (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * h[a] * h[b])
            hess[..., a, b] = hess[..., b, a] = mixed
    return grad, hess


def discrete_q(
    w_field: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
) -> ScalarField:
    grad, hess = cell_derivatives(w_field, bc)
    return ScalarField(w_field.grid, core.q_operator(0.0, grad, hess, params))


def discrete_qtilde(
    w_field: ScalarField,
    bc: BoundaryCondition,
    params: ModelParams = DEFAULT_PARAMS,
) -> ScalarField:
    grad, hess = cell_derivatives(w_field, bc)
    return ScalarField(w_field.grid, core.qtilde_operator(grad, hess, params))


def mass(field: ScalarField) -> float:
    return float(np.sum(field.values) * field.grid.cell_volume)


def entropy(field: ScalarField) -> float:
    if np.any(field.values < 0):
        raise NegativeDensityError("negative density")
    return float(np.sum(xlogy(field.values, field.values)) * field.grid.cell_volume)


def extrema(field: ScalarField):
    values = field.values
    argmin = np.unravel_index(np.argmin(values), values.shape)
    argmax = np.unravel_index(np.argmax(values), values.shape)
    return (
        float(values[argmin]),
        float(values[argmax]),
        tuple(int(i) for i in argmin),
        tuple(int(i) for i in argmax),
    )


def ball_mask(grid: Grid, center: Sequence[float], radius: float) -> np.ndarray:
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.size != grid.dim:
        raise DomainError("ball center has dim {}, grid has {}".format(center.size, grid.dim))
    for a in range(grid.dim):
        if (
            center[a] - radius < grid.lower[a] + grid.h[a]
            or center[a] + radius > grid.upper[a] - grid.h[a]
        ):
            raise DomainError("ball exceeds domain")
    distance2 = sum((x - c) ** 2 for x, c in zip(grid.mesh(), center))
    return distance2 <= radius * radius


def flux_balance_sphere(
    field: ScalarField,
    center: Union[float, Sequence[float]],
    radius: float,
    params: ModelParams = DEFAULT_PARAMS,
    bc: Optional[BoundaryCondition] = None,
) -> float:
    """Net outward flux through the stair-step boundary of the discrete ball."""
    grid = field.grid
    mask = ball_mask(grid, center, radius).astype(float)
    fluxes = face_flux(field, bc or BoundaryCondition.no_flux(), params)

    total = 0.0
    for axis, f in enumerate(fluxes.values):
        widths = [(1, 1) if a == axis else (0, 0) for a in range(grid.dim)]
        jumps = np.diff(np.pad(mask, widths), axis=axis)
        area = grid.cell_volume / grid.h[axis]
        total -= float(np.sum(jumps * f)) * area
    return total
