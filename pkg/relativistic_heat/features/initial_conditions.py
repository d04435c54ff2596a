"""Named, parameterized initial data.

Each family maps to a builder returning ``(u, u_t)`` on a grid; ``u_t`` is
only non-zero for the travelling pulses used by the telegraph experiments.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from relativistic_heat.exceptions import InvalidParameterError
from relativistic_heat.features.core import DEFAULT_PARAMS, ModelParams
from relativistic_heat.features.grid import Grid, ScalarField
from relativistic_heat.utils.io import read_snapshot


def _radius(grid: Grid, center) -> np.ndarray:
    center = np.broadcast_to(np.atleast_1d(np.asarray(center, dtype=float)), (grid.dim,))
    return np.sqrt(sum((x - c) ** 2 for x, c in zip(grid.mesh(), center)))


def constant(grid: Grid, value: float = 1.0) -> ScalarField:
    return ScalarField.constant(grid, value)


def gaussian_bump(
    grid: Grid,
    amplitude: float = 1.0,
    center=0.0,
    width: float = 0.1,
    floor: float = 0.0,
) -> ScalarField:
    r = _radius(grid, center)
    return ScalarField(grid, floor + amplitude * np.exp(-0.5 * (r / width) ** 2))


def compact_bump(
    grid: Grid, amplitude: float = 1.0, center=0.0, radius: float = 0.2
) -> ScalarField:
    """amplitude * cos^2(pi r / 2 radius) inside the radius, exactly 0 outside."""
    r = _radius(grid, center)
    inside = r < radius
    values = np.where(inside, amplitude * np.cos(0.5 * np.pi * r / radius) ** 2, 0.0)
    return ScalarField(grid, values)


def _pulse(x: np.ndarray, amplitude: float, center: float, width: float):
    profile = amplitude * np.exp(-0.5 * ((x - center) / width) ** 2)
    slope = -profile * (x - center) / width**2
    return profile, slope


def pulse(
    grid: Grid,
    params: ModelParams = DEFAULT_PARAMS,
    amplitude: float = 0.5,
    center: float = 0.0,
    width: float = 0.05,
    direction: str = "right",
) -> Tuple[ScalarField, ScalarField]:
    """One Gaussian pulse moving at speed c; u_t = -c u_x moves it right."""
    _require_1d(grid, "pulse")
    sign = {"right": 1.0, "left": -1.0}.get(direction)
    if sign is None:
        raise InvalidParameterError("must be right or left", "initial.direction")
    u, u_x = _pulse(grid.centers(0), amplitude, center, width)
    return ScalarField(grid, u), ScalarField(grid, -sign * params.c * u_x)


def two_pulses(
    grid: Grid,
    params: ModelParams = DEFAULT_PARAMS,
    amplitude: float = 0.5,
    separation: float = 0.6,
    width: float = 0.05,
    direction: str = "converging",
) -> Tuple[ScalarField, ScalarField]:
    _require_1d(grid, "two-pulses")
    sign = {"converging": 1.0, "diverging": -1.0}.get(direction)
    if sign is None:
        raise InvalidParameterError("must be converging or diverging", "initial.direction")
    middle = 0.5 * (grid.lower[0] + grid.upper[0])
    x = grid.centers(0)
    left, left_x = _pulse(x, amplitude, middle - 0.5 * separation, width)
    right, right_x = _pulse(x, amplitude, middle + 0.5 * separation, width)
    u_t = -sign * params.c * left_x + sign * params.c * right_x
    return ScalarField(grid, left + right), ScalarField(grid, u_t)


def _require_1d(grid: Grid, family: str):
    if grid.dim != 1:
        raise InvalidParameterError("{} needs a 1D grid".format(family), "grid.dim")


def _static(builder: Callable) -> Callable:
    def build(grid, params, **kwargs):
        u = builder(grid, **kwargs)
        return u, ScalarField.constant(grid, 0.0)

    return build


def _custom(grid, params, path: str = None):
    if path is None:
        raise InvalidParameterError("custom initial data needs a path", "initial.path")
    u = read_snapshot(path, grid)
    return u, ScalarField.constant(grid, 0.0)


FAMILIES: Dict[str, Callable] = {
    "constant": _static(constant),
    "gaussian-bump": _static(gaussian_bump),
    "compact-bump": _static(compact_bump),
    "pulse": pulse,
    "two-pulses": two_pulses,
    "custom": _custom,
}


@dataclass(frozen=True)
class InitialCondition:
    family: str = "gaussian-bump"
    parameters: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(
                "unknown family {!r}, expected one of {}".format(
                    self.family, ", ".join(sorted(FAMILIES))
                ),
                "initial.family",
            )

    def build(
        self, grid: Grid, params: Optional[ModelParams] = None
    ) -> Tuple[ScalarField, ScalarField]:
        try:
            return FAMILIES[self.family](grid, params or DEFAULT_PARAMS, **self.parameters)
        except TypeError as e:
            raise InvalidParameterError(str(e), "initial")
