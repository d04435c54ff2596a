"""Damped Newton iteration for residuals with a 3x3 (3-point in 1D) stencil.

The Jacobian is assembled column-colored: cells whose indices agree modulo
3 along every axis never share a stencil row, so one residual evaluation per
color yields all their columns. The resulting banded matrix is solved
directly with SuperLU.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from relativistic_heat.constants.tolerances import MAX_HALVINGS
from relativistic_heat.exceptions import ConvergenceError, InvalidStateError

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
ROUNDOFF_FACTOR = 1e3


@dataclass
class NewtonIterate:
    iteration: int
    residual_norm: float
    damping: float

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "residual_norm": self.residual_norm,
            "damping": self.damping,
        }


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    history: List[NewtonIterate] = field(default_factory=list)
    roundoff_accepted: bool = False


def colored_jacobian(
    residual: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    r0: np.ndarray = None,
) -> sps.csr_matrix:
    """Finite-difference Jacobian of ``residual`` at ``x`` (both shaped like the grid)."""
    shape = x.shape
    dim = x.ndim
    size = x.size
    if r0 is None:
        r0 = residual(x)
    step = np.sqrt(np.finfo(float).eps) * (1.0 + np.abs(x))

    index = np.indices(shape)
    color_of = np.zeros(shape, dtype=int)
    for a in range(dim):
        color_of = color_of * 3 + index[a] % 3

    differences = {}
    for color in range(3**dim):
        mask = color_of == color
        if not mask.any():
            continue
        perturbed = x + np.where(mask, step, 0.0)
        differences[color] = residual(perturbed) - r0

    flat = np.arange(size).reshape(shape)
    rows, cols, data = [], [], []
    for offset in itertools.product((-1, 0, 1), repeat=dim):
        target = index + np.array(offset).reshape((dim,) + (1,) * dim)
        valid = np.all(
            [(target[a] >= 0) & (target[a] < shape[a]) for a in range(dim)], axis=0
        )
        if not valid.any():
            continue
        row_cells = tuple(index[a][valid] for a in range(dim))
        col_cells = tuple(target[a][valid] for a in range(dim))
        colors = color_of[col_cells]
        values = np.empty(colors.size)
        for color in np.unique(colors):
            pick = colors == color
            values[pick] = differences[color][tuple(c[pick] for c in row_cells)]
        rows.append(flat[row_cells])
        cols.append(flat[col_cells])
        data.append(values / step[col_cells])

    return sps.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )


def roundoff_floor(x: np.ndarray, h: Tuple[float, ...]) -> float:
    scale = 1.0 + float(np.max(np.abs(x)))
    return ROUNDOFF_FACTOR * np.finfo(float).eps * scale * sum(4.0 / hh**2 for hh in h)


def damped_newton(
    residual: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    max_iter: int,
    h: Tuple[float, ...],
    max_halvings: int = MAX_HALVINGS,
) -> NewtonResult:
    """Newton with Armijo halving on the max-norm of the residual."""
    x = np.array(x0, dtype=float)
    r = residual(x)
    norm = float(np.max(np.abs(r)))
    history = [NewtonIterate(0, norm, 1.0)]
    logger.debug("newton iteration 0: residual %.3e", norm)

    iteration = 0
    while norm > tol:
        if iteration >= max_iter:
            raise ConvergenceError(
                "newton did not converge in {} iterations (residual {:.3e})".format(
                    max_iter, norm
                ),
                residual=norm,
                history=[it.to_dict() for it in history],
            )
        iteration += 1
        jacobian = colored_jacobian(residual, x, r)
        delta = spla.spsolve(jacobian.tocsc(), -r.ravel()).reshape(x.shape)

        damping = 1.0
        accepted = False
        for _ in range(max_halvings + 1):
            candidate = x + damping * delta
            with np.errstate(over="ignore", invalid="ignore"):
                try:
                    r_new = residual(candidate)
                except (ArithmeticError, InvalidStateError):
                    r_new = None
            if r_new is not None and np.all(np.isfinite(r_new)):
                new_norm = float(np.max(np.abs(r_new)))
                if new_norm <= (1.0 - ARMIJO * damping) * norm:
                    accepted = True
                    break
            damping *= 0.5

        if not accepted:
            floor = roundoff_floor(x, h)
            if norm <= floor:
                logger.warning(
                    "newton stalled at residual %.3e, below roundoff floor %.3e; accepting",
                    norm,
                    floor,
                )
                return NewtonResult(x, norm, iteration - 1, history, roundoff_accepted=True)
            raise ConvergenceError(
                "line search exhausted after {} halvings (residual {:.3e})".format(
                    max_halvings, norm
                ),
                residual=norm,
                history=[it.to_dict() for it in history],
            )

        x, r, norm = candidate, r_new, new_norm
        history.append(NewtonIterate(iteration, norm, damping))
        logger.debug(
            "newton iteration %d: residual %.3e, damping %.3g", iteration, norm, damping
        )

    return NewtonResult(x, norm, iteration, history)
