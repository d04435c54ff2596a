"""Pointwise continuum operators of the relativistic heat equation.

Everything here works on supplied values and derivatives, never on a mesh.
Arrays broadcast: ``u`` has shape ``(...)``, gradients ``(..., n)`` and
Hessians ``(..., n, n)``, so the grid module evaluates whole faces or cells
in one call.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from relativistic_heat.constants.equation import (
    Classification,
    ParabolicClassification,
)
from relativistic_heat.constants.tolerances import (
    DEFAULT_C,
    DEFAULT_EPS_GUARD,
    HARMONIC_TOL,
    MAX_EPS_GUARD,
)
from relativistic_heat.exceptions import (
    InvalidParameterError,
    InvalidStateError,
    TransformDomainError,
)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ModelParams:
    c: float = DEFAULT_C
    eps_guard: float = DEFAULT_EPS_GUARD

    def __post_init__(self):
        if not np.isfinite(self.c) or self.c <= 0:
            raise InvalidParameterError("must be > 0, got {}".format(self.c), "c")
        if not (0 <= self.eps_guard <= MAX_EPS_GUARD):
            raise InvalidParameterError(
                "must lie in [0, {}], got {}".format(MAX_EPS_GUARD, self.eps_guard),
                "eps_guard",
            )

    @property
    def inv_c2(self) -> float:
        return 1.0 / (self.c * self.c)


DEFAULT_PARAMS = ModelParams()


@dataclass(frozen=True)
class PointState:
    """Value, gradient and (optionally) Hessian of u or w at one point."""

    value: float
    grad: np.ndarray
    hess: Optional[np.ndarray] = None

    def __post_init__(self):
        grad = np.atleast_1d(np.asarray(self.grad, dtype=float))
        object.__setattr__(self, "grad", grad)
        if self.hess is not None:
            hess = np.atleast_2d(np.asarray(self.hess, dtype=float))
            if hess.shape != (grad.size, grad.size):
                raise InvalidStateError("invalid state: hessian shape mismatch")
            if not np.allclose(hess, hess.T, rtol=1e-14, atol=1e-14):
                raise InvalidStateError("invalid state: hessian not symmetric")
            object.__setattr__(self, "hess", hess)
        _require_finite(self.value, grad, self.hess)

    @property
    def dim(self) -> int:
        return self.grad.size


def _require_finite(*arrays):
    for a in arrays:
        if a is not None and not np.all(np.isfinite(a)):
            raise InvalidStateError("invalid state: non-finite input")


def _squared_norm(grad: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", grad, grad)


def _hess_pp(hess: np.ndarray, grad: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...i,...j->...", hess, grad, grad)


def _trace(hess: np.ndarray) -> np.ndarray:
    return np.trace(hess, axis1=-2, axis2=-1)


def flux(u: ArrayLike, grad: np.ndarray, params: ModelParams = DEFAULT_PARAMS):
    """F = u Du / sqrt(u^2 + c^-2 |Du|^2), continuously extended by 0 at u = 0."""
    u = np.asarray(u, dtype=float)
    grad = np.asarray(grad, dtype=float)
    _require_finite(u, grad)
    if np.any(u < 0):
        raise InvalidStateError("invalid state: negative density")

    denom = np.hypot(u, np.sqrt(_squared_norm(grad)) / params.c)
    denom = np.where(denom > 0, denom, params.eps_guard)[..., None]
    numerator = u[..., None] * grad
    return np.divide(
        numerator, denom, out=np.zeros_like(numerator), where=denom > 0
    )


def flux_divergence(
    u: ArrayLike,
    grad_u: np.ndarray,
    hess_u: np.ndarray,
    params: ModelParams = DEFAULT_PARAMS,
):
    u = np.asarray(u, dtype=float)
    grad_u = np.asarray(grad_u, dtype=float)
    hess_u = np.asarray(hess_u, dtype=float)
    _require_finite(u, grad_u, hess_u)

    g2 = _squared_norm(grad_u)
    d = np.sqrt(u * u + params.inv_c2 * g2)
    return (g2 + u * _trace(hess_u)) / d - u * (
        u * g2 + params.inv_c2 * _hess_pp(hess_u, grad_u)
    ) / d**3


def q_operator(
    w: ArrayLike,
    grad_w: np.ndarray,
    hess_w: np.ndarray,
    params: ModelParams = DEFAULT_PARAMS,
):
    """Q_c w = Δw + |Dw|^2 - c^-2 D²w(Dw,Dw) / (1 + c^-2 |Dw|^2).

    ``w`` is accepted for symmetry with the other residuals but does not
    enter: the coefficients depend on Dw only.
    """
    grad_w = np.asarray(grad_w, dtype=float)
    hess_w = np.asarray(hess_w, dtype=float)
    _require_finite(w, grad_w, hess_w)

    p2 = _squared_norm(grad_w)
    return (
        _trace(hess_w)
        + p2
        - params.inv_c2 * _hess_pp(hess_w, grad_w) / (1.0 + params.inv_c2 * p2)
    )


def qtilde_operator(
    grad_w: np.ndarray, hess_w: np.ndarray, params: ModelParams = DEFAULT_PARAMS
):
    grad_w = np.asarray(grad_w, dtype=float)
    q = q_operator(0.0, grad_w, hess_w, params)
    return q / np.sqrt(1.0 + params.inv_c2 * _squared_norm(grad_w))


def mean_curvature_operator(
    grad_w: np.ndarray, hess_w: np.ndarray, params: ModelParams = DEFAULT_PARAMS
):
    grad_w = np.asarray(grad_w, dtype=float)
    hess_w = np.asarray(hess_w, dtype=float)
    _require_finite(grad_w, hess_w)

    p2 = _squared_norm(grad_w)
    return (1.0 + params.inv_c2 * p2) * _trace(hess_w) - params.inv_c2 * _hess_pp(
        hess_w, grad_w
    )


def principal_part(p: np.ndarray, params: ModelParams = DEFAULT_PARAMS) -> np.ndarray:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    _require_finite(p)
    return np.eye(p.size) - params.inv_c2 * np.outer(p, p) / (
        1.0 + params.inv_c2 * p.dot(p)
    )


def ellipticity_eigenvalues(
    p: np.ndarray, params: ModelParams = DEFAULT_PARAMS
) -> Tuple[float, float]:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    _require_finite(p)

    lambda_min = 1.0 / (1.0 + params.inv_c2 * float(p.dot(p)))
    if p.size == 1:
        return lambda_min, lambda_min
    return lambda_min, 1.0


def u_to_w(u: ArrayLike):
    u = np.asarray(u, dtype=float)
    _require_finite(u)
    if np.any(u <= 0):
        raise TransformDomainError("transform requires positive u")
    result = np.log(u)
    return float(result) if result.ndim == 0 else result


def w_to_u(w: ArrayLike):
    w = np.asarray(w, dtype=float)
    _require_finite(w)
    result = np.exp(w)
    return float(result) if result.ndim == 0 else result


def transform_state(state: PointState) -> PointState:
    """Carry (u, Du, D²u) over to (w, Dw, D²w) with w = log u."""
    w = u_to_w(state.value)
    u = state.value
    grad_w = state.grad / u
    hess_w = None
    if state.hess is not None:
        hess_w = state.hess / u - np.outer(grad_w, grad_w)
    return PointState(w, grad_w, hess_w)


def classify_residual(residual: float, tol: float = HARMONIC_TOL) -> Classification:
    if tol < 0:
        raise InvalidParameterError("must be >= 0", "tol")
    if not np.isfinite(residual):
        return Classification.INDETERMINATE
    if residual > tol:
        return Classification.SUBHARMONIC
    if residual < -tol:
        return Classification.SUPERHARMONIC
    return Classification.HARMONIC


def parabolic_residual(
    w_t: ArrayLike,
    grad_w: np.ndarray,
    hess_w: np.ndarray,
    params: ModelParams = DEFAULT_PARAMS,
):
    return np.asarray(w_t, dtype=float) - qtilde_operator(grad_w, hess_w, params)


def classify_parabolic(
    residual: float, tol: float = HARMONIC_TOL
) -> ParabolicClassification:
    if tol < 0:
        raise InvalidParameterError("must be >= 0", "tol")
    if not np.isfinite(residual):
        return ParabolicClassification.INDETERMINATE
    if residual < -tol:
        return ParabolicClassification.SUBSOLUTION
    if residual > tol:
        return ParabolicClassification.SUPERSOLUTION
    return ParabolicClassification.SOLUTION
