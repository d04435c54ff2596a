from typing import Any, Callable, Iterable, List

from relativistic_heat.constants.equation import (
    BoundaryKind,
    DiscreteForm,
    EquationTag,
    TimeMethod,
)
from relativistic_heat.constants.tolerances import (
    CFL_HYPERBOLIC,
    CFL_PARABOLIC,
    DEFAULT_C,
    DEFAULT_EPS_GUARD,
    FRONT_THRESHOLD,
    MAX_EPS_GUARD,
    MIN_CELLS_PER_AXIS,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    STATIONARY_NEWTON_MAX_ITER,
)
from relativistic_heat.exceptions import ConfigurationError
from relativistic_heat.utils import nested_lookup


class ConfigSpec:
    def __init__(
        self,
        section: str,
        key: str,
        post_processor: Callable = None,
        fallback_value: Any = None,
    ):
        self.section = section
        self.key = key
        self.post_processor = post_processor
        self.fallback_value = fallback_value

    @property
    def dotted(self) -> str:
        return "{}.{}".format(self.section, self.key)

    def extract_content(self, source: dict) -> Any:
        result = nested_lookup(source, [self.section, self.key])
        if result is None:
            return self.fallback_value
        if self.post_processor is None:
            return result
        try:
            return self.post_processor(result)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(str(e), self.dotted)


def _number(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError("expected a number, got {!r}".format(value))
    return float(value)


def _integer(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError("expected an integer, got {!r}".format(value))
    return value


def positive(value) -> float:
    value = _number(value)
    if not value > 0:
        raise ValueError("must be > 0, got {}".format(value))
    return value


def non_negative_int(value) -> int:
    value = _integer(value)
    if value < 0:
        raise ValueError("must be >= 0, got {}".format(value))
    return value


def non_negative(value) -> float:
    value = _number(value)
    if value < 0:
        raise ValueError("must be >= 0, got {}".format(value))
    return value


def positive_int(value) -> int:
    value = _integer(value)
    if value < 1:
        raise ValueError("must be >= 1, got {}".format(value))
    return value


def in_range(low: float, high: float, low_open: bool = False) -> Callable:
    def check(value) -> float:
        value = _number(value)
        ok = (low < value if low_open else low <= value) and value <= high
        if not ok:
            raise ValueError(
                "must lie in {}{}, {}], got {}".format("(" if low_open else "[", low, high, value)
            )
        return value

    return check


def one_of(enum) -> Callable:
    def check(value):
        try:
            return enum(value)
        except ValueError:
            raise ValueError(
                "must be one of {}, got {!r}".format(", ".join(e.value for e in enum), value)
            )

    return check


def number_list(value) -> List[float]:
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [_number(v) for v in value]


def value_list(value) -> list:
    if not isinstance(value, (list, tuple)) or not value:
        raise ValueError("expected a non-empty list, got {!r}".format(value))
    return list(value)


def text(value) -> str:
    if not isinstance(value, str) or not value:
        raise ValueError("expected a non-empty string, got {!r}".format(value))
    return value


def boolean(value) -> bool:
    if not isinstance(value, bool):
        raise ValueError("expected true or false, got {!r}".format(value))
    return value


def cells(value) -> int:
    value = _integer(value)
    if value < MIN_CELLS_PER_AXIS:
        raise ValueError("must be >= {}, got {}".format(MIN_CELLS_PER_AXIS, value))
    return value


def dimension(value) -> int:
    value = _integer(value)
    if value not in (1, 2):
        raise ValueError("must be 1 or 2, got {}".format(value))
    return value


class ConfigSpecs:
    Experiment = {
        "experiment.name": ConfigSpec("experiment", "name", text, "run"),
        "experiment.equation": ConfigSpec(
            "experiment", "equation", one_of(EquationTag), EquationTag.RELATIVISTIC
        ),
        "experiment.output": ConfigSpec("experiment", "output", text, None),
        "experiment.seed": ConfigSpec("experiment", "seed", non_negative_int, 0),
        "grid.dim": ConfigSpec("grid", "dim", dimension, 1),
        "grid.n": ConfigSpec("grid", "n", cells, 200),
        "grid.lower": ConfigSpec("grid", "lower", _number, -1.0),
        "grid.upper": ConfigSpec("grid", "upper", _number, 1.0),
        "model.c": ConfigSpec("model", "c", positive, DEFAULT_C),
        "model.eps_guard": ConfigSpec(
            "model", "eps_guard", in_range(0.0, MAX_EPS_GUARD), DEFAULT_EPS_GUARD
        ),
        "boundary.kind": ConfigSpec(
            "boundary", "kind", one_of(BoundaryKind), BoundaryKind.NO_FLUX
        ),
        "boundary.value": ConfigSpec("boundary", "value", _number, None),
        "boundary.values": ConfigSpec("boundary", "values", number_list, None),
        "initial.family": ConfigSpec("initial", "family", text, "gaussian-bump"),
        "time.method": ConfigSpec(
            "time", "method", one_of(TimeMethod), TimeMethod.EXPLICIT_EULER
        ),
        "time.t_end": ConfigSpec("time", "t_end", positive, 0.1),
        "time.cfl_parabolic": ConfigSpec(
            "time", "cfl_parabolic", in_range(0.0, 0.5, low_open=True), CFL_PARABOLIC
        ),
        "time.cfl_hyperbolic": ConfigSpec(
            "time", "cfl_hyperbolic", in_range(0.0, 1.0, low_open=True), CFL_HYPERBOLIC
        ),
        "time.newton_tol": ConfigSpec("time", "newton_tol", positive, NEWTON_TOL),
        "time.newton_max_iter": ConfigSpec(
            "time", "newton_max_iter", positive_int, NEWTON_MAX_ITER
        ),
        "time.dt": ConfigSpec("time", "dt", positive, None),
        "time.snapshot_times": ConfigSpec("time", "snapshot_times", number_list, []),
        "time.snapshot_every": ConfigSpec("time", "snapshot_every", positive_int, None),
        "time.front_threshold": ConfigSpec(
            "time", "front_threshold", positive, FRONT_THRESHOLD
        ),
        "stationary.form": ConfigSpec(
            "stationary", "form", one_of(DiscreteForm), DiscreteForm.Q
        ),
        "stationary.newton_tol": ConfigSpec("stationary", "newton_tol", positive, NEWTON_TOL),
        "stationary.newton_max_iter": ConfigSpec(
            "stationary", "newton_max_iter", positive_int, STATIONARY_NEWTON_MAX_ITER
        ),
        "verify.quick": ConfigSpec("verify", "quick", boolean, False),
        "verify.jobs": ConfigSpec("verify", "jobs", positive_int, 1),
        "sweep.axis": ConfigSpec("sweep", "axis", text, None),
        "sweep.values": ConfigSpec("sweep", "values", value_list, None),
        "sweep.jobs": ConfigSpec("sweep", "jobs", positive_int, 1),
    }

    # family-specific keys of [initial], validated by the family builder
    InitialParameters = {
        "constant": ("value",),
        "gaussian-bump": ("amplitude", "center", "width", "floor"),
        "compact-bump": ("amplitude", "center", "radius"),
        "pulse": ("amplitude", "center", "width", "direction"),
        "two-pulses": ("amplitude", "separation", "width", "direction"),
        "custom": ("path",),
    }

    InitialParameterChecks = {
        "value": non_negative,
        "amplitude": non_negative,
        "floor": non_negative,
        "width": positive,
        "radius": positive,
        "separation": positive,
        "path": text,
    }

    @classmethod
    def sections(cls) -> Iterable[str]:
        return sorted({spec.section for spec in cls.Experiment.values()})

    @classmethod
    def keys_of(cls, section: str) -> List[str]:
        return [s.key for s in cls.Experiment.values() if s.section == section]
