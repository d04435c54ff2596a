"""Experiment configuration: TOML file, ``--set`` overrides, strict validation.

Every accepted key is declared in ``ConfigSpecs.Experiment``; anything else
is rejected before a single cell is computed.
"""

import copy
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from relativistic_heat.constants.config import ConfigSpecs
from relativistic_heat.constants.equation import BoundaryKind, EquationTag, TimeMethod
from relativistic_heat.exceptions import ConfigurationError
from relativistic_heat.features.checks import jsonable
from relativistic_heat.features.core import ModelParams
from relativistic_heat.features.evolve import TimeStepConfig
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField
from relativistic_heat.features.initial_conditions import InitialCondition

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    values: Dict[str, Any]
    initial: InitialCondition
    time: TimeStepConfig
    source: Dict[str, Any]

    def __getitem__(self, dotted: str) -> Any:
        return self.values[dotted]

    @property
    def name(self) -> str:
        return self.values["experiment.name"]

    @property
    def equation(self) -> EquationTag:
        return self.values["experiment.equation"]

    @property
    def seed(self) -> int:
        return self.values["experiment.seed"]

    def grid(self) -> Grid:
        return Grid.uniform(
            self["grid.n"], self["grid.lower"], self["grid.upper"], self["grid.dim"]
        )

    def params(self) -> ModelParams:
        return ModelParams(c=self["model.c"], eps_guard=self["model.eps_guard"])

    def boundary(self, grid: Optional[Grid] = None) -> BoundaryCondition:
        grid = grid or self.grid()
        if self["boundary.kind"] is BoundaryKind.NO_FLUX:
            return BoundaryCondition.no_flux()
        if self["boundary.values"] is not None:
            return BoundaryCondition.dirichlet_sides(grid, self["boundary.values"])
        return BoundaryCondition.dirichlet_constant(grid, self["boundary.value"])

    def initial_fields(self, grid: Optional[Grid] = None) -> Tuple[ScalarField, ScalarField]:
        return self.initial.build(grid or self.grid(), self.params())

    def with_override(self, dotted: str, value: Any) -> "ExperimentConfig":
        source = copy.deepcopy(self.source)
        _assign(source, dotted, value)
        return config_from_source(source)

    def to_dict(self) -> dict:
        resolved = {k: jsonable(v) for k, v in self.values.items()}
        resolved["initial.parameters"] = jsonable(self.initial.parameters)
        return resolved


def _split(dotted: str) -> Tuple[str, str]:
    if dotted.count(".") != 1:
        raise ConfigurationError("expected section.key", dotted)
    section, key = dotted.split(".")
    return section, key


def _assign(source: dict, dotted: str, value: Any):
    section, key = _split(dotted)
    table = source.setdefault(section, {})
    if not isinstance(table, dict):
        raise ConfigurationError("section is not a table", section)
    table[key] = value


def parse_value(raw: str) -> Any:
    """TOML literal if it parses as one, plain string otherwise."""
    try:
        return tomllib.loads("value = {}".format(raw))["value"]
    except tomllib.TOMLDecodeError:
        return raw


def parse_override(text: str) -> Tuple[str, Any]:
    if "=" not in text:
        raise ConfigurationError("override {!r} is not section.key=value".format(text), "--set")
    dotted, raw = text.split("=", 1)
    dotted = dotted.strip()
    _split(dotted)
    return dotted, parse_value(raw.strip())


def _reject_unknown(source: dict):
    sections = set(ConfigSpecs.sections())
    for section, table in source.items():
        if section not in sections:
            raise ConfigurationError("unknown section", section)
        if not isinstance(table, dict):
            raise ConfigurationError("section is not a table", section)
        allowed = set(ConfigSpecs.keys_of(section))
        if section == "initial":
            family = table.get("family", ConfigSpecs.Experiment["initial.family"].fallback_value)
            allowed |= set(ConfigSpecs.InitialParameters.get(family, ()))
        for key in table:
            if key not in allowed:
                raise ConfigurationError("unknown key", "{}.{}".format(section, key))


def _initial_condition(source: dict, family: str) -> InitialCondition:
    if family not in ConfigSpecs.InitialParameters:
        raise ConfigurationError(
            "unknown family {!r}, expected one of {}".format(
                family, ", ".join(sorted(ConfigSpecs.InitialParameters))
            ),
            "initial.family",
        )
    parameters = {k: v for k, v in source.get("initial", {}).items() if k != "family"}
    for key, value in parameters.items():
        check = ConfigSpecs.InitialParameterChecks.get(key)
        if check is None:
            continue
        try:
            parameters[key] = check(value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(str(e), "initial.{}".format(key))
    if family == "custom":
        path = parameters.get("path")
        if path is None or not Path(path).is_file():
            raise ConfigurationError("file {!r} does not exist".format(path), "initial.path")
    return InitialCondition(family, parameters)


def _check_initial_field(config: ExperimentConfig):
    """Build the initial data once so sign problems surface before any step is taken."""
    u0, _ = config.initial_fields(config.grid())
    if config.equation is EquationTag.TELEGRAPH:
        return
    low = float(u0.values.min())
    if low < 0:
        raise ConfigurationError(
            "initial density must be >= 0, got min {:.3g}".format(low), "initial"
        )
    implicit = config.time.method is TimeMethod.IMPLICIT_EULER
    if implicit and config.equation is EquationTag.RELATIVISTIC and low <= 0:
        raise ConfigurationError(
            "implicit stepping solves for log u and needs u > 0, got min {:.3g}".format(low),
            "time.method",
        )


def config_from_source(source: dict) -> ExperimentConfig:
    _reject_unknown(source)
    values = {
        name: spec.extract_content(source) for name, spec in ConfigSpecs.Experiment.items()
    }
    if values["grid.upper"] <= values["grid.lower"]:
        raise ConfigurationError("must exceed grid.lower", "grid.upper")
    if values["boundary.kind"] is BoundaryKind.DIRICHLET:
        if values["boundary.value"] is None and values["boundary.values"] is None:
            raise ConfigurationError("dirichlet needs value or values", "boundary.value")
        sides = values["boundary.values"]
        if sides is not None and len(sides) != 2 * values["grid.dim"]:
            raise ConfigurationError(
                "need {} side values".format(2 * values["grid.dim"]), "boundary.values"
            )

    time = TimeStepConfig(
        method=values["time.method"],
        t_end=values["time.t_end"],
        cfl_parabolic=values["time.cfl_parabolic"],
        cfl_hyperbolic=values["time.cfl_hyperbolic"],
        newton_tol=values["time.newton_tol"],
        newton_max_iter=values["time.newton_max_iter"],
        snapshot_times=tuple(values["time.snapshot_times"]),
        dt=values["time.dt"],
        front_threshold=values["time.front_threshold"],
        snapshot_every=values["time.snapshot_every"],
    )
    config = ExperimentConfig(
        values=values,
        initial=_initial_condition(source, values["initial.family"]),
        time=time,
        source=source,
    )
    _check_initial_field(config)
    return config


def read_toml(path) -> dict:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise ConfigurationError("config file {} does not exist".format(path), "--config")
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError("cannot parse {}: {}".format(path, e), "--config")


def load_config(path=None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    source = read_toml(path) if path else {}
    for text in overrides:
        dotted, value = parse_override(text)
        _assign(source, dotted, value)
    config = config_from_source(source)
    logger.debug("loaded config %s with %d overrides", path or "<defaults>", len(overrides))
    return config


def sweep_values(config: ExperimentConfig) -> List[Any]:
    values = config["sweep.values"]
    if config["sweep.axis"] is None or values is None:
        raise ConfigurationError("sweep needs axis and values", "sweep.axis")
    return values
