from .constants.equation import BoundaryKind, DiscreteForm, EquationTag, TimeMethod  # noqa: F401
from .features.core import ModelParams  # noqa: F401
from .features.evolve import (  # noqa: F401
    TimeStepConfig,
    evolve,
    evolve_classical_heat,
    evolve_telegraph,
)
from .features.grid import BoundaryCondition, Grid, ScalarField  # noqa: F401
from .features.stationary import StationaryProblem, shoot_1d, solve  # noqa: F401
from .features.suite import run_suite  # noqa: F401
