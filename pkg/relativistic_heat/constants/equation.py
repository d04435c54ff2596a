from enum import Enum


class Classification(str, Enum):
    SUBHARMONIC = "subharmonic"
    SUPERHARMONIC = "superharmonic"
    HARMONIC = "harmonic"
    INDETERMINATE = "indeterminate"


class ParabolicClassification(str, Enum):
    SUBSOLUTION = "subsolution"
    SUPERSOLUTION = "supersolution"
    SOLUTION = "solution"
    INDETERMINATE = "indeterminate"


class BoundaryKind(str, Enum):
    DIRICHLET = "dirichlet"
    NO_FLUX = "no-flux"


class TimeMethod(str, Enum):
    EXPLICIT_EULER = "explicit"
    IMPLICIT_EULER = "implicit"


class EquationTag(str, Enum):
    RELATIVISTIC = "relativistic"
    CLASSICAL_HEAT = "heat"
    TELEGRAPH = "telegraph"


class DiscreteForm(str, Enum):
    Q = "q"
    FLUX = "flux"


class Verdict(str, Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    INCONCLUSIVE = "inconclusive"
