from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification; ``passed`` is derived, never supplied."""

    name: str
    violation: float
    tolerance: float
    context: Dict[str, Any] = field(default_factory=dict)
    exploratory: bool = False

    def __post_init__(self):
        violation = float(self.violation)
        if not np.isfinite(violation):
            violation = float("inf")
        object.__setattr__(self, "violation", max(violation, 0.0))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def passed(self) -> bool:
        return self.violation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "violation": self.violation,
            "tolerance": self.tolerance,
            "exploratory": self.exploratory,
            "context": jsonable(self.context),
        }


def jsonable(value):
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value
