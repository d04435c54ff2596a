from abc import ABC, abstractmethod
from typing import List

FLOAT_FORMAT = "%.17g"


class Format(ABC):
    @abstractmethod
    def build(self, *args) -> str:
        raise NotImplementedError

    @abstractmethod
    def build_body(self, *args):
        raise NotImplementedError


class Formats:
    class _Snapshot(Format):
        PATH_FORMAT = "snapshots/{name}-t{time:.6f}.csv"

        def build(self, name: str, time: float) -> str:
            return self.PATH_FORMAT.format(name=name, time=time)

        def build_body(self, dim: int) -> List[str]:
            return ["x", "y", "value"] if dim == 2 else ["x", "value"]

    class _Series(Format):
        PATH_FORMAT = "{name}-series.csv"
        COLUMNS = ["t", "mass", "entropy", "max", "min", "front"]

        def build(self, name: str) -> str:
            return self.PATH_FORMAT.format(name=name)

        def build_body(self) -> List[str]:
            return list(self.COLUMNS)

    class _Report(Format):
        PATH_FORMAT = "{name}-report.json"

        def build(self, name: str) -> str:
            return self.PATH_FORMAT.format(name=name)

        def build_body(self, report, series_path: str, snapshot_paths: List[str]) -> dict:
            return {
                "equation": report.equation_tag.value,
                "method": report.method.value if report.method else None,
                "c": report.params.c if report.params else None,
                "grid": {
                    "n": list(report.grid.n),
                    "lower": list(report.grid.lower),
                    "upper": list(report.grid.upper),
                },
                "dt": report.dt,
                "clip_count": report.clip_count,
                "newton_iterations": report.newton_iterations,
                "series": series_path,
                "times": report.times.tolist(),
                "mass": report.mass_series.tolist(),
                "entropy": [None if v != v else v for v in report.entropy_series.tolist()],
                "max": report.max_series.tolist(),
                "min": report.min_series.tolist(),
                "front": None
                if report.front_position_series is None
                else [None if v != v else v for v in report.front_position_series.tolist()],
                "snapshots": [
                    {"t": t, "path": path}
                    for (t, _), path in zip(report.snapshots, snapshot_paths)
                ],
            }

    class _ConvergenceLog(Format):
        PATH_FORMAT = "{name}-convergence.json"

        def build(self, name: str) -> str:
            return self.PATH_FORMAT.format(name=name)

        def build_body(self, solution) -> dict:
            return {
                "form": solution.form.value,
                "iterations": solution.iterations,
                "residual_norm": solution.residual_norm,
                "history": solution.convergence_log(),
            }

    class _Stationary(Format):
        PATH_FORMAT = "{name}-stationary.csv"

        def build(self, name: str) -> str:
            return self.PATH_FORMAT.format(name=name)

        def build_body(self, dim: int) -> List[str]:
            return ["x", "y", "w", "u"] if dim == 2 else ["x", "w", "u"]

    class _Scorecard(Format):
        PATH_FORMAT = "scorecard-{suite}.json"
        TABLE_PATH_FORMAT = "scorecard-{suite}.csv"
        EXTRA_PATH_FORMAT = "tables/{suite}-{table}.csv"

        def build(self, suite: str) -> str:
            return self.PATH_FORMAT.format(suite=suite)

        def build_table(self, suite: str) -> str:
            return self.TABLE_PATH_FORMAT.format(suite=suite)

        def build_extra(self, suite: str, table: str) -> str:
            return self.EXTRA_PATH_FORMAT.format(suite=suite, table=table)

        def build_body(self, checks, evidence) -> list:
            return [c.to_dict() for c in checks] + [e.to_dict() for e in evidence]

    class _SweepPoint(Format):
        PATH_FORMAT = "point-{index:03d}"
        INDEX_PATH = "sweep.json"

        def build(self, index: int) -> str:
            return self.PATH_FORMAT.format(index=index)

        def build_body(self, index: int, axis: str, value) -> dict:
            return {"index": index, "axis": axis, "value": value, "directory": self.build(index)}

    class _Manifest(Format):
        PATH = "manifest.json"

        def build(self) -> str:
            return self.PATH

        def build_body(self, command: str, config: dict, entries: list) -> dict:
            return {"command": command, "config": config, "files": entries}

    Snapshot = _Snapshot()
    Series = _Series()
    Report = _Report()
    ConvergenceLog = _ConvergenceLog()
    Stationary = _Stationary()
    Scorecard = _Scorecard()
    SweepPoint = _SweepPoint()
    Manifest = _Manifest()
