"""Checks that turn evolved runs into pass/fail outcomes or evidence.

Every check returns a ``CheckResult`` whose ``passed`` flag is derived from
``violation <= tolerance``. The light-cone probes return ``LightConeEvidence``
and never gate anything.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from relativistic_heat.constants.equation import (
    ParabolicClassification,
    TimeMethod,
    Verdict,
)
from relativistic_heat.constants.tolerances import (
    TELEGRAPH_EXCESS,
    TELEGRAPH_PULSE_HEIGHT,
    spatial_tolerance,
    temporal_tolerance,
)
from relativistic_heat.exceptions import (
    DomainError,
    DomainTooSmallError,
    GridMismatchError,
    InvalidParameterError,
)
from relativistic_heat.features import grid as fv
from relativistic_heat.features.checks import CheckResult, jsonable
from relativistic_heat.features.core import (
    DEFAULT_PARAMS,
    ModelParams,
    u_to_w,
)
from relativistic_heat.features.evolve import (
    RunReport,
    TimeStepConfig,
    common_dt,
    evolve,
    evolve_classical_heat,
    evolve_telegraph,
    front_position,
)
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField
from relativistic_heat.features.initial_conditions import pulse, two_pulses

logger = logging.getLogger(__name__)

Point = Union[float, Sequence[float]]


@dataclass
class LightConeEvidence:
    apex: Tuple[Tuple[float, ...], float]
    cone_cells: int
    max_deviation_in_cone: float
    deviation_outside_cone: float
    verdict: Verdict
    tolerance: float = 0.0
    name: str = "light_cone"
    context: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "exploratory": True,
            "verdict": self.verdict.value,
            "apex": {"x": list(self.apex[0]), "t": self.apex[1]},
            "cone_cells": self.cone_cells,
            "max_deviation_in_cone": self.max_deviation_in_cone,
            "deviation_outside_cone": self.deviation_outside_cone,
            "tolerance": self.tolerance,
            "context": jsonable(self.context),
        }


def _same_discretization(a: RunReport, b: RunReport, same_times: bool = True):
    if a.grid != b.grid:
        raise GridMismatchError("mismatched discretization: grids differ")
    if same_times and not np.array_equal(a.times, b.times):
        raise GridMismatchError("mismatched discretization: time levels differ")
    if a.params != b.params:
        raise GridMismatchError("mismatched discretization: model parameters differ")


def check_weak_max(report: RunReport, bc: Optional[BoundaryCondition] = None) -> CheckResult:
    """sup/inf over the run stay within sup/inf over initial data and lateral boundary."""
    bc = bc or report.boundary
    upper = float(report.initial.values.max())
    lower = float(report.initial.values.min())
    if bc.is_dirichlet:
        upper = max(upper, bc.max_value())
        lower = min(lower, bc.min_value())
    run_max = float(np.max(report.max_series))
    run_min = float(np.min(report.min_series))
    violation = max(0.0, run_max - upper, lower - run_min)
    return CheckResult(
        "weak_max",
        violation,
        spatial_tolerance(report.grid.h_min),
        {
            "equation": report.equation_tag.value,
            "run_max": run_max,
            "run_min": run_min,
            "boundary_max": upper,
            "boundary_min": lower,
        },
    )


def _paired_fields(a: RunReport, b: RunReport) -> List[Tuple[float, ScalarField, ScalarField]]:
    for report in (a, b):
        if len(report.snapshots) != report.times.size:
            raise InvalidParameterError(
                "comparison needs every time level recorded, got {} of {}".format(
                    len(report.snapshots), report.times.size
                ),
                "time.snapshot_every",
            )
    return [(t, f, g) for (t, f), (_, g) in zip(a.snapshots, b.snapshots)]


def check_comparison_parabolic(report_lo: RunReport, report_hi: RunReport) -> CheckResult:
    """max over all cells and time levels of u_lo - u_hi; runs need snapshot_every=1."""
    _same_discretization(report_lo, report_hi)
    pairs = _paired_fields(report_lo, report_hi)
    excess = [float(np.max(lo.values - hi.values)) for _, lo, hi in pairs]
    violation = max(0.0, max(excess))
    tol = spatial_tolerance(report_lo.grid.h_min) + temporal_tolerance(
        max(report_lo.dt, report_hi.dt)
    )
    return CheckResult(
        "comparison_parabolic",
        violation,
        tol,
        {"compared_times": len(pairs), "max_excess": max(excess)},
    )


def check_uniqueness(report_a: RunReport, report_b: RunReport) -> CheckResult:
    _same_discretization(report_a, report_b, same_times=False)
    if report_a.t_end != report_b.t_end:
        raise GridMismatchError("mismatched discretization: final times differ")
    distance = float(np.max(np.abs(report_a.final.values - report_b.final.values)))
    tol = temporal_tolerance(report_a.dt + report_b.dt) + spatial_tolerance(
        report_a.grid.h_min
    )
    return CheckResult(
        "uniqueness",
        distance,
        tol,
        {
            "methods": [
                m.value if m else None for m in (report_a.method, report_b.method)
            ],
            "dts": [report_a.dt, report_b.dt],
        },
    )


def _front_series(report: RunReport, threshold: Optional[float]):
    if threshold is None or threshold == report.front_threshold:
        return report.times, report.front_position_series
    times = np.array([t for t, _ in report.snapshots])
    fronts = np.array([front_position(f, threshold) for _, f in report.snapshots])
    return times, fronts


def measure_front_speed(report: RunReport, threshold: Optional[float] = None) -> float:
    """Least-squares front speed over the later half of the moving window."""
    if report.grid.dim != 1:
        raise InvalidParameterError("front speed needs a 1D run", "grid.dim")
    times, fronts = _front_series(report, threshold)
    seen = ~np.isnan(fronts)
    if not seen.any():
        return 0.0
    last_center = report.grid.centers(0)[-1]
    if np.nanmax(fronts) >= last_center:
        raise DomainTooSmallError("domain too small")

    times, fronts = times[seen], fronts[seen]
    moved = np.nonzero(fronts != fronts[0])[0]
    if moved.size == 0:
        return 0.0
    start = max(0, moved[0] - 1)
    window = np.arange(start, times.size)
    window = window[window.size // 2 :] if window.size >= 4 else window
    slope = np.polyfit(times[window], fronts[window], 1)[0]
    logger.debug(
        "front speed %.6g from %d samples on [%.4g, %.4g]",
        slope,
        window.size,
        times[window[0]],
        times[window[-1]],
    )
    return float(slope)


def telegraph_two_pulse_run(
    params: ModelParams = DEFAULT_PARAMS,
    grid: Optional[Grid] = None,
    config: Optional[TimeStepConfig] = None,
    amplitude: float = TELEGRAPH_PULSE_HEIGHT,
    separation: float = 0.6,
    width: float = 0.05,
) -> RunReport:
    grid = grid or Grid.uniform(400, -1.0, 1.0)
    config = config or TimeStepConfig(t_end=0.6)
    u0, ut0 = two_pulses(grid, params, amplitude, separation, width)
    return evolve_telegraph(u0, ut0, BoundaryCondition.no_flux(), params, config)


def telegraph_counterexample(
    params: ModelParams = DEFAULT_PARAMS,
    grid: Optional[Grid] = None,
    config: Optional[TimeStepConfig] = None,
    amplitude: float = TELEGRAPH_PULSE_HEIGHT,
    report: Optional[RunReport] = None,
) -> CheckResult:
    """Two converging pulses of the telegraph equation overshoot their own height."""
    if report is None:
        report = telegraph_two_pulse_run(params, grid, config, amplitude)
    peak_at = int(np.argmax(report.max_series))
    peak = float(report.max_series[peak_at])
    target = amplitude * (1.0 + TELEGRAPH_EXCESS)
    return CheckResult(
        "telegraph_counterexample",
        max(0.0, target - peak),
        0.0,
        {"peak": peak, "peak_time": float(report.times[peak_at]), "target": target},
    )


def telegraph_single_pulse_control(
    params: ModelParams = DEFAULT_PARAMS,
    grid: Optional[Grid] = None,
    config: Optional[TimeStepConfig] = None,
    amplitude: float = TELEGRAPH_PULSE_HEIGHT,
) -> CheckResult:
    grid = grid or Grid.uniform(400, -1.0, 1.0)
    config = config or TimeStepConfig(t_end=0.6)
    u0, ut0 = pulse(grid, params, amplitude, center=-0.3)
    report = evolve_telegraph(u0, ut0, BoundaryCondition.no_flux(), params, config)
    peak = float(np.max(report.max_series))
    tol = spatial_tolerance(grid.h_min)
    return CheckResult(
        "telegraph_single_pulse",
        max(0.0, peak - amplitude),
        tol,
        {"peak": peak},
    )


def relativistic_contrast(
    params: ModelParams = DEFAULT_PARAMS,
    grid: Optional[Grid] = None,
    config: Optional[TimeStepConfig] = None,
    amplitude: float = TELEGRAPH_PULSE_HEIGHT,
) -> CheckResult:
    """The telegraph initial data under the relativistic equation never overshoot."""
    grid = grid or Grid.uniform(400, -1.0, 1.0)
    config = config or TimeStepConfig(t_end=0.6)
    u0, _ = two_pulses(grid, params, amplitude)
    report = evolve(u0, BoundaryCondition.no_flux(), params, config)
    increments = np.diff(report.max_series)
    peak = float(np.max(report.max_series))
    return CheckResult(
        "relativistic_contrast",
        max(0.0, peak - amplitude),
        spatial_tolerance(grid.h_min),
        {"peak": peak, "max_increment": float(increments.max()) if increments.size else 0.0},
    )


def classical_limit_study(
    u0: ScalarField,
    bc: BoundaryCondition,
    t_end: float,
    c_list: Sequence[float] = (2.0, 10.0, 50.0),
    config: Optional[TimeStepConfig] = None,
) -> pd.DataFrame:
    """L-infinity distance at t_end between relativistic runs and the heat run."""
    if list(c_list) != sorted(c_list):
        raise InvalidParameterError("must be increasing", "c_list")
    base = config or TimeStepConfig()
    dt = common_dt(u0.grid, c_list, base)
    shared = TimeStepConfig(
        method=TimeMethod.EXPLICIT_EULER,
        t_end=t_end,
        cfl_parabolic=base.cfl_parabolic,
        cfl_hyperbolic=base.cfl_hyperbolic,
        dt=dt,
    )
    reference = evolve_classical_heat(u0, bc, shared).final.values

    rows = []
    for c in c_list:
        final = evolve(u0, bc, ModelParams(c=c), shared).final.values
        distance = float(np.max(np.abs(final - reference)))
        rows.append({"c": float(c), "distance": distance, "distance_c2": distance * c * c})
        logger.info("limit study: c=%g distance=%.3e", c, distance)
    return pd.DataFrame(rows, columns=["c", "distance", "distance_c2"])


def check_classical_limit(table: pd.DataFrame) -> CheckResult:
    distances = table["distance"].to_numpy()
    steps = np.diff(distances)
    violation = float(max(0.0, steps.max())) if steps.size else 0.0
    return CheckResult(
        "classical_limit",
        violation,
        0.0,
        {"c": table["c"].tolist(), "distance": distances.tolist()},
    )


def _cell_of(grid: Grid, x: Point) -> Tuple[int, ...]:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != grid.dim:
        raise DomainError("apex has dim {}, grid has {}".format(x.size, grid.dim))
    index = []
    for a in range(grid.dim):
        if not (grid.lower[a] < x[a] < grid.upper[a]):
            raise DomainError("apex outside the spacetime domain")
        k = int((x[a] - grid.lower[a]) / grid.h[a])
        index.append(min(k, grid.n[a] - 1))
    return tuple(index)


def _cone_setup(report: RunReport, apex: Tuple[Point, float], params: ModelParams):
    x, t = apex
    if not (0.0 < t <= report.t_end):
        raise DomainError("apex outside the spacetime domain")
    grid = report.grid
    cell = _cell_of(grid, x)
    centre = np.array([grid.centers(a)[cell[a]] for a in range(grid.dim)])
    distance = np.sqrt(sum((m - c) ** 2 for m, c in zip(grid.mesh(), centre)))
    past = [(tau, f) for tau, f in report.snapshots if tau <= t + 1e-12]
    if not past:
        raise DomainError("no snapshots at or before the apex time")
    apex_time, apex_field = past[-1]
    slices = [(tau, f, distance <= params.c * (apex_time - tau) + 1e-12) for tau, f in past]
    return cell, tuple(float(v) for v in centre), apex_time, apex_field, slices


def _default_tolerance(report: RunReport) -> float:
    return spatial_tolerance(report.grid.h_min) + temporal_tolerance(report.dt)


def light_cone_probe(
    report: RunReport,
    apex: Tuple[Point, float],
    params: Optional[ModelParams] = None,
    tol: Optional[float] = None,
) -> LightConeEvidence:
    """Is the field constant in the backward light cone of an interior maximum?"""
    params = params or report.params or DEFAULT_PARAMS
    tol = _default_tolerance(report) if tol is None else tol
    cell, centre, apex_time, apex_field, slices = _cone_setup(report, apex, params)
    peak = float(apex_field.values[cell])

    inside, outside, cells, overall = 0.0, 0.0, 0, -np.inf
    for _, f, cone in slices:
        deviation = np.abs(f.values - peak)
        overall = max(overall, float(f.values.max()))
        cells += int(np.count_nonzero(cone))
        if cone.any():
            inside = max(inside, float(deviation[cone].max()))
        if (~cone).any():
            outside = max(outside, float(deviation[~cone].max()))

    on_boundary = any(k in (0, n - 1) for k, n in zip(cell, report.grid.n))
    if overall > peak + tol or on_boundary or apex_time <= 0:
        verdict = Verdict.INCONCLUSIVE
    elif inside <= tol:
        verdict = Verdict.CONSISTENT
    else:
        verdict = Verdict.INCONSISTENT
    return LightConeEvidence(
        apex=(centre, apex_time),
        cone_cells=cells,
        max_deviation_in_cone=inside,
        deviation_outside_cone=outside,
        verdict=verdict,
        tolerance=tol,
        context={"apex_value": peak, "max_before_apex": overall},
    )


def light_cone_tangency_probe(
    report: RunReport,
    report_prime: RunReport,
    apex: Tuple[Point, float],
    params: Optional[ModelParams] = None,
    tol: Optional[float] = None,
) -> LightConeEvidence:
    """Ordered runs touching at the apex: do they coincide in its backward cone?"""
    _same_discretization(report, report_prime)
    params = params or report.params or DEFAULT_PARAMS
    tol = _default_tolerance(report) if tol is None else tol
    cell, centre, apex_time, _, slices = _cone_setup(report, apex, params)
    primes = {tau: f for tau, f in report_prime.snapshots}

    inside, outside, cells, ordered = 0.0, 0.0, 0, True
    touching = None
    for tau, f, cone in slices:
        if tau not in primes:
            continue
        gap = primes[tau].values - f.values
        if tau == apex_time:
            touching = abs(float(gap[cell])) <= tol
        if cone.any():
            ordered = ordered and float(gap[cone].min()) >= -tol
            inside = max(inside, float(np.abs(gap[cone]).max()))
            cells += int(np.count_nonzero(cone))
        if (~cone).any():
            outside = max(outside, float(np.abs(gap[~cone]).max()))

    if not (touching and ordered):
        verdict = Verdict.INCONCLUSIVE
    elif inside <= tol:
        verdict = Verdict.CONSISTENT
    else:
        verdict = Verdict.INCONSISTENT
    return LightConeEvidence(
        apex=(centre, apex_time),
        cone_cells=cells,
        max_deviation_in_cone=inside,
        deviation_outside_cone=outside,
        verdict=verdict,
        tolerance=tol,
        name="light_cone_tangency",
        context={"touching": bool(touching), "ordered": ordered},
    )


def classify_run(
    report: RunReport,
    bc: Optional[BoundaryCondition] = None,
    params: Optional[ModelParams] = None,
    tol: Optional[float] = None,
) -> pd.DataFrame:
    """Share of cells that are sub-, super- or exact solutions of w_t = Q̃w per interval."""
    params = params or report.params or DEFAULT_PARAMS
    bc = bc or report.boundary
    bc.check_grid(report.grid)
    bc_w = bc.mapped(np.log)
    rows = []
    for (t0, f0), (t1, f1) in zip(report.snapshots[:-1], report.snapshots[1:]):
        step = t1 - t0
        w0 = ScalarField(report.grid, u_to_w(f0.values))
        w1 = ScalarField(report.grid, u_to_w(f1.values))
        band = tol
        if band is None:
            band = spatial_tolerance(report.grid.h_min) + temporal_tolerance(step)
        qtilde = 0.5 * (
            fv.discrete_qtilde(w0, bc_w, params).values
            + fv.discrete_qtilde(w1, bc_w, params).values
        )
        residual = (w1.values - w0.values) / step - qtilde
        counts = {
            ParabolicClassification.SUBSOLUTION: np.count_nonzero(residual < -band),
            ParabolicClassification.SUPERSOLUTION: np.count_nonzero(residual > band),
            ParabolicClassification.SOLUTION: np.count_nonzero(np.abs(residual) <= band),
        }
        total = float(residual.size)
        rows.append(
            {
                "t_start": t0,
                "t_end": t1,
                "subsolution": counts[ParabolicClassification.SUBSOLUTION] / total,
                "supersolution": counts[ParabolicClassification.SUPERSOLUTION] / total,
                "solution": counts[ParabolicClassification.SOLUTION] / total,
                "max_residual": float(np.abs(residual).max()),
            }
        )
    return pd.DataFrame(
        rows,
        columns=["t_start", "t_end", "subsolution", "supersolution", "solution", "max_residual"],
    )
