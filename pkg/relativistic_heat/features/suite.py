"""Named verification suites and the scorecard they produce.

Each suite section is a function of ``SuiteSettings`` returning a
``Section``. Sections share nothing, so ``run_suite`` can hand them to a
thread pool and merge the results in a fixed order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd

from relativistic_heat.constants.equation import TimeMethod
from relativistic_heat.constants.tolerances import (
    FRONT_THRESHOLD,
    NEWTON_TOL,
    spatial_tolerance,
)
from relativistic_heat.exceptions import ConfigurationError
from relativistic_heat.features import core
from relativistic_heat.features import grid as fv
from relativistic_heat.features import initial_conditions as ic
from relativistic_heat.features import stationary as st
from relativistic_heat.features import verify as vf
from relativistic_heat.features.checks import CheckResult
from relativistic_heat.features.core import ModelParams
from relativistic_heat.features.evolve import (
    RunReport,
    TimeStepConfig,
    evolve,
    evolve_classical_heat,
)
from relativistic_heat.features.grid import BoundaryCondition, Grid, ScalarField
from relativistic_heat.utils.data_processors import scorecard_frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteSettings:
    quick: bool = False
    seed: int = 0
    c: float = 1.0
    jobs: int = 1

    def pick(self, full, quick):
        return quick if self.quick else full


@dataclass
class Section:
    checks: List[CheckResult] = field(default_factory=list)
    evidence: List[vf.LightConeEvidence] = field(default_factory=list)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)

    def merge(self, other: "Section"):
        self.checks.extend(other.checks)
        self.evidence.extend(other.evidence)
        self.tables.update(other.tables)


@dataclass
class Scorecard(Section):
    suite: str = "all"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.exploratory)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.exploratory and not c.passed]

    def to_frame(self) -> pd.DataFrame:
        return scorecard_frame(self.checks, self.evidence)


def _manufactured_w(rng: np.random.Generator):
    """Random smooth w(x, y) with analytic gradient and Hessian."""
    alpha, beta, gamma = rng.uniform(-1.0, 1.0, 3)
    a, b, d = rng.uniform(-0.5, 0.5, 3)

    def evaluate(x, y):
        phase = beta * x + gamma * y
        s, co = np.sin(phase), np.cos(phase)
        w = alpha * s + a * x * y + b * x**2 + d * y**3
        grad = np.array(
            [alpha * beta * co + a * y + 2 * b * x, alpha * gamma * co + a * x + 3 * d * y**2]
        )
        hess = np.array(
            [
                [-alpha * beta**2 * s + 2 * b, -alpha * beta * gamma * s + a],
                [-alpha * beta * gamma * s + a, -alpha * gamma**2 * s + 6 * d * y],
            ]
        )
        return w, grad, hess

    return evaluate


def core_section(settings: SuiteSettings) -> Section:
    rng = np.random.default_rng(settings.seed)
    section = Section()
    count = settings.pick(10000, 1000)

    worst = 0.0
    for c in (0.5, 1.0, 10.0):
        params = ModelParams(c=c)
        u = rng.uniform(0.0, 10.0, count)
        grad = rng.normal(0.0, 1.0, (count, 2)) * 10.0 ** rng.uniform(-3, 6, (count, 1))
        magnitude = np.linalg.norm(core.flux(u, grad, params), axis=-1)
        worst = max(worst, float(np.max((magnitude - c * u) / np.maximum(c * u, 1e-300))))
    section.checks.append(CheckResult("flux_bound", worst, 1e-14, {"states": 3 * count}))

    identity_error, mismatches = 0.0, 0
    for _ in range(20):
        evaluate = _manufactured_w(rng)
        c = float(rng.choice([0.5, 1.0, 10.0]))
        params = ModelParams(c=c)
        for x, y in rng.uniform(-1.0, 1.0, (10, 2)):
            w, p, hw = evaluate(x, y)
            u = np.exp(w)
            du = u * p
            d2u = u * (hw + np.outer(p, p))
            lhs = core.flux_divergence(u, du, d2u, params)
            q = core.q_operator(w, p, hw, params)
            rhs = u * q / np.sqrt(1.0 + params.inv_c2 * p.dot(p))
            identity_error = max(identity_error, abs(lhs - rhs) / max(1.0, abs(rhs)))
            if abs(q) > 1e-8 and core.classify_residual(lhs, 0.0) != core.classify_residual(q, 0.0):
                mismatches += 1
    section.checks.append(CheckResult("transform_identity", identity_error, 1e-10))
    section.checks.append(CheckResult("sign_equivalence", mismatches, 0.0))

    eig_error = 0.0
    for p in rng.normal(0.0, 3.0, (100, 2)):
        low, high = core.ellipticity_eigenvalues(p)
        numeric = np.linalg.eigvalsh(core.principal_part(p))
        eig_error = max(eig_error, abs(numeric[0] - low), abs(numeric[1] - high))
    section.checks.append(CheckResult("ellipticity_eigenvalues", eig_error, 1e-12))
    steep = core.ellipticity_eigenvalues(np.array([10.0, 0.0]))[0]
    section.checks.append(
        CheckResult(
            "non_uniform_ellipticity",
            max(0.0, steep - 0.01 + 1e-15),
            0.0,
            {"lambda_min": steep},
        )
    )
    return section


def _random_positive_field(grid: Grid, rng: np.random.Generator) -> ScalarField:
    return ScalarField(grid, rng.uniform(0.1, 2.0, grid.shape))


def _order(errors: List[float]) -> float:
    return float(np.log2(errors[0] / errors[1]))


def _q_error(n: int, params: ModelParams) -> float:
    grid = Grid.uniform(n, 0.0, 1.0)
    x = grid.centers(0)
    w = ScalarField(grid, np.sin(np.pi * x))
    bc = BoundaryCondition.dirichlet_function(grid, lambda x: np.sin(np.pi * x))
    p = (np.pi * np.cos(np.pi * x))[:, None]
    hess = (-(np.pi**2) * np.sin(np.pi * x))[:, None, None]
    exact = core.q_operator(0.0, p, hess, params)
    return float(np.max(np.abs(fv.discrete_q(w, bc, params).values - exact)))


def _flux_divergence_error(n: int, params: ModelParams) -> float:
    grid = Grid.uniform(n, 0.0, 1.0)
    x = grid.centers(0)

    def u_of(x):
        return 1.0 + 0.5 * np.sin(np.pi * x)

    u = ScalarField(grid, u_of(x))
    bc = BoundaryCondition.dirichlet_function(grid, u_of)
    du = (0.5 * np.pi * np.cos(np.pi * x))[:, None]
    d2u = (-0.5 * np.pi**2 * np.sin(np.pi * x))[:, None, None]
    exact = core.flux_divergence(u.values, du, d2u, params)
    discrete = fv.divergence(fv.face_flux(u, bc, params)).values
    return float(np.max(np.abs(discrete - exact)[1:-1]))


def grid_section(settings: SuiteSettings) -> Section:
    rng = np.random.default_rng(settings.seed + 1)
    params = ModelParams(c=settings.c)
    section = Section()

    drift, bound = 0.0, 0.0
    for grid in (Grid.uniform(64, -1.0, 1.0), Grid.uniform(16, -1.0, 1.0, dim=2)):
        for _ in range(10):
            u = _random_positive_field(grid, rng)
            fluxes = fv.face_flux(u, BoundaryCondition.no_flux(), params)
            div = fv.divergence(fluxes).values
            total = abs(float(np.sum(div))) / max(float(np.sum(np.abs(div))), 1e-300)
            drift = max(drift, total)
            if grid.dim == 1:
                neighbours = np.maximum(u.values[:-1], u.values[1:])
                excess = np.abs(fluxes.values[0][1:-1]) - params.c * neighbours
                bound = max(bound, float(np.max(excess)))
    section.checks.append(CheckResult("discrete_conservation", drift, 1e-13))
    section.checks.append(CheckResult("face_flux_bound", max(bound, 0.0), 1e-12))

    sizes = settings.pick((32, 64), (16, 32))
    q_order = _order([_q_error(n, params) for n in sizes])
    f_order = _order([_flux_divergence_error(n, params) for n in sizes])
    section.checks.append(
        CheckResult("discrete_q_order", max(0.0, 1.9 - q_order), 0.0, {"order": q_order})
    )
    section.checks.append(
        CheckResult("flux_divergence_order", max(0.0, 1.9 - f_order), 0.0, {"order": f_order})
    )
    return section


def _parabolic_cases(grid: Grid) -> List[Tuple[str, ScalarField, BoundaryCondition, float]]:
    bump = ic.gaussian_bump(grid, amplitude=1.0, width=0.15, floor=0.1)
    compact = ic.compact_bump(grid, amplitude=1.0, radius=0.3)
    return [
        ("bump-noflux-c1", bump, BoundaryCondition.no_flux(), 1.0),
        ("bump-noflux-c0.5", bump, BoundaryCondition.no_flux(), 0.5),
        ("bump-noflux-c5", bump, BoundaryCondition.no_flux(), 5.0),
        ("bump-dirichlet-0.1", bump, BoundaryCondition.dirichlet_constant(grid, 0.1), 1.0),
        ("bump-dirichlet-0.5", bump, BoundaryCondition.dirichlet_constant(grid, 0.5), 1.0),
        ("bump-dirichlet-sides", bump, BoundaryCondition.dirichlet_sides(grid, (0.2, 0.8)), 1.0),
        ("compact-noflux", compact, BoundaryCondition.no_flux(), 1.0),
        ("compact-dirichlet", compact, BoundaryCondition.dirichlet_constant(grid, 0.05), 1.0),
        ("compact-noflux-c2", compact, BoundaryCondition.no_flux(), 2.0),
        ("bump-dirichlet-c2", bump, BoundaryCondition.dirichlet_constant(grid, 0.3), 2.0),
    ]


def parabolic_section(settings: SuiteSettings) -> Section:
    section = Section()
    grid = Grid.uniform(settings.pick(400, 100), -1.0, 1.0)
    t_end = settings.pick(0.02, 0.02)
    config = TimeStepConfig(t_end=t_end, snapshot_every=settings.pick(400, 50))

    weak, mass_drift, entropy_rise = [], 0.0, 0.0
    for name, u0, bc, c in _parabolic_cases(grid):
        report = evolve(u0, bc, ModelParams(c=c), config)
        weak.append(vf.check_weak_max(report))
        if not bc.is_dirichlet:
            drift = np.abs(report.mass_series - report.mass_series[0]) / report.mass_series[0]
            mass_drift = max(mass_drift, float(np.max(drift)))
            entropy_rise = max(entropy_rise, float(np.max(np.diff(report.entropy_series))))
    section.checks.append(
        CheckResult(
            "weak_max",
            max(r.violation for r in weak),
            weak[0].tolerance,
            {"runs": len(weak), "violations": [r.violation for r in weak]},
        )
    )
    section.checks.append(CheckResult("mass_conservation", mass_drift, 1e-12))
    section.checks.append(CheckResult("entropy_decrease", max(entropy_rise, 0.0), 1e-10))

    comparisons = []
    dense = TimeStepConfig(t_end=t_end, snapshot_every=1)
    for lo, hi, bc_lo, bc_hi, c in _ordered_pairs(grid):
        params = ModelParams(c=c)
        comparisons.append(
            vf.check_comparison_parabolic(
                evolve(lo, bc_lo, params, dense), evolve(hi, bc_hi, params, dense)
            )
        )
    section.checks.append(
        CheckResult(
            "comparison_parabolic",
            max(r.violation for r in comparisons),
            min(r.tolerance for r in comparisons),
            {"pairs": len(comparisons)},
        )
    )

    smooth = ic.gaussian_bump(grid, amplitude=1.0, width=0.2, floor=0.5)
    short = TimeStepConfig(t_end=settings.pick(0.005, 0.01))
    explicit = evolve(smooth, BoundaryCondition.no_flux(), ModelParams(c=settings.c), short)
    implicit = evolve(
        smooth,
        BoundaryCondition.no_flux(),
        ModelParams(c=settings.c),
        TimeStepConfig(t_end=short.t_end, method=TimeMethod.IMPLICIT_EULER),
    )
    section.checks.append(vf.check_uniqueness(explicit, implicit))

    again = evolve(smooth, BoundaryCondition.no_flux(), ModelParams(c=settings.c), short)
    difference = explicit.to_frame().compare(again.to_frame())
    section.checks.append(CheckResult("determinism", float(len(difference)), 0.0))
    return section


def _ordered_pairs(grid: Grid):
    bump = ic.gaussian_bump(grid, amplitude=1.0, width=0.1, floor=0.1)
    wide = ic.gaussian_bump(grid, amplitude=1.0, width=0.2, floor=0.1)
    compact = ic.compact_bump(grid, amplitude=0.8, radius=0.3)
    no_flux = BoundaryCondition.no_flux()
    low = BoundaryCondition.dirichlet_constant(grid, 0.1)
    high = BoundaryCondition.dirichlet_constant(grid, 0.3)
    return [
        (bump, bump.with_values(bump.values + 0.2), no_flux, no_flux, 1.0),
        (bump, wide, no_flux, no_flux, 1.0),
        (bump, wide, low, low, 1.0),
        (bump, wide, low, high, 1.0),
        (compact, compact.with_values(compact.values + 0.1), no_flux, no_flux, 1.0),
        (compact, bump, no_flux, no_flux, 1.0),
        (bump, bump.with_values(bump.values * 1.5), low, high, 1.0),
        (bump, wide, no_flux, no_flux, 0.5),
        (bump, wide, no_flux, no_flux, 5.0),
        (compact, wide, low, low, 2.0),
    ]


RELATIVISTIC_FRONT_CENTER = -0.7
RELATIVISTIC_FRONT_THRESHOLD = 1e-6


def _front_run(
    n: int,
    t_end: float,
    classical: bool,
    settings: SuiteSettings,
    center: float = 0.0,
    threshold: float = FRONT_THRESHOLD,
) -> RunReport:
    grid = Grid.uniform(n, -1.0, 1.0)
    u0 = ic.compact_bump(grid, amplitude=1.0, center=center, radius=0.2)
    config = TimeStepConfig(t_end=t_end, front_threshold=threshold)
    if classical:
        return evolve_classical_heat(u0, BoundaryCondition.no_flux(), config)
    return evolve(u0, BoundaryCondition.no_flux(), ModelParams(c=settings.c), config)


def propagation_section(settings: SuiteSettings) -> Section:
    section = Section()
    c = settings.c
    # bump near the left wall so the fit window covers t in [0.65, 1.3] / c
    t_end = 1.3 / c
    coarse, fine = settings.pick((400, 800), (100, 200))
    speeds = {}
    for n in (coarse, fine):
        report = _front_run(
            n, t_end, False, settings, RELATIVISTIC_FRONT_CENTER, RELATIVISTIC_FRONT_THRESHOLD
        )
        speeds[n] = vf.measure_front_speed(report)
    h_fine = 2.0 / fine
    limit = settings.pick(1.05, 1.3) * c
    section.checks.append(
        CheckResult(
            "finite_propagation",
            max(0.0, speeds[fine] - limit),
            0.0,
            {"speed": speeds[fine], "h": h_fine, "limit": limit},
        )
    )
    section.checks.append(
        CheckResult(
            "front_speed_refinement",
            abs(speeds[fine] - speeds[coarse]),
            0.1 * c,
            {"speeds": [speeds[coarse], speeds[fine]]},
        )
    )

    heat_sizes = (200, 800)
    heat = {}
    for n in heat_sizes:
        h = 2.0 / n
        heat[n] = vf.measure_front_speed(_front_run(n, 0.5 * h, True, settings))
    growth = heat[heat_sizes[1]] / max(heat[heat_sizes[0]], 1e-300)
    section.checks.append(
        CheckResult(
            "classical_infinite_speed",
            max(0.0, 1.5 - growth),
            0.0,
            {"speeds": [heat[n] for n in heat_sizes], "growth": growth},
        )
    )
    section.tables["front_speed"] = pd.DataFrame(
        [{"equation": "relativistic", "n": n, "speed": s} for n, s in speeds.items()]
        + [{"equation": "heat", "n": n, "speed": s} for n, s in heat.items()]
    )
    return section


def telegraph_section(settings: SuiteSettings) -> Section:
    section = Section()
    params = ModelParams(c=settings.c)
    grid = Grid.uniform(settings.pick(400, 200), -1.0, 1.0)
    config = TimeStepConfig(t_end=0.6)
    report = vf.telegraph_two_pulse_run(params, grid, config)
    section.checks.append(vf.telegraph_counterexample(params, grid, config, report=report))
    breach = vf.check_weak_max(report)
    section.checks.append(
        CheckResult(
            "telegraph_breaks_weak_max",
            max(0.0, 0.05 - breach.violation),
            0.0,
            {"weak_max_violation": breach.violation},
        )
    )
    section.checks.append(vf.telegraph_single_pulse_control(params, grid, config))
    section.checks.append(vf.relativistic_contrast(params, grid, config))
    section.tables["telegraph_series"] = report.to_frame()
    return section


def limit_section(settings: SuiteSettings) -> Section:
    section = Section()
    grid = Grid.uniform(settings.pick(100, 50), -1.0, 1.0)
    u0 = ic.gaussian_bump(grid, amplitude=1.0, width=0.2, floor=0.5)
    table = vf.classical_limit_study(
        u0, BoundaryCondition.no_flux(), settings.pick(0.05, 0.02), (2.0, 10.0, 50.0)
    )
    section.checks.append(vf.check_classical_limit(table))
    section.checks.append(
        CheckResult(
            "limit_order_probe",
            0.0,
            0.0,
            {"distance_c2": table["distance_c2"].tolist()},
            exploratory=True,
        )
    )
    section.tables["limit_study"] = table
    return section


def _solve_1d(n: int, left: float, right: float, params: ModelParams, form="flux"):
    grid = Grid.uniform(n, 0.0, 1.0)
    bc = BoundaryCondition.dirichlet_sides(grid, (left, right))
    return st.solve(st.StationaryProblem(grid, bc, form=form), params), bc


def stationary_section(settings: SuiteSettings) -> Section:
    section = Section()
    params = ModelParams(c=settings.c)
    rng = np.random.default_rng(settings.seed + 2)

    coarse, fine = settings.pick((100, 200), (40, 80))
    profile = st.shoot_1d(0.0, -0.5, params, n_steps=settings.pick(20000, 4000))
    errors = []
    for n in (coarse, fine):
        solution, _ = _solve_1d(n, 0.0, -0.5, params)
        x = solution.w.grid.centers(0)
        errors.append(float(np.max(np.abs(solution.w.values - profile.at(x)))))
    agreement = settings.pick(1e-6, spatial_tolerance(1.0 / fine))
    section.checks.append(CheckResult("oracle_agreement", errors[1], agreement, {"errors": errors}))
    ratio = errors[0] / max(errors[1], 1e-300)
    section.checks.append(CheckResult("oracle_order", max(0.0, 3.5 - ratio), 0.0, {"ratio": ratio}))

    solution, bc = _solve_1d(fine, 0.0, -0.5, params, form="q")
    section.checks.append(st.verify_strong_max(solution.w, bc))
    flat, flat_bc = _solve_1d(fine, 0.3, 0.3, params, form="q")
    constant_error = float(np.max(np.abs(flat.w.values - 0.3)))
    section.checks.append(CheckResult("constant_data_constant_solution", constant_error, 1e-12))

    upper, upper_bc = _solve_1d(fine, 0.1, -0.4, params, form="q")
    section.checks.append(
        st.verify_comparison_elliptic(solution.w, upper.w, 10 * NEWTON_TOL, bc, upper_bc, params)
    )

    tangency = []
    for right in (-0.45, -0.4, -0.3, -0.2, 0.0):
        other, other_bc = _solve_1d(fine, 0.0, right, params, form="q")
        tangency.append(st.verify_tangency(solution.w, other.w, bc, other_bc, params))
    section.checks.append(
        CheckResult(
            "tangency",
            max(r.violation for r in tangency),
            0.0,
            {"min_gaps": [r.context["min_gap"] for r in tangency]},
        )
    )

    grid2 = Grid.uniform(settings.pick(32, 16), 0.0, 1.0, dim=2)
    bc2 = BoundaryCondition.dirichlet_function(grid2, lambda x, y: 0.4 * x - 0.3 * y * y)
    guess = st.laplace_interpolant(grid2, bc2)
    first = st.solve_harmonic(st.StationaryProblem(grid2, bc2, guess), params)
    x, y = grid2.mesh()
    bumped = guess.with_values(guess.values + 0.2 * np.sin(np.pi * x) * np.sin(np.pi * y))
    second = st.solve_harmonic(st.StationaryProblem(grid2, bc2, bumped), params)
    section.checks.append(
        CheckResult(
            "stationary_uniqueness", float(np.max(np.abs(first.values - second.values))), 1e-8
        )
    )

    conservative = st.solve(st.StationaryProblem(grid2, bc2, form="flux"), params)
    u = conservative.u
    balances = []
    while len(balances) < 10:
        radius = float(rng.uniform(0.1, 0.3))
        center = rng.uniform(radius + 0.1, 1.0 - radius - 0.1, 2)
        balances.append(abs(fv.flux_balance_sphere(u, center, radius, params)))
    section.checks.append(
        CheckResult("flux_balance", max(balances), 10 * NEWTON_TOL, {"balls": len(balances)})
    )

    base_sides = (0.0, 0.2, -0.1, 0.3)
    base = st.solve_harmonic(
        st.StationaryProblem(grid2, BoundaryCondition.dirichlet_sides(grid2, base_sides)), params
    )
    drops = []
    for side in (0, 1, 3):
        raised = list(base_sides)
        raised[side] += 0.2
        lifted = st.solve_harmonic(
            st.StationaryProblem(grid2, BoundaryCondition.dirichlet_sides(grid2, raised)), params
        )
        drops.append(max(0.0, float(np.max(base.values - lifted.values))))
    section.checks.append(
        CheckResult("monotone_boundary_dependence", max(drops), spatial_tolerance(grid2.h_min))
    )
    section.tables["oracle_errors"] = pd.DataFrame({"n": [coarse, fine], "error": errors})
    return section


def conjecture_section(settings: SuiteSettings) -> Section:
    section = Section()
    params = ModelParams(c=settings.c)
    grid = Grid.uniform(settings.pick(100, 50), -1.0, 1.0)
    config = TimeStepConfig(t_end=0.1, snapshot_every=settings.pick(40, 20))

    flat = evolve(ScalarField.constant(grid, 2.0), BoundaryCondition.no_flux(), params, config)
    section.evidence.append(vf.light_cone_probe(flat, (0.0, 0.1), params))

    bump = ic.gaussian_bump(grid, amplitude=1.0, width=0.2, floor=0.2)
    decaying = evolve(bump, BoundaryCondition.no_flux(), params, config)
    section.evidence.append(vf.light_cone_probe(decaying, (0.0, 0.05), params))

    lifted = bump.with_values(bump.values + 0.1)
    lifted = evolve(lifted, BoundaryCondition.no_flux(), params, config)
    section.evidence.append(vf.light_cone_tangency_probe(decaying, lifted, (0.0, 0.05), params))

    table = vf.classify_run(decaying, params=params)
    section.tables["run_classification"] = table
    share = float(table["solution"].mean()) if not table.empty else 0.0
    section.checks.append(
        CheckResult(
            "evolved_run_is_solution",
            0.0,
            0.0,
            {"mean_solution_share": share},
            exploratory=True,
        )
    )
    return section


SECTIONS: Dict[str, Callable[[SuiteSettings], Section]] = {
    "core": core_section,
    "grid": grid_section,
    "parabolic": parabolic_section,
    "propagation": propagation_section,
    "telegraph": telegraph_section,
    "limit": limit_section,
    "stationary": stationary_section,
    "conjecture": conjecture_section,
}

SUITES: Dict[str, Tuple[str, ...]] = dict(
    {name: (name,) for name in SECTIONS}, all=tuple(SECTIONS)
)


def run_suite(name: str, settings: SuiteSettings = SuiteSettings()) -> Scorecard:
    if name not in SUITES:
        raise ConfigurationError(
            "unknown suite {!r}, expected one of {}".format(name, ", ".join(SUITES)), "suite"
        )
    sections = [SECTIONS[s] for s in SUITES[name]]
    logger.info("running suite %s (%d sections, %d jobs)", name, len(sections), settings.jobs)
    if settings.jobs > 1:
        with ThreadPoolExecutor(max_workers=settings.jobs) as executor:
            results = list(executor.map(lambda fn: fn(settings), sections))
    else:
        results = [fn(settings) for fn in sections]

    scorecard = Scorecard(suite=name)
    for result in results:
        scorecard.merge(result)
    for check in scorecard.failures:
        logger.warning(
            "check %s failed: violation %.3e > %.3e", check.name, check.violation, check.tolerance
        )
    return scorecard
