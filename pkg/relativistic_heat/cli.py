"""``relheat`` command line: evolve, stationary, verify SUITE, sweep."""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from dotenv import load_dotenv

from relativistic_heat.constants.equation import EquationTag
from relativistic_heat.constants.formats import Formats
from relativistic_heat.exceptions import (
    BlowUpError,
    BracketError,
    CFLViolationError,
    ConfigurationError,
    ConvergenceError,
    InvalidStateError,
    NegativeDensityError,
    TransformDomainError,
)
from relativistic_heat.features.evolve import (
    RunReport,
    evolve,
    evolve_classical_heat,
    evolve_telegraph,
)
from relativistic_heat.features.experiment import (
    ExperimentConfig,
    load_config,
    parse_value,
    sweep_values,
)
from relativistic_heat.features.stationary import StationaryProblem, solve
from relativistic_heat.features.suite import SUITES, SuiteSettings, run_suite
from relativistic_heat.utils.data_processors import render_table
from relativistic_heat.utils.io import (
    Manifest,
    snapshot_frame,
    write_frame,
    write_json,
)

logger = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "RELHEAT_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "runs"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_SOLVER = 3


def output_root(config: ExperimentConfig, flag: Optional[str] = None) -> Path:
    return Path(
        flag
        or os.getenv(OUTPUT_ROOT_ENV)
        or config["experiment.output"]
        or DEFAULT_OUTPUT_ROOT
    )


def run_equation(config: ExperimentConfig) -> RunReport:
    grid = config.grid()
    params = config.params()
    bc = config.boundary(grid)
    u0, ut0 = config.initial_fields(grid)
    if config.equation is EquationTag.CLASSICAL_HEAT:
        return evolve_classical_heat(u0, bc, config.time)
    if config.equation is EquationTag.TELEGRAPH:
        return evolve_telegraph(u0, ut0, bc, params, config.time)
    return evolve(u0, bc, params, config.time)


def write_run(report: RunReport, name: str, root: Path, manifest: Manifest):
    series = Formats.Series.build(name)
    manifest.add(write_frame(root / series, report.to_frame()))

    snapshot_paths = []
    for t, field in report.snapshots:
        path = Formats.Snapshot.build(name, t)
        manifest.add(write_frame(root / path, snapshot_frame(field)))
        snapshot_paths.append(path)

    body = Formats.Report.build_body(report, series, snapshot_paths)
    manifest.add(write_json(root / Formats.Report.build(name), body))


def cmd_evolve(config: ExperimentConfig, root: Path) -> Manifest:
    manifest = Manifest(root, "evolve", config.to_dict())
    report = run_equation(config)
    write_run(report, config.name, root, manifest)
    return manifest


def cmd_stationary(config: ExperimentConfig, root: Path) -> Manifest:
    """Stationary solve; boundary values are read as w = log u."""
    manifest = Manifest(root, "stationary", config.to_dict())
    grid = config.grid()
    problem = StationaryProblem(
        grid,
        config.boundary(grid),
        newton_tol=config["stationary.newton_tol"],
        newton_max_iter=config["stationary.newton_max_iter"],
        form=config["stationary.form"],
    )
    solution = solve(problem, config.params())

    frame = snapshot_frame(solution.w).rename(columns={"value": "w"})
    frame["u"] = solution.u.values.ravel()
    frame = frame[Formats.Stationary.build_body(grid.dim)]
    manifest.add(write_frame(root / Formats.Stationary.build(config.name), frame))
    manifest.add(
        write_json(
            root / Formats.ConvergenceLog.build(config.name),
            Formats.ConvergenceLog.build_body(solution),
        )
    )
    return manifest


def cmd_verify(suite: str, config: ExperimentConfig, root: Path) -> Tuple[Manifest, bool]:
    manifest = Manifest(root, "verify {}".format(suite), config.to_dict())
    settings = SuiteSettings(
        quick=config["verify.quick"],
        seed=config.seed,
        c=config["model.c"],
        jobs=config["verify.jobs"],
    )
    scorecard = run_suite(suite, settings)
    frame = scorecard.to_frame()
    print(render_table(frame))

    manifest.add(
        write_json(
            root / Formats.Scorecard.build(suite),
            Formats.Scorecard.build_body(scorecard.checks, scorecard.evidence),
        )
    )
    manifest.add(write_frame(root / Formats.Scorecard.build_table(suite), frame))
    for table, data in sorted(scorecard.tables.items()):
        manifest.add(write_frame(root / Formats.Scorecard.build_extra(suite, table), data))
    return manifest, scorecard.passed


def cmd_sweep(
    config: ExperimentConfig, root: Path, axis: str, values: Sequence, jobs: int = 1
) -> Manifest:
    points = [config.with_override(axis, value) for value in values]
    manifest = Manifest(root, "sweep {}".format(axis), config.to_dict())

    def run_point(index: int) -> Manifest:
        directory = Formats.SweepPoint.build(index)
        logger.info("sweep point %s: %s=%r", directory, axis, values[index])
        return cmd_evolve(points[index], root / directory)

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        results = list(executor.map(run_point, range(len(points))))

    index = []
    for i, result in enumerate(results):
        manifest.extend(result, Formats.SweepPoint.build(i))
        index.append(Formats.SweepPoint.build_body(i, axis, values[i]))
    manifest.add(write_json(root / Formats.SweepPoint.INDEX_PATH, index))
    return manifest


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML experiment file")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one config key, repeatable",
    )
    common.add_argument("--c", type=float, help="shortcut for model.c")
    common.add_argument("--t-end", type=float, help="shortcut for time.t_end")
    common.add_argument("--output", help="output directory")
    common.add_argument("--seed", type=int, help="shortcut for experiment.seed")
    common.add_argument("--jobs", type=int, help="worker threads")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog="relheat", description="Relativistic heat equation laboratory"
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("evolve", parents=[common], help="evolve initial data in time")
    commands.add_parser("stationary", parents=[common], help="solve the stationary problem")
    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", choices=sorted(SUITES))
    verify.add_argument("--quick", action="store_true", help="coarse grids")
    sweep = commands.add_parser("sweep", parents=[common], help="evolve over a parameter axis")
    sweep.add_argument("--axis", help="dotted config key, e.g. model.c")
    sweep.add_argument("--values", help="comma separated values")
    return parser


def _overrides(args: argparse.Namespace) -> List[str]:
    overrides = list(args.overrides)
    for flag, dotted in (("c", "model.c"), ("t_end", "time.t_end"), ("seed", "experiment.seed")):
        value = getattr(args, flag)
        if value is not None:
            overrides.append("{}={!r}".format(dotted, value))
    if args.jobs is not None:
        section = {"verify": "verify", "sweep": "sweep"}.get(args.command)
        if section:
            overrides.append("{}.jobs={}".format(section, args.jobs))
    if getattr(args, "quick", False):
        overrides.append("verify.quick=true")
    return overrides


def _configure_logging(args: argparse.Namespace):
    if args.quiet:
        level = logging.ERROR
    else:
        level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def run(args: argparse.Namespace) -> int:
    config = load_config(args.config, _overrides(args))
    root = output_root(config, args.output)
    passed = True

    if args.command == "evolve":
        manifest = cmd_evolve(config, root)
    elif args.command == "stationary":
        manifest = cmd_stationary(config, root)
    elif args.command == "verify":
        manifest, passed = cmd_verify(args.suite, config, root)
    else:
        axis = args.axis or config["sweep.axis"]
        if args.values is not None:
            values = [parse_value(v.strip()) for v in args.values.split(",") if v.strip()]
        else:
            values = sweep_values(config)
        if not axis or not values:
            raise ConfigurationError("sweep needs --axis and --values", "sweep.axis")
        manifest = cmd_sweep(config, root, axis, values, config["sweep.jobs"])

    manifest.write()
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        return run(args)
    except (ConfigurationError, TransformDomainError, NegativeDensityError, InvalidStateError) as e:
        logger.error("configuration error: %s", e)
        print("configuration error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIGURATION
    except (ConvergenceError, BracketError, BlowUpError, CFLViolationError) as e:
        logger.error("solver failure: %s", e)
        print("solver failure: {}".format(e), file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
