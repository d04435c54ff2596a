import os
import tempfile
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

import pandas as pd

from relativistic_heat.cli import (
    EXIT_CONFIGURATION,
    EXIT_OK,
    EXIT_SOLVER,
    OUTPUT_ROOT_ENV,
    main,
)
from relativistic_heat.exceptions import (
    InvalidStateError,
    NegativeDensityError,
    TransformDomainError,
)
from relativistic_heat.utils.io import read_json, sha256_of

SMALL_RUN = ["--set", "grid.n=50", "--t-end", "0.01", "--quiet"]


class TestCli(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_evolve_writes_manifest(self):
        out = self.root / "evolve"
        self.assertEqual(EXIT_OK, main(["evolve", "--output", str(out)] + SMALL_RUN))

        manifest = read_json(out / "manifest.json")
        paths = [entry["path"] for entry in manifest["files"]]
        self.assertIn("run-series.csv", paths)
        self.assertIn("run-report.json", paths)
        self.assertEqual(sorted(paths), paths)
        for entry in manifest["files"]:
            self.assertEqual(sha256_of(out / entry["path"]), entry["sha256"])

        series = pd.read_csv(out / "run-series.csv")
        self.assertEqual(["t", "mass", "entropy", "max", "min", "front"], list(series.columns))
        self.assertEqual(0.01, series["t"].iloc[-1])
        report = read_json(out / "run-report.json")
        self.assertEqual(2, len(report["snapshots"]))

    def test_evolve_is_reproducible(self):
        for name in ("a", "b"):
            main(["evolve", "--output", str(self.root / name)] + SMALL_RUN)
        first = read_json(self.root / "a" / "manifest.json")["files"]
        second = read_json(self.root / "b" / "manifest.json")["files"]
        self.assertEqual(
            [(e["path"], e["sha256"]) for e in first],
            [(e["path"], e["sha256"]) for e in second],
        )

    def test_invalid_speed(self):
        code = main(["evolve", "--c", "-1", "--output", str(self.root)] + SMALL_RUN)
        self.assertEqual(EXIT_CONFIGURATION, code)
        self.assertFalse((self.root / "manifest.json").exists())

    def test_unknown_key(self):
        code = main(["evolve", "--set", "model.speed=2", "--output", str(self.root), "--quiet"])
        self.assertEqual(EXIT_CONFIGURATION, code)

    def test_blow_up(self):
        code = main(
            ["evolve", "--output", str(self.root), "--quiet"]
            + ["--set", "time.dt=0.5", "--set", "initial.floor=0.01", "--t-end", "1.0"]
        )
        self.assertEqual(EXIT_SOLVER, code)

    def test_stationary(self):
        code = main(
            ["stationary", "--output", str(self.root), "--quiet"]
            + ["--set", "grid.n=40", "--set", "grid.lower=0.0"]
            + ["--set", "boundary.kind=\"dirichlet\"", "--set", "boundary.values=[0.0, -0.5]"]
        )
        self.assertEqual(EXIT_OK, code)
        frame = pd.read_csv(self.root / "run-stationary.csv")
        self.assertEqual(["x", "w", "u"], list(frame.columns))
        self.assertTrue(frame["w"].is_monotonic_decreasing)
        log = read_json(self.root / "run-convergence.json")
        self.assertEqual("q", log["form"])
        self.assertLessEqual(log["residual_norm"], 1e-10)

    def test_sweep(self):
        code = main(
            ["sweep", "--axis", "model.c", "--values", "1.0,2.0", "--output", str(self.root)]
            + SMALL_RUN
        )
        self.assertEqual(EXIT_OK, code)
        index = read_json(self.root / "sweep.json")
        self.assertEqual([1.0, 2.0], [point["value"] for point in index])
        for point in ("point-000", "point-001"):
            self.assertTrue((self.root / point / "run-series.csv").is_file())
        paths = [e["path"] for e in read_json(self.root / "manifest.json")["files"]]
        self.assertIn("point-001/run-series.csv", paths)
        self.assertIn("sweep.json", paths)

    def test_sweep_needs_values(self):
        code = main(["sweep", "--output", str(self.root)] + SMALL_RUN)
        self.assertEqual(EXIT_CONFIGURATION, code)

    def test_output_root_from_environment(self):
        with patch.dict(os.environ, {OUTPUT_ROOT_ENV: str(self.root / "env")}):
            self.assertEqual(EXIT_OK, main(["evolve"] + SMALL_RUN))
        self.assertTrue((self.root / "env" / "manifest.json").is_file())

    def test_invalid_initial_data(self):
        for overrides in (
            ["--set", "initial.width=0.0"],
            ["--set", "initial.family=\"constant\"", "--set", "initial.value=-1.0"],
            ["--set", "initial.family=\"compact-bump\"", "--set", "time.method=\"implicit\""],
        ):
            code = main(["evolve", "--output", str(self.root)] + SMALL_RUN + overrides)
            self.assertEqual(EXIT_CONFIGURATION, code)
        self.assertFalse((self.root / "manifest.json").exists())

    def test_domain_errors_are_configuration_errors(self):
        for error in (
            TransformDomainError("log of a non-positive density"),
            NegativeDensityError("negative density"),
            InvalidStateError("not a density"),
        ):
            with patch("relativistic_heat.cli.run", side_effect=error):
                self.assertEqual(EXIT_CONFIGURATION, main(["evolve", "--quiet"]))

    def test_verify_stationary_quick(self):
        code = main(["verify", "stationary", "--quick", "--output", str(self.root), "--quiet"])
        self.assertEqual(EXIT_OK, code)
        scorecard = read_json(self.root / "scorecard-stationary.json")
        names = {item["name"]: item["passed"] for item in scorecard}
        self.assertTrue(names["stationary_uniqueness"])

    def test_verify_all_quick(self):
        code = main(["verify", "all", "--quick", "--output", str(self.root), "--quiet"])
        self.assertEqual(EXIT_OK, code)
        scorecard = read_json(self.root / "scorecard-all.json")
        checks = [item for item in scorecard if not item["exploratory"]]
        self.assertTrue(all(item["passed"] for item in checks))

    def test_verify_core_quick(self):
        code = main(["verify", "core", "--quick", "--output", str(self.root), "--quiet"])
        self.assertEqual(EXIT_OK, code)
        scorecard = read_json(self.root / "scorecard-core.json")
        checks = [item for item in scorecard if not item["exploratory"]]
        self.assertTrue(all(item["passed"] for item in checks))
        self.assertTrue((self.root / "scorecard-core.csv").is_file())
