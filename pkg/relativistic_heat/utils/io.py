import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from relativistic_heat.constants.formats import FLOAT_FORMAT, Formats
from relativistic_heat.exceptions import ConfigurationError
from relativistic_heat.features.grid import Grid, ScalarField

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: PathLike, payload) -> Path:
    path = _prepare(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=False, allow_nan=False)
        f.write("\n")
    return path


def read_json(path: PathLike):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def write_frame(path: PathLike, frame: pd.DataFrame) -> Path:
    path = _prepare(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def snapshot_frame(field: ScalarField) -> pd.DataFrame:
    grid = field.grid
    columns = Formats.Snapshot.build_body(grid.dim)
    coords = [m.ravel() for m in grid.mesh()]
    return pd.DataFrame(dict(zip(columns, coords + [field.values.ravel()])))


def write_snapshot(path: PathLike, field: ScalarField) -> Path:
    """Cell centers and values, row-major, one row per cell."""
    return write_frame(path, snapshot_frame(field))


def _axis_from_centers(centers: np.ndarray, name: str):
    if centers.size < 2:
        raise ConfigurationError("snapshot has fewer than 2 cells along " + name, "initial.path")
    h = float(np.mean(np.diff(centers)))
    return centers.size, float(centers[0] - 0.5 * h), float(centers[-1] + 0.5 * h)


def read_snapshot(path: PathLike, grid: Optional[Grid] = None) -> ScalarField:
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as e:
        raise ConfigurationError("cannot read snapshot {}: {}".format(path, e), "initial.path")

    axes = [c for c in ("x", "y") if c in frame.columns]
    if "value" not in frame.columns or not axes:
        raise ConfigurationError(
            "snapshot {} lacks x[,y],value columns".format(path), "initial.path"
        )
    if grid is None:
        shape = [_axis_from_centers(np.unique(frame[a].to_numpy()), a) for a in axes]
        grid = Grid(
            tuple(s[0] for s in shape), tuple(s[1] for s in shape), tuple(s[2] for s in shape)
        )
    frame = frame.sort_values(axes, kind="mergesort")
    if len(frame) != grid.size or len(axes) != grid.dim:
        raise ConfigurationError(
            "snapshot {} has {} cells in {}D, grid has {} in {}D".format(
                path, len(frame), len(axes), grid.size, grid.dim
            ),
            "initial.path",
        )
    for name, centers in zip(axes, grid.mesh()):
        stored = frame[name].to_numpy()
        if not np.allclose(stored, centers.ravel(), rtol=0.0, atol=1e-9 * grid.h_min):
            raise ConfigurationError(
                "snapshot {} cell centers along {} do not match the grid".format(path, name),
                "initial.path",
            )
    return ScalarField(grid, frame["value"].to_numpy())


def sha256_of(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class Manifest:
    """Files written under one output directory, with their hashes."""

    def __init__(self, root: PathLike, command: str, config: dict):
        self.root = Path(root)
        self.command = command
        self.config = config
        self.entries: List[Dict] = []

    def add(self, path: PathLike, config: Optional[dict] = None):
        path = Path(path)
        try:
            relative = path.relative_to(self.root)
        except ValueError:
            relative = path
        self.entries.append(
            {
                "path": relative.as_posix(),
                "sha256": sha256_of(self.root / relative),
                "config": self.config if config is None else config,
            }
        )

    def extend(self, other: "Manifest", prefix: str):
        for entry in other.entries:
            self.entries.append(dict(entry, path="{}/{}".format(prefix, entry["path"])))

    def write(self) -> Path:
        payload = Formats.Manifest.build_body(
            self.command, self.config, sorted(self.entries, key=lambda e: e["path"])
        )
        path = write_json(self.root / Formats.Manifest.build(), payload)
        logger.info("wrote manifest with %d files to %s", len(self.entries), path)
        return path
