"""Shared artifact access and pinned style for the figure scripts.

Figures consume only the CSV and manifest files a completed experiment
directory publishes; nothing here imports the solver package.  Readers
fail with the expected file path spelled out so an incomplete artifact
directory is easy to diagnose.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

FIGURE_IDS = ("quadrants", "polar-speed", "anisotropy", "planewave-orders",
              "almost-isotropic")

# Pinned presentation: one colormap for fields, one palette for curve
# families, fixed raster density.  Keeping these in code makes renders
# reproducible byte for byte.
FIELD_CMAP = "RdBu_r"
CURVE_COLORS = ("tab:blue", "tab:red", "tab:green", "black")
ORDER_COLORS = {0: "tab:blue", 2: "tab:orange", 4: "tab:green", 6: "tab:red"}
DPI = 150


@dataclass(frozen=True)
class FigureJob:
    """One render request: which figure, from where, to which file."""

    figure: str
    artifacts: Path
    out: Path

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure {self.figure!r}; expected one of {', '.join(FIGURE_IDS)}")
        object.__setattr__(self, "artifacts", Path(self.artifacts))
        object.__setattr__(self, "out", Path(self.out))

    def path(self, *parts: str) -> Path:
        """An artifact file, checked to exist."""
        target = self.artifacts.joinpath(*parts)
        if not target.is_file():
            raise FileNotFoundError(f"expected artifact {target}")
        return target


def read_manifest(directory: Path) -> dict:
    path = Path(directory) / "manifest.json"
    if not path.is_file():
        raise FileNotFoundError(f"expected artifact {path}")
    return json.loads(path.read_text(encoding="ascii"))


def read_columns(path: Path) -> dict:
    """Headered CSV as {name: float array or string list}."""
    with open(path, newline="", encoding="ascii") as handle:
        rows = list(csv.reader(handle))
    header, body = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(header):
        values = [row[j] for row in body]
        try:
            out[name] = np.array([float(v) for v in values])
        except ValueError:
            out[name] = values
    return out


def read_field(path: Path):
    """Matrix CSV (x rows, y columns) as (x, y, values)."""
    with open(path, newline="", encoding="ascii") as handle:
        rows = list(csv.reader(handle))
    y = np.array([float(v) for v in rows[0][1:]])
    body = np.array([[float(v) for v in row] for row in rows[1:]])
    return body[:, 0], y, body[:, 1:]


def final_snapshot(job: FigureJob, run: str, solver: str = "fv") -> Path:
    """Path of a run's last written pressure snapshot."""
    index = read_columns(job.path(run, solver, "index.csv"))
    return job.path(run, solver, index["file"][-1])


def symmetric_range(values: np.ndarray, floor: float = 1e-30):
    """Zero-centered color range; an all-zero field renders blank."""
    peak = float(np.max(np.abs(values)))
    return -max(peak, floor), max(peak, floor)


def save(fig, job: FigureJob) -> Path:
    job.out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(job.out, dpi=DPI)
    return job.out
