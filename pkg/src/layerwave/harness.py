"""Experiment harness: JSON configs, canned runs, comparisons, CSV artifacts.

An experiment document is a JSON object ``{"name": ..., "runs": {label:
config, ...}, "summary": ...}`` whose entries are single-run
configurations; a bare single-run configuration is accepted as a
one-run document.  Each run owns one medium, one initial condition and
up to two solvers (homogenized pseudospectral, finite volume) and
writes an artifact directory of headered CSV files plus a JSON manifest
holding the fully resolved configuration and package versions.  Floats
are written with shortest round-trip formatting and all iteration
orders are fixed, so re-running a document reproduces every CSV
byte-identically.

Cross-solver comparisons resample the homogenized profile onto the
finite-volume cell centers by evaluating its trigonometric interpolant,
which is exact because the pseudospectral solution is a trigonometric
polynomial.  Finite-volume values are cell averages at ``(i + 1/2) dx``
while the shared snapshot container labels them ``i dx``; every
artifact and comparison in this module applies the half-cell correction
so coordinates in CSVs are physical.
"""

from __future__ import annotations

import csv
import json
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .coeffs import COEFFICIENT_NAMES, HomogCoefficients, compute_coefficients
from .directsolver import LIMITERS, run_fv
from .dispersion import (
    VALIDITY_CUTOFF,
    effective_sound_speed,
    system_omega_squared,
)
from .effsolver import EffSolverParams, WaveField
from .effsolver import run as run_eff
from .fastfield import solve_fastvars
from .medium import MediumSpec, averages, make_piecewise, make_sinusoidal, make_tabulated
from .medium import sample as medium_sample

__all__ = [
    "ConfigError",
    "MediumBlock",
    "InitialBlock",
    "DomainBlock",
    "EffBlock",
    "FVBlock",
    "OutputsBlock",
    "ExperimentConfig",
    "ComparisonReport",
    "compare_solutions",
    "trig_resample",
    "period_smooth",
    "front_position",
    "write_csv",
    "read_csv_columns",
    "write_field_csv",
    "read_field_csv",
    "output_root",
    "run_experiment",
    "run_experiment_doc",
    "load_experiment_doc",
    "apply_override",
    "canned_experiment",
    "CANNED_EXPERIMENTS",
    "FRONT_THRESHOLD",
]

SLICE_KINDS = ("x-mean", "y-mean", "x-center", "y-center")

# Fraction of the ray maximum at which leading-front crossings are read.
FRONT_THRESHOLD = 0.15

_MEDIUM_CSV_SAMPLES = 512
_DISPERSION_THETAS = 73
_DISPERSION_KS = 24
_POLAR_THETAS = 721


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _fail(where: str, message: str):
    raise ConfigError(f"{where}: {message}")


def _require_mapping(d, where: str) -> dict:
    if not isinstance(d, dict):
        _fail(where, f"expected an object, got {type(d).__name__}")
    return d


def _reject_unknown(d: dict, allowed, where: str) -> None:
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        _fail(where, f"unknown keys {unknown}; allowed keys are {sorted(allowed)}")


def _get_number(d: dict, key: str, where: str, *, positive: bool = True) -> float:
    if key not in d:
        _fail(where, f"missing required key {key!r}")
    value = d[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{where}.{key}", f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        _fail(f"{where}.{key}", "must be finite")
    if positive and value <= 0.0:
        _fail(f"{where}.{key}", f"must be positive, got {value}")
    return value


def _get_int(d: dict, key: str, where: str, default=None, *, minimum: int = 1) -> int:
    if key not in d:
        if default is None:
            _fail(where, f"missing required key {key!r}")
        return default
    value = d[key]
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{where}.{key}", f"expected an integer, got {value!r}")
    if value < minimum:
        _fail(f"{where}.{key}", f"must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class MediumBlock:
    """Validated medium description; ``build`` makes the MediumSpec."""

    kind: str
    K_A: float | None = None
    K_B: float | None = None
    rho_A: float | None = None
    rho_B: float | None = None
    path: str | None = None

    @classmethod
    def from_dict(cls, d, where: str = "medium") -> "MediumBlock":
        d = _require_mapping(d, where)
        kind = d.get("kind")
        if kind == "piecewise":
            _reject_unknown(d, ("kind", "K_A", "K_B", "rho_A", "rho_B"), where)
            return cls(
                kind=kind,
                K_A=_get_number(d, "K_A", where),
                K_B=_get_number(d, "K_B", where),
                rho_A=_get_number(d, "rho_A", where),
                rho_B=_get_number(d, "rho_B", where),
            )
        if kind == "sinusoidal":
            _reject_unknown(d, ("kind", "K_A", "K_B"), where)
            return cls(
                kind=kind,
                K_A=_get_number(d, "K_A", where),
                K_B=_get_number(d, "K_B", where),
            )
        if kind == "tabulated":
            _reject_unknown(d, ("kind", "path"), where)
            path = d.get("path")
            if not isinstance(path, str) or not path:
                _fail(f"{where}.path", "expected a file path string")
            if not Path(path).is_file():
                _fail(f"{where}.path", f"file not found: {path}")
            return cls(kind=kind, path=path)
        _fail(f"{where}.kind",
              f"expected one of ('piecewise', 'sinusoidal', 'tabulated'), got {kind!r}")

    def build(self) -> MediumSpec:
        if self.kind == "piecewise":
            return make_piecewise(self.K_A, self.K_B, self.rho_A, self.rho_B)
        if self.kind == "sinusoidal":
            return make_sinusoidal(self.K_A, self.K_B)
        columns = read_csv_columns(self.path)
        for name in ("K", "rho"):
            if name not in columns:
                raise ConfigError(
                    f"medium.path: table {self.path} lacks required column {name!r}")
        return make_tabulated(columns["K"], columns["rho"])

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key in ("K_A", "K_B", "rho_A", "rho_B", "path"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


@dataclass(frozen=True)
class InitialBlock:
    """Initial pressure bump; velocities always start at zero.

    ``center`` is stored as a 2D point for both kinds; a ``gaussian1d``
    bump only reads the component along its axis.
    """

    kind: str
    amplitude: float
    sigma: float
    center: tuple[float, float]
    axis: str = "x"

    @classmethod
    def from_dict(cls, d, extents, where: str = "initial") -> "InitialBlock":
        d = _require_mapping(d, where)
        kind = d.get("kind")
        if kind == "gaussian2d":
            _reject_unknown(d, ("kind", "amplitude", "sigma", "center"), where)
            center = d.get("center", [extents[0] / 2.0, extents[1] / 2.0])
            if (not isinstance(center, (list, tuple)) or len(center) != 2
                    or any(isinstance(c, bool) or not isinstance(c, (int, float))
                           for c in center)):
                _fail(f"{where}.center", f"expected [x, y] numbers, got {center!r}")
            return cls(
                kind=kind,
                amplitude=_get_number(d, "amplitude", where),
                sigma=_get_number(d, "sigma", where),
                center=(float(center[0]), float(center[1])),
            )
        if kind == "gaussian1d":
            _reject_unknown(d, ("kind", "amplitude", "sigma", "axis", "center"), where)
            axis = d.get("axis")
            if axis not in ("x", "y"):
                _fail(f"{where}.axis", f"expected 'x' or 'y', got {axis!r}")
            index = 0 if axis == "x" else 1
            center = d.get("center", extents[index] / 2.0)
            if isinstance(center, bool) or not isinstance(center, (int, float)):
                _fail(f"{where}.center", f"expected a number, got {center!r}")
            point = [extents[0] / 2.0, extents[1] / 2.0]
            point[index] = float(center)
            return cls(
                kind=kind,
                amplitude=_get_number(d, "amplitude", where),
                sigma=_get_number(d, "sigma", where),
                center=(point[0], point[1]),
                axis=axis,
            )
        _fail(f"{where}.kind",
              f"expected one of ('gaussian2d', 'gaussian1d'), got {kind!r}")

    def pressure(self, X, Y):
        """Evaluate the initial pressure on coordinate arrays."""
        if self.kind == "gaussian2d":
            r2 = (X - self.center[0]) ** 2 + (Y - self.center[1]) ** 2
        elif self.axis == "x":
            r2 = (X - self.center[0]) ** 2
        else:
            r2 = (Y - self.center[1]) ** 2
        return self.amplitude * np.exp(-r2 / (2.0 * self.sigma**2))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "amplitude": self.amplitude, "sigma": self.sigma}
        if self.kind == "gaussian2d":
            out["center"] = list(self.center)
        else:
            out["axis"] = self.axis
            out["center"] = self.center[0 if self.axis == "x" else 1]
        return out


@dataclass(frozen=True)
class DomainBlock:
    """Box extents and the pseudospectral grid (when an eff run exists)."""

    extents: tuple[float, float]
    eff_grid: tuple[int, int] | None = None

    @classmethod
    def from_dict(cls, d, where: str = "domain") -> "DomainBlock":
        d = _require_mapping(d, where)
        _reject_unknown(d, ("extents", "eff_grid"), where)
        extents = d.get("extents")
        if (not isinstance(extents, (list, tuple)) or len(extents) != 2
                or any(isinstance(e, bool) or not isinstance(e, (int, float))
                       for e in extents)):
            _fail(f"{where}.extents", f"expected [Lx, Ly] numbers, got {extents!r}")
        Lx, Ly = float(extents[0]), float(extents[1])
        if not (Lx > 0 and Ly > 0 and math.isfinite(Lx) and math.isfinite(Ly)):
            _fail(f"{where}.extents", "extents must be positive and finite")
        # The medium has period 1 in y, so the box must hold whole periods.
        if not float(Ly).is_integer():
            _fail(f"{where}.extents", f"Ly must be a whole number of periods, got {Ly}")
        eff_grid = d.get("eff_grid")
        grid = None
        if eff_grid is not None:
            if (not isinstance(eff_grid, (list, tuple)) or len(eff_grid) != 2
                    or any(isinstance(n, bool) or not isinstance(n, int)
                           for n in eff_grid)):
                _fail(f"{where}.eff_grid", f"expected [Nx, Ny] integers, got {eff_grid!r}")
            Nx, Ny = eff_grid
            for label, n in (("Nx", Nx), ("Ny", Ny)):
                if n < 1 or (n & (n - 1)) != 0:
                    _fail(f"{where}.eff_grid", f"{label} must be a power of two, got {n}")
            grid = (Nx, Ny)
        return cls(extents=(Lx, Ly), eff_grid=grid)

    def to_dict(self) -> dict:
        out = {"extents": list(self.extents)}
        if self.eff_grid is not None:
            out["eff_grid"] = list(self.eff_grid)
        return out


@dataclass(frozen=True)
class EffBlock:
    """Pseudospectral solver controls: ascending truncation orders."""

    orders: tuple[int, ...]
    safety: float = 0.5

    @classmethod
    def from_dict(cls, d, where: str = "eff") -> "EffBlock":
        d = _require_mapping(d, where)
        _reject_unknown(d, ("orders", "safety"), where)
        orders = d.get("orders")
        if (not isinstance(orders, (list, tuple)) or not orders
                or any(isinstance(o, bool) or not isinstance(o, int) for o in orders)):
            _fail(f"{where}.orders", f"expected a non-empty integer list, got {orders!r}")
        bad = sorted(set(orders) - {0, 2, 4, 6})
        if bad:
            _fail(f"{where}.orders", f"orders must be within (0, 2, 4, 6), got {bad}")
        if len(set(orders)) != len(orders):
            _fail(f"{where}.orders", f"orders must be distinct, got {list(orders)}")
        safety = float(d.get("safety", 0.5))
        if not (0.0 < safety <= 1.0):
            _fail(f"{where}.safety", f"must lie in (0, 1], got {safety}")
        return cls(orders=tuple(sorted(orders)), safety=safety)

    def to_dict(self) -> dict:
        return {"orders": list(self.orders), "safety": self.safety}


@dataclass(frozen=True)
class FVBlock:
    """Finite-volume solver controls."""

    resolution: int = 32
    cfl: float = 0.9
    limiter: str = "mc"
    mx: int | None = None

    @classmethod
    def from_dict(cls, d, where: str = "fv") -> "FVBlock":
        d = _require_mapping(d, where)
        _reject_unknown(d, ("resolution", "cfl", "limiter", "mx"), where)
        resolution = _get_int(d, "resolution", where, default=32, minimum=8)
        cfl = float(d.get("cfl", 0.9))
        if not (0.0 < cfl <= 1.0):
            _fail(f"{where}.cfl", f"must lie in (0, 1], got {cfl}")
        limiter = d.get("limiter", "mc")
        if limiter not in LIMITERS:
            _fail(f"{where}.limiter",
                  f"expected one of {tuple(sorted(LIMITERS))}, got {limiter!r}")
        mx = d.get("mx")
        if mx is not None:
            mx = _get_int(d, "mx", where, minimum=2)
        return cls(resolution=resolution, cfl=cfl, limiter=limiter, mx=mx)

    def to_dict(self) -> dict:
        out = {"resolution": self.resolution, "cfl": self.cfl, "limiter": self.limiter}
        if self.mx is not None:
            out["mx"] = self.mx
        return out


@dataclass(frozen=True)
class OutputsBlock:
    """Artifact destination, snapshot cadence and slice selection."""

    directory: str
    cadence: int = 1
    slices: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, d, where: str = "outputs") -> "OutputsBlock":
        d = _require_mapping(d, where)
        _reject_unknown(d, ("directory", "cadence", "slices"), where)
        directory = d.get("directory")
        if not isinstance(directory, str) or not directory:
            _fail(f"{where}.directory", "expected a non-empty string")
        cadence = _get_int(d, "cadence", where, default=1, minimum=1)
        slices = d.get("slices", [])
        if not isinstance(slices, (list, tuple)):
            _fail(f"{where}.slices", f"expected a list, got {slices!r}")
        bad = sorted(set(slices) - set(SLICE_KINDS))
        if bad:
            _fail(f"{where}.slices", f"unknown slice kinds {bad}; allowed {SLICE_KINDS}")
        return cls(directory=directory, cadence=cadence, slices=tuple(slices))

    def to_dict(self) -> dict:
        return {"directory": self.directory, "cadence": self.cadence,
                "slices": list(self.slices)}


@dataclass(frozen=True)
class ExperimentConfig:
    """One validated run: medium, initial data, domain, solvers, outputs."""

    medium: MediumBlock
    initial: InitialBlock
    domain: DomainBlock
    outputs: OutputsBlock
    t_end: float | None = None
    eff: EffBlock | None = None
    fv: FVBlock | None = None

    @classmethod
    def from_dict(cls, d, where: str = "config") -> "ExperimentConfig":
        d = _require_mapping(d, where)
        _reject_unknown(
            d, ("medium", "initial", "domain", "outputs", "t_end", "eff", "fv"), where)
        for key in ("medium", "initial", "domain", "outputs"):
            if key not in d:
                _fail(where, f"missing required block {key!r}")
        medium = MediumBlock.from_dict(d["medium"], f"{where}.medium")
        domain = DomainBlock.from_dict(d["domain"], f"{where}.domain")
        initial = InitialBlock.from_dict(d["initial"], domain.extents, f"{where}.initial")
        outputs = OutputsBlock.from_dict(d["outputs"], f"{where}.outputs")
        eff = EffBlock.from_dict(d["eff"], f"{where}.eff") if "eff" in d else None
        fv = FVBlock.from_dict(d["fv"], f"{where}.fv") if "fv" in d else None
        t_end = None
        if (eff or fv) and "t_end" not in d:
            _fail(where, "t_end is required when a solver block is present")
        if "t_end" in d:
            t_end = _get_number(d, "t_end", where)
        if eff is not None:
            if domain.eff_grid is None:
                _fail(f"{where}.domain", "eff_grid is required when eff is configured")
            if 6 in eff.orders and domain.eff_grid[1] != 1:
                _fail(f"{where}.eff.orders",
                      "order 6 exists only for 1D transverse runs (eff_grid [Nx, 1])")
        return cls(medium=medium, initial=initial, domain=domain, outputs=outputs,
                   t_end=t_end, eff=eff, fv=fv)

    def eff_system(self) -> str:
        Nx, Ny = self.domain.eff_grid
        if Ny == 1:
            return "transverse1d"
        if Nx == 1:
            return "normal1d"
        return "2d"

    def to_dict(self) -> dict:
        out = {
            "medium": self.medium.to_dict(),
            "initial": self.initial.to_dict(),
            "domain": self.domain.to_dict(),
            "outputs": self.outputs.to_dict(),
        }
        if self.t_end is not None:
            out["t_end"] = self.t_end
        if self.eff is not None:
            out["eff"] = self.eff.to_dict()
        if self.fv is not None:
            out["fv"] = self.fv.to_dict()
        return out


# ---------------------------------------------------------------------------
# CSV persistence: shortest round-trip floats, fixed newline, fixed order.

def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> Path:
    """Write a headered CSV with round-trippable float formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def read_csv_columns(path) -> dict:
    """Read a headered CSV into named columns.

    Columns whose every entry parses as a float come back as float
    arrays; anything else stays a list of strings.
    """
    with open(path, newline="", encoding="ascii") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [row for row in reader if row]
    columns = {}
    for j, name in enumerate(header):
        raw = [row[j] for row in rows]
        try:
            columns[name] = np.array([float(v) for v in raw])
        except ValueError:
            columns[name] = raw
    return columns


def write_field_csv(path, x, y, values) -> Path:
    """Write a 2D field as a matrix CSV: row coordinate x, column coordinate y."""
    values = np.asarray(values)
    if values.shape != (len(x), len(y)):
        raise ValueError(
            f"field shape {values.shape} does not match grid {(len(x), len(y))}")
    header = ["x"] + [_cell(float(v)) for v in y]
    rows = ([float(xi)] + [float(v) for v in row] for xi, row in zip(x, values))
    return write_csv(path, header, rows)


def read_field_csv(path):
    """Inverse of :func:`write_field_csv`: returns ``(x, y, values)``."""
    with open(path, newline="", encoding="ascii") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        y = np.array([float(v) for v in header[1:]])
        x, rows = [], []
        for row in reader:
            if not row:
                continue
            x.append(float(row[0]))
            rows.append([float(v) for v in row[1:]])
    return np.array(x), y, np.array(rows)


# ---------------------------------------------------------------------------
# Profile operations shared by comparisons and front measurements.

def trig_resample(values, length, x_new):
    """Evaluate the trigonometric interpolant of uniform periodic samples.

    ``values[j]`` are samples at ``j * length / n``; the interpolant is
    evaluated at the (arbitrary, possibly off-grid) points ``x_new``.
    Exact for trigonometric polynomials representable on the source
    grid; the Nyquist mode of even ``n`` is taken as its cosine
    representative.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("values must be a 1D array with at least 2 samples")
    n = values.size
    spectrum = np.fft.rfft(values)
    weights = np.full(spectrum.size, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    k = np.arange(spectrum.size) * (2.0 * np.pi / length)
    x_new = np.asarray(x_new, dtype=float)
    phases = np.exp(1j * np.outer(x_new.ravel(), k))
    out = (phases @ (weights * spectrum)).real / n
    return out.reshape(x_new.shape)


def period_smooth(values, cells):
    """Circular moving average over ``cells`` consecutive samples.

    Used to erase sub-period ripple from profiles sampled across layers
    before reading threshold crossings.  The filter commutes with
    translation, so applying it to both snapshots of a rigidly
    translating profile leaves front displacements unchanged.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if not 1 <= cells <= n:
        raise ValueError(f"window must lie in [1, {n}], got {cells}")
    kernel = np.zeros(n)
    kernel[:cells] = 1.0 / cells
    kernel = np.roll(kernel, -(cells // 2))
    return np.fft.irfft(np.fft.rfft(values) * np.fft.rfft(kernel), n)


def front_position(coords, values, threshold_frac=FRONT_THRESHOLD):
    """Outermost position where ``values`` falls to a fraction of its max.

    Scans from the far end for the last sample at or above
    ``threshold_frac * max(values)`` and linearly interpolates the
    crossing toward its outward neighbor.  ``coords`` must be ascending.
    """
    coords = np.asarray(coords, dtype=float)
    values = np.asarray(values, dtype=float)
    if coords.shape != values.shape or coords.ndim != 1:
        raise ValueError("coords and values must be 1D arrays of equal length")
    if not 0.0 < threshold_frac < 1.0:
        raise ValueError(f"threshold fraction must lie in (0, 1), got {threshold_frac}")
    peak = values.max()
    if peak <= 0.0:
        raise ValueError("values must have a positive maximum")
    threshold = threshold_frac * peak
    above = np.nonzero(values >= threshold)[0]
    i = int(above[-1])
    if i == coords.size - 1:
        return float(coords[-1])
    # Linear interpolation between the last sample above and the next below.
    frac = (values[i] - threshold) / (values[i] - values[i + 1])
    return float(coords[i] + frac * (coords[i + 1] - coords[i]))


@dataclass(frozen=True)
class ComparisonReport:
    """Per-order relative errors of homogenized profiles against a reference.

    ``monotone`` is True when the relative L2 error does not increase
    as the order rises.  ``runtimes`` carries (label, seconds) pairs,
    ``provenance`` a short description of the medium and coefficient
    origin.
    """

    orders: tuple[int, ...]
    rel_l2: tuple[float, ...]
    rel_linf: tuple[float, ...]
    monotone: bool
    runtimes: tuple[tuple[str, float], ...] = ()
    provenance: str = ""

    def __post_init__(self):
        if tuple(sorted(self.orders)) != self.orders:
            raise ValueError(f"orders must be ascending, got {self.orders}")
        if any(e < 0.0 for e in self.rel_l2 + self.rel_linf):
            raise ValueError("relative errors must be non-negative")
        if not (len(self.orders) == len(self.rel_l2) == len(self.rel_linf)):
            raise ValueError("orders and error tuples must have equal length")


def _as_profile(profile):
    """Accept a ``(x, values)`` pair or an object with ``.x`` and ``.p``."""
    if hasattr(profile, "x") and hasattr(profile, "p"):
        x, p = profile.x, profile.p
    else:
        x, p = profile
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if x.ndim != 1 or x.shape != p.shape or x.size < 2:
        raise ValueError("profiles must be 1D arrays of equal length >= 2")
    spacing = np.diff(x)
    if not np.allclose(spacing, spacing[0], rtol=1e-12, atol=1e-12):
        raise ValueError("profile grids must be uniform")
    return x, p, float(spacing[0]) * x.size


def compare_solutions(fv_profile, homog_profiles, runtimes=(), provenance="") -> ComparisonReport:
    """Relative L2/Linf errors of per-order profiles against a reference.

    ``homog_profiles`` maps order to a profile on any uniform grid over
    the same periodic interval; profiles on a different grid than the
    reference are resampled onto it by trigonometric interpolation.
    """
    x_ref, p_ref, L_ref = _as_profile(fv_profile)
    norm_l2 = float(np.linalg.norm(p_ref))
    norm_inf = float(np.max(np.abs(p_ref)))
    if norm_l2 == 0.0 or norm_inf == 0.0:
        raise ValueError("reference profile must be nonzero")
    orders = tuple(sorted(homog_profiles))
    rel_l2, rel_linf = [], []
    for order in orders:
        x_h, p_h, L_h = _as_profile(homog_profiles[order])
        if not math.isclose(L_ref, L_h, rel_tol=1e-9):
            raise ValueError(
                f"mismatched domains: reference spans {L_ref}, order {order} spans {L_h}")
        if x_h.shape == x_ref.shape and np.allclose(x_h, x_ref, rtol=1e-12, atol=1e-12):
            resampled = p_h
        else:
            resampled = trig_resample(p_h, L_h, x_ref - x_h[0])
        diff = resampled - p_ref
        rel_l2.append(float(np.linalg.norm(diff)) / norm_l2)
        rel_linf.append(float(np.max(np.abs(diff))) / norm_inf)
    monotone = all(b <= a for a, b in zip(rel_l2, rel_l2[1:]))
    return ComparisonReport(orders=orders, rel_l2=tuple(rel_l2),
                            rel_linf=tuple(rel_linf), monotone=monotone,
                            runtimes=tuple(runtimes), provenance=provenance)


# ---------------------------------------------------------------------------
# Artifact writers.

def _write_medium_csv(path, medium: MediumSpec) -> None:
    yhat = np.arange(_MEDIUM_CSV_SAMPLES) / _MEDIUM_CSV_SAMPLES
    K, rho, Z, c = medium_sample(medium, yhat)
    write_csv(path, ["yhat", "K", "rho", "Z", "c"], zip(yhat, K, rho, Z, c))


def _write_coeffs_csv(path, coeffs: HomogCoefficients, avg) -> None:
    rows = [("K_m", avg.K_m), ("K_h", avg.K_h),
            ("rho_m", avg.rho_m), ("rho_h", avg.rho_h)]
    rows += [(name, coeffs.require(name)) for name in COEFFICIENT_NAMES]
    write_csv(path, ["name", "value"], rows)


def _write_dispersion_csv(path, coeffs, avg) -> None:
    """Tabulate omega(k, theta) per order over the validity disk.

    Orders 0/2/4 cover the full circle of angles; the order-6 correction
    exists only for transverse modes, so its rows sit on theta = 0.
    """
    thetas = np.linspace(0.0, 2.0 * np.pi, _DISPERSION_THETAS)
    ks = np.linspace(VALIDITY_CUTOFF / _DISPERSION_KS, VALIDITY_CUTOFF, _DISPERSION_KS)
    rows = []
    for order in (0, 2, 4):
        for theta in thetas:
            kx = ks * math.cos(theta)
            ky = ks * math.sin(theta)
            w2 = system_omega_squared(coeffs, avg, kx, ky, order)
            for k, omega2 in zip(ks, np.atleast_1d(w2)):
                speed = math.sqrt(omega2) / k if omega2 >= 0.0 else math.nan
                rows.append((order, theta, k, omega2, speed, omega2 >= 0.0))
    w2 = system_omega_squared(coeffs, avg, ks, np.zeros_like(ks), 6)
    for k, omega2 in zip(ks, np.atleast_1d(w2)):
        speed = math.sqrt(omega2) / k if omega2 >= 0.0 else math.nan
        rows.append((6, 0.0, k, omega2, speed, omega2 >= 0.0))
    write_csv(path, ["order", "theta", "k", "omega2", "phase_speed", "valid"], rows)


def _field_coords(field: WaveField, centered: bool):
    """Physical coordinates of a snapshot; FV data lives at cell centers."""
    x = np.asarray(field.x, dtype=float)
    y = np.asarray(field.y, dtype=float)
    if centered:
        x = x + 0.5 * field.Lx / field.Nx
        y = y + 0.5 * field.Ly / field.Ny
    return x, y


def _slice_profile(field: WaveField, kind: str, centered: bool, center):
    """Extract one slice: returns (coord, p, u, v) 1D arrays."""
    x, y = _field_coords(field, centered)
    if kind == "x-mean":
        return x, field.p.mean(axis=1), field.u.mean(axis=1), field.v.mean(axis=1)
    if kind == "y-mean":
        return y, field.p.mean(axis=0), field.u.mean(axis=0), field.v.mean(axis=0)
    if kind == "x-center":
        j = int(np.argmin(np.abs(y - center[1])))
        return x, field.p[:, j], field.u[:, j], field.v[:, j]
    j = int(np.argmin(np.abs(x - center[0])))
    return y, field.p[j, :], field.u[j, :], field.v[j, :]


def _write_solver_artifacts(directory: Path, snaps, centered: bool, config) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    index_rows = []
    for i, field in enumerate(snaps):
        name = f"snap_{i:04d}_p.csv"
        x, y = _field_coords(field, centered)
        write_field_csv(directory / name, x, y, field.p)
        index_rows.append((i, field.t, name))
        for kind in config.outputs.slices:
            coord, p, u, v = _slice_profile(field, kind, centered, config.initial.center)
            write_csv(directory / "slices" / f"snap_{i:04d}_{kind}.csv",
                      ["coord", "p", "u", "v"], zip(coord, p, u, v))
    write_csv(directory / "index.csv", ["snapshot", "t", "file"], index_rows)


def _mean_profile(field: WaveField, axis: str, centered: bool):
    """Profile of p averaged over the direction orthogonal to ``axis``."""
    x, y = _field_coords(field, centered)
    if axis == "x":
        return x, field.p.mean(axis=1)
    return y, field.p.mean(axis=0)


def _write_comparison(out: Path, config, fv_snaps, eff_snaps, runtimes) -> ComparisonReport:
    axis = "y" if config.eff_system() == "normal1d" else "x"
    x_ref, p_ref = _mean_profile(fv_snaps[-1], axis, centered=True)
    profiles = {}
    for order, snaps in eff_snaps.items():
        profiles[order] = _mean_profile(snaps[-1], axis, centered=False)
    report = compare_solutions(
        (x_ref, p_ref), profiles,
        runtimes=tuple(sorted(runtimes.items())),
        provenance=f"{config.medium.kind} medium, numeric-chain coefficients",
    )
    write_csv(out / "comparison.csv", ["order", "rel_l2", "rel_linf", "monotone"],
              [(o, l2, linf, report.monotone)
               for o, l2, linf in zip(report.orders, report.rel_l2, report.rel_linf)])
    columns = {"coord": x_ref, "fv": p_ref}
    for order in report.orders:
        x_h, p_h = profiles[order]
        length = float(np.diff(x_h)[0]) * x_h.size
        columns[f"order{order}"] = trig_resample(p_h, length, x_ref - x_h[0])
    write_csv(out / "comparison_profiles.csv", list(columns),
              zip(*(columns[name] for name in columns)))
    return report


def _write_overlays(out: Path, config, fv_snaps, eff_snaps) -> None:
    """Final-time pressure slices, homogenized curves resampled onto FV grids."""
    for kind in config.outputs.slices:
        coord, p_fv, _, _ = _slice_profile(fv_snaps[-1], kind, True, config.initial.center)
        length = float(np.diff(coord)[0]) * coord.size
        columns = {"coord": coord, "fv": p_fv}
        for order, snaps in sorted(eff_snaps.items()):
            c_h, p_h, _, _ = _slice_profile(snaps[-1], kind, False, config.initial.center)
            columns[f"order{order}"] = trig_resample(p_h, length, coord - c_h[0])
        write_csv(out / f"overlay_{kind}.csv", list(columns),
                  zip(*(columns[name] for name in columns)))


# ---------------------------------------------------------------------------
# Run and experiment execution.

def output_root(explicit=None) -> Path:
    """Artifact root: explicit argument, else $LAYERWAVE_OUT, else ./artifacts."""
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get("LAYERWAVE_OUT", "artifacts"))


def _versions() -> dict:
    return {
        "layerwave": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def run_experiment(config: ExperimentConfig, out_dir=None, *, root=None) -> Path:
    """Execute one configured run and write its artifact directory.

    Writes the medium profile, coefficient and dispersion tables, then
    any configured solver snapshots, slices and cross-solver comparison,
    and finally a manifest with the resolved configuration and versions.
    Returns the artifact directory.
    """
    out = Path(out_dir) if out_dir is not None else output_root(root) / config.outputs.directory
    out.mkdir(parents=True, exist_ok=True)
    medium = config.medium.build()
    avg = averages(medium)
    coeffs = compute_coefficients(solve_fastvars(medium, max_order=6))
    _write_medium_csv(out / "medium.csv", medium)
    _write_coeffs_csv(out / "coeffs.csv", coeffs, avg)
    _write_dispersion_csv(out / "dispersion.csv", coeffs, avg)

    runtimes = {}
    Lx, Ly = config.domain.extents
    fv_snaps = None
    if config.fv is not None:
        start = time.perf_counter()
        fv_snaps = run_fv(
            medium, config.initial.pressure, (Lx, Ly), config.t_end,
            resolution=config.fv.resolution, cfl=config.fv.cfl,
            snapshots=config.outputs.cadence, limiter=config.fv.limiter,
            mx=config.fv.mx,
        )
        runtimes["fv"] = time.perf_counter() - start
        _write_solver_artifacts(out / "fv", fv_snaps, centered=True, config=config)

    eff_snaps = {}
    if config.eff is not None:
        system = config.eff_system()
        Nx, Ny = config.domain.eff_grid
        initial = WaveField.from_pressure(Lx, Ly, Nx, Ny, config.initial.pressure)
        for order in config.eff.orders:
            params = EffSolverParams(order=order, t_end=config.t_end,
                                     safety=config.eff.safety,
                                     snapshots=config.outputs.cadence)
            start = time.perf_counter()
            snaps = run_eff(system, medium, coeffs, params, initial)
            runtimes[f"eff-order{order}"] = time.perf_counter() - start
            eff_snaps[order] = snaps
            _write_solver_artifacts(out / "eff" / f"order{order}", snaps,
                                    centered=False, config=config)

    if fv_snaps is not None and eff_snaps:
        _write_comparison(out, config, fv_snaps, eff_snaps, runtimes)
        if config.outputs.slices:
            _write_overlays(out, config, fv_snaps, eff_snaps)

    manifest = {
        "config": config.to_dict(),
        "versions": _versions(),
        "runtimes": {k: round(v, 3) for k, v in sorted(runtimes.items())},
        "artifacts": sorted(str(p.relative_to(out)) for p in out.rglob("*.csv")),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="ascii")
    return out


# ---------------------------------------------------------------------------
# Experiment documents: named runs plus optional summary products.

def load_experiment_doc(path) -> dict:
    """Load an experiment document (or bare single-run config) from JSON."""
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def apply_override(doc: dict, dotted: str, value: str) -> None:
    """Set ``doc[a][b]... = parsed(value)`` from a ``a.b.c=value`` flag.

    The value is parsed as JSON when possible so numbers, lists and
    booleans come through typed; anything unparsable stays a string.
    Intermediate mappings must already exist.
    """
    keys = dotted.split(".")
    target = doc
    for key in keys[:-1]:
        if not isinstance(target, dict) or key not in target:
            raise ConfigError(f"override {dotted!r}: no such key {key!r}")
        target = target[key]
    if not isinstance(target, dict):
        raise ConfigError(f"override {dotted!r}: {keys[-2]!r} is not an object")
    try:
        target[keys[-1]] = json.loads(value)
    except json.JSONDecodeError:
        target[keys[-1]] = value


def _normalize_doc(doc: dict):
    """Return (name, {label: ExperimentConfig}, summary) from a document."""
    doc = _require_mapping(doc, "experiment")
    if "runs" not in doc:
        # Bare single-run config: wrap it as a one-run document.
        config = ExperimentConfig.from_dict(doc, "config")
        return config.outputs.directory, {"run": config}, None
    _reject_unknown(doc, ("name", "runs", "summary"), "experiment")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        _fail("experiment.name", "expected a non-empty string")
    runs_raw = _require_mapping(doc["runs"], "experiment.runs")
    if not runs_raw:
        _fail("experiment.runs", "expected at least one run")
    runs = {}
    for label in sorted(runs_raw):
        runs[label] = ExperimentConfig.from_dict(runs_raw[label], f"runs.{label}")
    summary = doc.get("summary")
    if summary not in (None, "fronts", "polar"):
        _fail("experiment.summary", f"expected 'fronts' or 'polar', got {summary!r}")
    return name, runs, summary


def _front_from_slices(run_dir: Path, solver: str, config: ExperimentConfig):
    """Leading-front displacement of one solver's ray from its slice CSVs.

    The outgoing characteristic p/2 + Z_eff v/2 isolates the wave moving
    toward +axis; profiles along y are smoothed over one period first to
    erase the material ripple that the mean over the uniform direction
    cannot remove.
    """
    axis = config.initial.axis
    kind = "x-mean" if axis == "x" else "y-mean"
    slices_dir = run_dir / solver / "slices"
    files = sorted(slices_dir.glob(f"snap_*_{kind}.csv"))
    first = read_csv_columns(files[0])
    last = read_csv_columns(files[-1])
    medium = config.medium.build()
    avg = averages(medium)
    if axis == "x":
        impedance = math.sqrt(avg.K_h * avg.rho_h)
        velocity = "u"
    else:
        impedance = math.sqrt(avg.K_h * avg.rho_m)
        velocity = "v"
    coord = first["coord"]

    def outgoing(frame):
        w = 0.5 * (frame["p"] + impedance * frame[velocity])
        if axis == "y":
            cells = round(coord.size / config.domain.extents[1])
            w = period_smooth(w, cells)
        return w

    center = config.initial.center[0 if axis == "x" else 1]
    keep = coord >= center
    start = front_position(coord[keep] - center, outgoing(first)[keep])
    end = front_position(coord[keep] - center, outgoing(last)[keep])
    return end - start


def _write_fronts_summary(out: Path, runs: dict) -> None:
    """Front displacements against c_eff * t for every quasi-1D ray run."""
    rows = []
    for label in sorted(runs):
        config = runs[label]
        if config.initial.kind != "gaussian1d" or config.t_end is None:
            continue
        axis = config.initial.axis
        avg = averages(config.medium.build())
        theta = 0.0 if axis == "x" else math.pi / 2.0
        target = effective_sound_speed(avg, theta) * config.t_end
        solvers = []
        if config.fv is not None:
            solvers.append("fv")
        if config.eff is not None:
            solvers += [f"eff/order{o}" for o in config.eff.orders]
        for solver in solvers:
            front = _front_from_slices(out / label, solver, config)
            rows.append((label, axis, solver.replace("/", "-"), front, target,
                         abs(front - target) / target))
    write_csv(out / "fronts.csv",
              ["run", "axis", "solver", "front", "target", "rel_err"], rows)


def _write_polar_summary(out: Path, runs: dict) -> None:
    """Effective sound speed against angle for every run's medium."""
    thetas = np.linspace(0.0, 2.0 * np.pi, _POLAR_THETAS)
    columns = {"theta": thetas}
    for label in sorted(runs):
        avg = averages(runs[label].medium.build())
        columns[f"c_{label}"] = effective_sound_speed(avg, thetas)
    write_csv(out / "polar.csv", list(columns),
              zip(*(columns[name] for name in columns)))


def run_experiment_doc(doc: dict, *, root=None, out_dir=None, workers=None) -> Path:
    """Execute every run of an experiment document, then its summary.

    Runs are independent and execute concurrently, each writing its own
    subdirectory.  Returns the experiment directory, which contains a
    top-level manifest naming the runs and any summary CSV.
    """
    name, runs, summary = _normalize_doc(doc)
    out = Path(out_dir) if out_dir is not None else output_root(root) / name
    out.mkdir(parents=True, exist_ok=True)
    labels = sorted(runs)
    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=workers or min(4, len(labels))) as pool:
        futures = {label: pool.submit(run_experiment, runs[label], out / label)
                   for label in labels}
        for label in labels:
            try:
                futures[label].result()
            except ConfigError:
                raise
            except Exception as exc:
                raise RuntimeError(f"run {label!r} failed: {exc}") from exc
    summary_files = []
    if summary == "fronts":
        _write_fronts_summary(out, runs)
        summary_files.append("fronts.csv")
    elif summary == "polar":
        _write_polar_summary(out, runs)
        summary_files.append("polar.csv")
    manifest = {
        "experiment": name,
        "runs": {label: label for label in labels},
        "summary": summary_files,
        "versions": _versions(),
        "wall_seconds": round(time.perf_counter() - start, 3),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="ascii")
    return out


# ---------------------------------------------------------------------------
# Canned experiments: the paper-style runs at desk scale.

# rho pair with arithmetic mean rho_m and harmonic mean 1; K = 1 throughout.
def _rho_pair(rho_m: float):
    spread = math.sqrt(rho_m * rho_m - rho_m)
    return rho_m + spread, rho_m - spread


def _anisotropic_doc() -> dict:
    rho_A, rho_B = _rho_pair(8.0)
    medium = {"kind": "piecewise", "K_A": 1.0, "K_B": 1.0,
              "rho_A": rho_A, "rho_B": rho_B}
    return {
        "name": "anisotropic",
        "summary": "fronts",
        "runs": {
            "theta-0": {
                "medium": medium,
                "initial": {"kind": "gaussian1d", "axis": "x",
                            "amplitude": 5.0, "sigma": 3.0, "center": 16.0},
                "domain": {"extents": [32.0, 1.0], "eff_grid": [1024, 1]},
                "t_end": 5.0,
                "eff": {"orders": [0]},
                "fv": {"resolution": 32},
                "outputs": {"directory": "theta-0", "cadence": 1,
                            "slices": ["x-mean"]},
            },
            "theta-90": {
                "medium": medium,
                "initial": {"kind": "gaussian1d", "axis": "y",
                            "amplitude": 5.0, "sigma": 2.0, "center": 8.0},
                "domain": {"extents": [0.125, 16.0], "eff_grid": [1, 512]},
                "t_end": 5.0,
                "eff": {"orders": [0]},
                "fv": {"resolution": 32},
                "outputs": {"directory": "theta-90", "cadence": 1,
                            "slices": ["y-mean"]},
            },
            "field": {
                "medium": medium,
                "initial": {"kind": "gaussian2d", "amplitude": 5.0,
                            "sigma": 2.0, "center": [16.0, 8.0]},
                "domain": {"extents": [32.0, 16.0]},
                "t_end": 5.0,
                "fv": {"resolution": 16},
                "outputs": {"directory": "field", "cadence": 1, "slices": []},
            },
        },
    }


def _planewave_doc() -> dict:
    # Long transverse travel (~200 periods) in a wrapping box.  The two
    # pulse images land separated because 2 c t is not a multiple of
    # Lx = 64: piecewise runs to t=160 (c=1.25, travel 200, images 16
    # apart, as wide a wrap separation as the slower grid allows) and
    # sinusoidal to t=176 (c=1, travel 176, images 32 apart).  The
    # sinusoidal medium is staircased by the cell-centred FV sampling,
    # which biases its effective dispersion by O(dy^2); 64 cells per
    # period keep that bias inside the order-4 error budget, while
    # dx = 1/32 suffices for the smooth x profile in both media.
    def run(medium, resolution, t_end):
        return {
            "medium": medium,
            "initial": {"kind": "gaussian1d", "axis": "x", "amplitude": 10.0,
                        "sigma": math.sqrt(5.0), "center": 32.0},
            "domain": {"extents": [64.0, 1.0], "eff_grid": [128, 1]},
            "t_end": t_end,
            "eff": {"orders": [0, 2, 4, 6]},
            "fv": {"resolution": resolution, "mx": 2048},
            "outputs": {"directory": "run", "cadence": 1, "slices": ["x-mean"]},
        }

    return {
        "name": "planewave-transverse",
        "runs": {
            "piecewise": run({"kind": "piecewise", "K_A": 0.625, "K_B": 2.5,
                              "rho_A": 1.6, "rho_B": 0.4}, 32, 160.0),
            "sinusoidal": run({"kind": "sinusoidal", "K_A": 0.625, "K_B": 2.5},
                              64, 176.0),
        },
    }


_QUADRANT_MEDIA = {
    # Fig-2-style regimes: Z and c both constant, only c varying, only Z
    # varying, and both varying.
    "TL-uniform": {"kind": "piecewise", "K_A": 1.0, "K_B": 1.0,
                   "rho_A": 1.0, "rho_B": 1.0},
    "TR-constant-Z": {"kind": "piecewise", "K_A": 0.625, "K_B": 2.5,
                      "rho_A": 1.6, "rho_B": 0.4},
    "BL-constant-c": {"kind": "piecewise", "K_A": 2.0, "K_B": 0.5,
                      "rho_A": 2.0, "rho_B": 0.5},
    "BR-varying-both": {"kind": "piecewise", "K_A": 8.5, "K_B": 0.53125,
                        "rho_A": 1.0, "rho_B": 1.0},
}


def _gaussian_box_run(medium: dict, directory: str) -> dict:
    return {
        "medium": medium,
        "initial": {"kind": "gaussian2d", "amplitude": 1.0, "sigma": 2.0,
                    "center": [16.0, 16.0]},
        "domain": {"extents": [32.0, 32.0], "eff_grid": [32, 32]},
        "t_end": 6.0,
        "eff": {"orders": [0, 2]},
        "fv": {"resolution": 16},
        "outputs": {"directory": directory, "cadence": 1,
                    "slices": ["x-center", "y-center"]},
    }


def _quadrants_doc() -> dict:
    return {
        "name": "quadrants",
        "runs": {label: _gaussian_box_run(medium, label)
                 for label, medium in _QUADRANT_MEDIA.items()},
    }


def _almost_isotropic_doc() -> dict:
    return {
        "name": "almost-isotropic",
        "runs": {"almost-isotropic": _gaussian_box_run(
            _QUADRANT_MEDIA["BR-varying-both"], "almost-isotropic")},
    }


def _polar_speed_doc() -> dict:
    runs = {}
    for rho_m in (1, 2, 4, 8):
        rho_A, rho_B = _rho_pair(float(rho_m))
        runs[f"rho-m-{rho_m}"] = {
            "medium": {"kind": "piecewise", "K_A": 1.0, "K_B": 1.0,
                       "rho_A": rho_A, "rho_B": rho_B},
            "initial": {"kind": "gaussian2d", "amplitude": 1.0, "sigma": 1.0},
            "domain": {"extents": [1.0, 1.0]},
            "outputs": {"directory": f"rho-m-{rho_m}", "cadence": 1, "slices": []},
        }
    return {"name": "polar-speed", "summary": "polar", "runs": runs}


_CANNED = {
    "anisotropic": _anisotropic_doc,
    "planewave-transverse": _planewave_doc,
    "quadrants": _quadrants_doc,
    "almost-isotropic": _almost_isotropic_doc,
    "polar-speed": _polar_speed_doc,
}

CANNED_EXPERIMENTS = tuple(sorted(_CANNED))


def canned_experiment(name: str) -> dict:
    """A fresh document for one of the built-in experiments."""
    if name not in _CANNED:
        raise ConfigError(
            f"unknown experiment {name!r}; available: {', '.join(CANNED_EXPERIMENTS)}")
    return _CANNED[name]()
