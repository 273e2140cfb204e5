"""Command line interface.

Verbs mirror the package layers: ``coeffs`` and ``dispersion`` tabulate
the homogenized model for a medium, ``eff`` and ``fv`` run one solver
from a JSON run config, ``experiment`` executes a canned or file-based
experiment document, and ``compare`` recomputes cross-solver error
metrics from an existing artifact directory.

Every verb exits 0 on success and nonzero with a one-line diagnostic on
stderr for configuration or input errors.  Default output locations
resolve against the output root (the ``LAYERWAVE_OUT`` environment
variable when set, else ``artifacts``); explicit ``--out`` paths are
used as given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .coeffs import COEFFICIENT_NAMES, compute_coefficients
from .dispersion import VALIDITY_CUTOFF, dispersion_surface, effective_sound_speed
from .effsolver import EffSolverParams, WaveField, run as run_eff
from .directsolver import run_fv
from .fastfield import solve_fastvars
from .harness import (
    ConfigError,
    ExperimentConfig,
    MediumBlock,
    _DISPERSION_KS,
    _DISPERSION_THETAS,
    _POLAR_THETAS,
    _write_solver_artifacts,
    apply_override,
    canned_experiment,
    compare_solutions,
    load_experiment_doc,
    output_root,
    read_csv_columns,
    read_field_csv,
    run_experiment,
    run_experiment_doc,
    write_csv,
)
from .medium import averages

# Expansion order at which each coefficient first enters the model:
# suffixes 1-2 appear at order 2, 3-5 at order 4, 6 at order 6.
_COEFF_ORDER = {name: 2 if name[-1] in "12" else 6 if name[-1] == "6" else 4
                for name in COEFFICIENT_NAMES}

_SLICE_FLAG = {"x=0": "y-center", "y=0": "x-center"}


def _load_config(path: str) -> ExperimentConfig:
    doc = load_experiment_doc(path)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if "runs" in doc:
        raise ConfigError(
            f"{path}: this is an experiment document; use 'layerwave experiment'")
    return ExperimentConfig.from_dict(doc, where=path)


def _load_medium(path: str):
    """Accept either a full run config or a bare medium block."""
    doc = load_experiment_doc(path)
    if isinstance(doc, dict) and "kind" in doc:
        return MediumBlock.from_dict(doc, "medium").build()
    return _load_config(path).medium.build()


def _resolve_out(arg: str | None, default: str) -> Path:
    return Path(arg) if arg is not None else output_root() / default


def _cmd_coeffs(args) -> int:
    medium = _load_medium(args.config)
    avg = averages(medium)
    coeffs = compute_coefficients(solve_fastvars(medium, max_order=6))
    rows = [("K_m", avg.K_m), ("K_h", avg.K_h),
            ("rho_m", avg.rho_m), ("rho_h", avg.rho_h)]
    rows += [(name, coeffs.require(name)) for name in COEFFICIENT_NAMES
             if _COEFF_ORDER[name] <= args.order]
    out = _resolve_out(args.out, "coeffs.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, ["name", "value"], rows)
    print(out)
    return 0


def _cmd_dispersion(args) -> int:
    medium = _load_medium(args.config)
    avg = averages(medium)
    out = _resolve_out(args.out, "polar.csv" if args.polar else "dispersion.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.polar:
        thetas = np.linspace(0.0, 2.0 * np.pi, _POLAR_THETAS)
        write_csv(out, ["theta", "c"],
                  zip(thetas, effective_sound_speed(avg, thetas)))
        print(out)
        return 0
    coeffs = compute_coefficients(solve_fastvars(medium, max_order=6))
    ks = np.linspace(VALIDITY_CUTOFF / _DISPERSION_KS, VALIDITY_CUTOFF,
                     _DISPERSION_KS)
    thetas = np.linspace(0.0, 2.0 * np.pi, _DISPERSION_THETAS)
    samples = dispersion_surface(coeffs, avg, ks, thetas, args.order)
    write_csv(out, ["theta", "k", "omega2", "phase_speed", "valid"],
              ((s.theta, s.k, s.omega2, s.phase_speed, s.valid) for s in samples))
    print(out)
    return 0


def _cmd_eff(args) -> int:
    config = _load_config(args.config)
    if config.domain.eff_grid is None:
        raise ConfigError(f"{args.config}: domain.eff_grid is required for eff")
    if config.t_end is None:
        raise ConfigError(f"{args.config}: t_end is required for eff")
    if args.order == 6 and config.domain.eff_grid[1] != 1:
        raise ConfigError("order 6 needs a transverse 1D grid (eff_grid [N, 1])")
    medium = config.medium.build()
    coeffs = compute_coefficients(solve_fastvars(medium, max_order=6))
    Lx, Ly = config.domain.extents
    Nx, Ny = config.domain.eff_grid
    initial = WaveField.from_pressure(Lx, Ly, Nx, Ny, config.initial.pressure)
    safety = config.eff.safety if config.eff is not None else 0.5
    params = EffSolverParams(order=args.order, t_end=config.t_end, safety=safety,
                             snapshots=config.outputs.cadence)
    snaps = run_eff(config.eff_system(), medium, coeffs, params, initial)
    out = _resolve_out(args.out, "eff")
    _write_solver_artifacts(out, snaps, centered=False, config=config)
    print(out)
    return 0


def _cmd_fv(args) -> int:
    config = _load_config(args.config)
    if config.fv is None:
        raise ConfigError(f"{args.config}: an fv block is required")
    for flag in args.slice:
        kind = _SLICE_FLAG[flag]
        if kind not in config.outputs.slices:
            outputs = dataclasses.replace(
                config.outputs, slices=config.outputs.slices + (kind,))
            config = dataclasses.replace(config, outputs=outputs)
    medium = config.medium.build()
    Lx, Ly = config.domain.extents
    snaps = run_fv(medium, config.initial.pressure, (Lx, Ly), config.t_end,
                   resolution=config.fv.resolution, cfl=config.fv.cfl,
                   snapshots=config.outputs.cadence, limiter=config.fv.limiter,
                   mx=config.fv.mx)
    out = _resolve_out(args.out, "fv")
    _write_solver_artifacts(out, snaps, centered=True, config=config)
    print(out)
    return 0


def _cmd_experiment(args) -> int:
    if (args.name is None) == (args.config is None):
        raise ConfigError("give exactly one of a canned experiment name or --config")
    doc = canned_experiment(args.name) if args.name else load_experiment_doc(args.config)
    for assignment in args.set:
        key, sep, value = assignment.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {assignment!r}")
        apply_override(doc, key, value)
    out = run_experiment_doc(doc, out_dir=args.out, workers=args.workers)
    print(out)
    return 0


def _mean_profile_from_dir(directory: Path, axis: str):
    """Final-snapshot pressure profile averaged across the other axis."""
    index = read_csv_columns(directory / "index.csv")
    x, y, p = read_field_csv(directory / index["file"][-1])
    if axis == "x":
        return x, p.mean(axis=1)
    return y, p.mean(axis=0)


def _cmd_compare(args) -> int:
    root = Path(args.artifacts)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise ConfigError(f"{root}: no manifest.json (not a run directory)")
    manifest = json.loads(manifest_path.read_text(encoding="ascii"))
    config = ExperimentConfig.from_dict(manifest["config"], where=str(root))
    if config.fv is None or config.eff is None:
        raise ConfigError(f"{root}: comparison needs both an fv and an eff run")
    axis = "y" if config.eff_system() == "normal1d" else "x"
    reference = _mean_profile_from_dir(root / "fv", axis)
    homog = {order: _mean_profile_from_dir(root / "eff" / f"order{order}", axis)
             for order in config.eff.orders}
    runtimes = tuple(sorted(manifest.get("runtimes", {}).items()))
    report = compare_solutions(reference, homog, runtimes=runtimes,
                               provenance=str(root))
    print("order  rel_l2         rel_linf")
    for order, l2, linf in zip(report.orders, report.rel_l2, report.rel_linf):
        print(f"{order:<5d}  {l2:<13.6e}  {linf:<13.6e}")
    print(f"monotone: {'yes' if report.monotone else 'no'}")
    if args.out:
        write_csv(Path(args.out), ["order", "rel_l2", "rel_linf", "monotone"],
                  ((o, l2, li, report.monotone) for o, l2, li
                   in zip(report.orders, report.rel_l2, report.rel_linf)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layerwave",
        description="Homogenized and direct wave solvers for layered media.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("coeffs", help="tabulate homogenized coefficients")
    p.add_argument("--config", required=True,
                   help="JSON run config, or just its medium block")
    p.add_argument("--order", type=int, choices=(2, 4, 6), default=6,
                   help="emit coefficients entering the model up to this order")
    p.add_argument("--out", help="output CSV path (default <root>/coeffs.csv)")
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("dispersion", help="tabulate the dispersion relation")
    p.add_argument("--config", required=True,
                   help="JSON run config, or just its medium block")
    p.add_argument("--order", type=int, choices=(0, 2, 4), default=4)
    p.add_argument("--polar", action="store_true",
                   help="emit (theta, effective sound speed) instead of a surface")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("eff", help="run the homogenized solver")
    p.add_argument("--config", required=True, help="JSON run config")
    p.add_argument("--order", type=int, choices=(0, 2, 4, 6), required=True)
    p.add_argument("--out", help="output directory (default <root>/eff)")
    p.set_defaults(func=_cmd_eff)

    p = sub.add_parser("fv", help="run the finite volume solver")
    p.add_argument("--config", required=True, help="JSON run config")
    p.add_argument("--slice", action="append", choices=sorted(_SLICE_FLAG),
                   default=[], help="also emit a line trace through the center")
    p.add_argument("--out", help="output directory (default <root>/fv)")
    p.set_defaults(func=_cmd_fv)

    p = sub.add_parser("experiment", help="run a canned or file-based experiment")
    p.add_argument("name", nargs="?", help="canned experiment name")
    p.add_argument("--config", help="JSON experiment document")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a document entry (dotted path, JSON value)")
    p.add_argument("--out", help="output directory (default <root>/<name>)")
    p.add_argument("--workers", type=int, help="concurrent runs (default auto)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("compare", help="cross-solver errors from a run directory")
    p.add_argument("--artifacts", required=True, help="run directory to compare")
    p.add_argument("--out", help="also write the table as CSV")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, RuntimeError, ValueError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
