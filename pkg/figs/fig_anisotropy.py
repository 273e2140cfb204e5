"""Anisotropic propagation: 2D field plus principal-axis front checks.

Left: the final pressure field of the 2D run, where the wavefront is
visibly elliptical.  Right: initial and final mean-pressure profiles of
each quasi-1D ray run, annotated with the measured leading-front
displacement of every solver against the effective-speed prediction.
"""

from __future__ import annotations

import matplotlib.pyplot as plt

from loader import (
    FIELD_CMAP,
    FigureJob,
    final_snapshot,
    read_columns,
    read_field,
    read_manifest,
    save,
    symmetric_range,
)


def _ray_profile(job: FigureJob, run: str, kind: str, position: int):
    index = read_columns(job.path(run, "fv", "index.csv"))
    name = index["file"][position].replace("_p.csv", f"_{kind}.csv")
    return read_columns(job.path(run, "fv", "slices", name))


def _ray_panel(ax, job: FigureJob, run: str, axis: str, rows):
    config = read_manifest(job.artifacts / run)["config"]
    center = config["initial"]["center"]
    kind = f"{axis}-mean"
    first = _ray_profile(job, run, kind, 0)
    last = _ray_profile(job, run, kind, -1)
    ax.plot(first["coord"] - center, first["p"], color="gray", lw=0.6,
            label="t = 0")
    ax.plot(last["coord"] - center, last["p"], color="black", lw=1.0,
            label="final")
    lines = [f"target c*t = {target:.3f}" for _, _, target in rows[:1]]
    lines += [f"{solver}: {front:.3f} ({100.0 * err:.1f}%)"
              for solver, front, err in
              ((s, f, e) for s, f, _, e in rows)]
    ax.text(0.02, 0.96, "\n".join(lines), transform=ax.transAxes,
            va="top", fontsize=7,
            bbox={"boxstyle": "round", "fc": "white", "alpha": 0.8})
    ax.set_xlabel(f"{axis} - source")
    ax.set_ylabel("mean pressure")
    ax.set_title(f"{run}: leading-front displacement along {axis}", fontsize=9)
    ax.legend(fontsize=7, loc="upper right")


def render(job: FigureJob):
    fronts = read_columns(job.path("fronts.csv"))
    manifest = read_manifest(job.artifacts)
    field_runs = [label for label in sorted(manifest["runs"])
                  if read_manifest(job.artifacts / label)["config"]
                  ["initial"]["kind"] == "gaussian2d"]
    by_run = {}
    for run, axis, solver, front, target, err in zip(
            fronts["run"], fronts["axis"], fronts["solver"],
            fronts["front"], fronts["target"], fronts["rel_err"]):
        by_run.setdefault((run, axis), []).append((solver, front, target, err))
    fig = plt.figure(figsize=(11.0, 4.5), constrained_layout=True)
    grid = fig.add_gridspec(max(len(by_run), 1), 2, width_ratios=(1.4, 1.0))
    if field_runs:
        ax = fig.add_subplot(grid[:, 0])
        x, y, p = read_field(final_snapshot(job, field_runs[0]))
        vmin, vmax = symmetric_range(p)
        ax.pcolormesh(x, y, p.T, cmap=FIELD_CMAP, vmin=vmin, vmax=vmax,
                      shading="nearest", rasterized=True)
        ax.set_aspect("equal")
        ax.set_title(field_runs[0], fontsize=9)
    for i, ((run, axis), rows) in enumerate(sorted(by_run.items())):
        _ray_panel(fig.add_subplot(grid[i, 1]), job, run, axis, rows)
    out = save(fig, job)
    plt.close(fig)
    return out
