"""Close-up of the nearly isotropic regime: field plus center-line cuts.

A medium can vary strongly in both properties yet radiate almost
isotropically; the field panel shows the pattern and the two cuts
overlay the homogenized orders (dotted) on the reference.
"""

from __future__ import annotations

import matplotlib.pyplot as plt

from loader import (
    FIELD_CMAP,
    FigureJob,
    ORDER_COLORS,
    final_snapshot,
    read_columns,
    read_field,
    read_manifest,
    save,
    symmetric_range,
)


def _cut(ax, job: FigureJob, run: str, kind: str, axis_name: str):
    columns = read_columns(job.path(run, f"overlay_{kind}.csv"))
    ax.plot(columns["coord"], columns["fv"], color="black", lw=1.0,
            label="reference")
    for name, values in columns.items():
        if name.startswith("order"):
            order = int(name[len("order"):])
            ax.plot(columns["coord"], values, ls=":", lw=1.2,
                    color=ORDER_COLORS.get(order, "gray"), label=name)
    ax.set_xlabel(axis_name)
    ax.set_ylabel("pressure")
    ax.legend(fontsize=7)


def render(job: FigureJob):
    manifest = read_manifest(job.artifacts)
    run = sorted(manifest["runs"])[0]
    fig = plt.figure(figsize=(11.0, 4.0), constrained_layout=True)
    grid = fig.add_gridspec(1, 3, width_ratios=(1.2, 1.0, 1.0))
    ax = fig.add_subplot(grid[0, 0])
    x, y, p = read_field(final_snapshot(job, run))
    vmin, vmax = symmetric_range(p)
    ax.pcolormesh(x, y, p.T, cmap=FIELD_CMAP, vmin=vmin, vmax=vmax,
                  shading="nearest", rasterized=True)
    ax.set_aspect("equal")
    ax.set_title(run, fontsize=9)
    _cut(fig.add_subplot(grid[0, 1]), job, run, "x-center", "x")
    _cut(fig.add_subplot(grid[0, 2]), job, run, "y-center", "y")
    out = save(fig, job)
    plt.close(fig)
    return out
