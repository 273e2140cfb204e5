"""Four-panel pressure fields with center-line insets and overlays.

Each quadrant shows one layering regime's final pressure field; the
insets trace the horizontal (y=0 through the source) and vertical (x=0)
center lines with the homogenized orders dotted over the reference.
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

# Label prefixes map runs onto the 2x2 grid; unknown labels fill gaps
# in sorted order.
_POSITIONS = {"TL": (0, 0), "TR": (0, 1), "BL": (1, 0), "BR": (1, 1)}


def _grid_positions(labels):
    taken, placed = set(), {}
    for label in sorted(labels):
        pos = _POSITIONS.get(label.split("-")[0])
        if pos is not None and pos not in taken:
            placed[label] = pos
            taken.add(pos)
    free = [p for p in sorted(_POSITIONS.values()) if p not in taken]
    for label in sorted(labels):
        if label not in placed:
            placed[label] = free.pop(0)
    return placed


def _inset(ax, job: FigureJob, run: str, kind: str):
    columns = read_columns(job.path(run, f"overlay_{kind}.csv"))
    ax.plot(columns["coord"], columns["fv"], color="black", lw=0.7)
    for name, values in columns.items():
        if name.startswith("order"):
            order = int(name[len("order"):])
            ax.plot(columns["coord"], values, ls=":", lw=0.9,
                    color=ORDER_COLORS.get(order, "gray"))
    ax.set_xticks([])
    ax.set_yticks([])
    for spine in ax.spines.values():
        spine.set_linewidth(0.4)


def render(job: FigureJob):
    manifest = read_manifest(job.artifacts)
    labels = list(manifest["runs"])
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 8.0), constrained_layout=True)
    for label, (i, j) in _grid_positions(labels).items():
        ax = axes[i][j]
        x, y, p = read_field(final_snapshot(job, label))
        vmin, vmax = symmetric_range(p)
        ax.pcolormesh(x, y, p.T, cmap=FIELD_CMAP, vmin=vmin, vmax=vmax,
                      shading="nearest", rasterized=True)
        ax.set_aspect("equal")
        ax.set_title(label, fontsize=10)
        run_config = read_manifest(job.artifacts / label)["config"]
        cx, cy = run_config["initial"]["center"]
        ax.axhline(cy, color="gray", lw=0.4, ls="--")
        ax.axvline(cx, color="gray", lw=0.4, ls="--")
        _inset(ax.inset_axes([0.02, 0.80, 0.40, 0.18]), job, label, "x-center")
        _inset(ax.inset_axes([0.80, 0.02, 0.18, 0.40]), job, label, "y-center")
    fig.suptitle("Pressure fields by layering regime "
                 "(insets: center lines, homogenized orders dotted)")
    out = save(fig, job)
    plt.close(fig)
    return out
