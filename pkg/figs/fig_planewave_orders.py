"""Per-order accuracy of the homogenized models on long transverse runs.

One row per medium: final mean-pressure profiles of the reference and
every homogenized order on the left, the relative L2 error against the
model order on the right.
"""

from __future__ import annotations

import matplotlib.pyplot as plt

from loader import FigureJob, ORDER_COLORS, read_columns, read_manifest, save


def render(job: FigureJob):
    manifest = read_manifest(job.artifacts)
    labels = sorted(manifest["runs"])
    fig, axes = plt.subplots(len(labels), 2, figsize=(10.0, 3.2 * len(labels)),
                             constrained_layout=True, squeeze=False)
    for row, label in zip(axes, labels):
        profiles = read_columns(job.path(label, "comparison_profiles.csv"))
        errors = read_columns(job.path(label, "comparison.csv"))
        left, right = row
        left.plot(profiles["coord"], profiles["fv"], color="black", lw=1.0,
                  label="reference")
        for name, values in profiles.items():
            if name.startswith("order"):
                order = int(name[len("order"):])
                left.plot(profiles["coord"], values, lw=0.8, ls="--",
                          color=ORDER_COLORS.get(order, "gray"), label=name)
        left.set_title(f"{label}: final mean pressure", fontsize=9)
        left.set_xlabel("x")
        left.legend(fontsize=7, ncols=2)
        right.semilogy(errors["order"], errors["rel_l2"], "o-",
                       color="tab:blue")
        right.set_title("relative L2 error by model order", fontsize=9)
        right.set_xlabel("order")
        right.set_xticks(list(errors["order"]))
        right.grid(True, which="both", lw=0.3)
    out = save(fig, job)
    plt.close(fig)
    return out
