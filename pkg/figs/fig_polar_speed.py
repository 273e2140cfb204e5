"""Polar plot of the effective sound speed, one curve per medium."""

from __future__ import annotations

import matplotlib.pyplot as plt

from loader import CURVE_COLORS, FigureJob, read_columns, save


def render(job: FigureJob):
    columns = read_columns(job.path("polar.csv"))
    theta = columns["theta"]
    fig = plt.figure(figsize=(6.0, 6.0))
    ax = fig.add_subplot(projection="polar")
    curves = [name for name in columns if name != "theta"]
    for name, color in zip(curves, CURVE_COLORS * (1 + len(curves) // 4)):
        ax.plot(theta, columns[name], color=color, lw=1.2,
                label=name.removeprefix("c_"))
    ax.set_title("Effective sound speed by propagation angle")
    ax.legend(loc="lower left", bbox_to_anchor=(1.0, 0.0), fontsize=8)
    out = save(fig, job)
    plt.close(fig)
    return out
