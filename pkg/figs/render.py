#!/usr/bin/env python3
"""Render one figure from a completed experiment artifact directory."""

from __future__ import annotations

import argparse
import sys

import fig_almost_isotropic
import fig_anisotropy
import fig_planewave_orders
import fig_polar_speed
import fig_quadrants
from loader import FIGURE_IDS, FigureJob

_RENDERERS = {
    "quadrants": fig_quadrants.render,
    "polar-speed": fig_polar_speed.render,
    "anisotropy": fig_anisotropy.render,
    "planewave-orders": fig_planewave_orders.render,
    "almost-isotropic": fig_almost_isotropic.render,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument("--artifacts", required=True,
                        help="experiment directory holding manifest.json")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        job = FigureJob(figure=args.figure, artifacts=args.artifacts,
                        out=args.out)
        path = _RENDERERS[job.figure](job)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
