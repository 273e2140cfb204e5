"""Effective dispersion of acoustic waves in 1D-periodic layered media.

The package computes high-order homogenized models for the 2D acoustics
system with coefficients varying periodically in one direction, evaluates
the resulting anisotropic dispersion relations, and solves both the
homogenized equations (Fourier collocation + RK4) and the original
variable-coefficient system (wave-propagation finite volumes) for
cross-validation.
"""

__version__ = "0.1.0"

from .medium import (
    MediumAverages,
    MediumSpec,
    averages,
    make_piecewise,
    make_sinusoidal,
    make_tabulated,
    sample,
)

__all__ = [
    "__version__",
    "MediumAverages",
    "MediumSpec",
    "averages",
    "make_piecewise",
    "make_sinusoidal",
    "make_tabulated",
    "sample",
]
