"""Effective dispersion relations of the homogenized systems.

Plane waves ``exp(i(k_x x + k_y y - omega t))`` in the constant-coefficient
homogenized system satisfy an anisotropic, dispersive relation.  Two forms
are provided:

* :func:`omega_squared` — the power series in k truncated at the requested
  correction order (0, 2 or 4), the form used for dispersion curves and
  surfaces;
* :func:`mode_brackets` / :func:`system_omega_squared` — the exact
  per-mode relation of the truncated PDE system (products of the
  per-equation dispersive brackets), which is what a spectral discretization
  of that system actually evolves.  Time-step selection and per-mode
  oracles use this form.

Angles follow the layering convention: theta = 0 propagates along the
layers (transverse), theta = pi/2 across them (normal).  The relation is
not trusted for wavelengths shorter than the period, so samples with
k > 2*pi are flagged invalid, as are modes whose truncated omega^2 turns
negative (the truncation's short-wave ill-posedness is surfaced, never
clamped).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import HomogCoefficients
from .medium import MediumAverages

__all__ = [
    "VALIDITY_CUTOFF",
    "DispersionSample",
    "effective_sound_speed",
    "omega_squared",
    "mode_brackets",
    "system_omega_squared",
    "dispersion_surface",
]

# Wavelength >= period: the expansion parameter is period/wavelength.
VALIDITY_CUTOFF = 2 * math.pi

_VALID_ORDERS = (0, 2, 4)


@dataclass(frozen=True)
class DispersionSample:
    """One evaluation of the dispersion relation.

    ``phase_speed`` is ``sqrt(omega2)/k`` when ``omega2 >= 0`` and NaN
    otherwise; ``valid`` is True only for ``omega2 >= 0`` and
    ``k <= VALIDITY_CUTOFF``.
    """

    k: float
    theta: float
    omega2: float
    phase_speed: float
    valid: bool

    @property
    def k_x(self) -> float:
        return self.k * math.cos(self.theta)

    @property
    def k_y(self) -> float:
        return self.k * math.sin(self.theta)


def effective_sound_speed(avg: MediumAverages, theta):
    """Long-wavelength propagation speed as a function of angle.

    c_eff(theta) = sqrt((K_h/rho_h) cos^2 + (K_h/rho_m) sin^2).  Transverse
    propagation feels the harmonic density mean, normal propagation the
    arithmetic one, so normal waves are never faster.
    """
    theta = np.asarray(theta, dtype=float)
    c2 = (avg.K_h / avg.rho_h) * np.cos(theta) ** 2 + (
        avg.K_h / avg.rho_m
    ) * np.sin(theta) ** 2
    out = np.sqrt(c2)
    return float(out) if out.ndim == 0 else out


def _series_terms(coeffs: HomogCoefficients, avg: MediumAverages, kx2, ky2, order: int):
    """Shared series assembly on squared wavenumber components."""
    row_x = kx2 / avg.rho_h
    row_y = ky2 / avg.rho_m
    total = row_x + row_y
    if order >= 2:
        a1, a2 = coeffs.require("alpha1"), coeffs.require("alpha2")
        b1, b2 = coeffs.require("beta1"), coeffs.require("beta2")
        g1, g2 = coeffs.require("gamma1"), coeffs.require("gamma2")
        total = total + row_x * ((a2 + b2) * kx2 + (a1 + b1) * ky2)
        total = total + row_y * ((a2 + g2) * kx2 + (a1 + g1) * ky2)
    if order >= 4:
        a3, a4, a5 = (coeffs.require(n) for n in ("alpha3", "alpha4", "alpha5"))
        b3, b4, b5 = (coeffs.require(n) for n in ("beta3", "beta4", "beta5"))
        g3, g4, g5 = (coeffs.require(n) for n in ("gamma3", "gamma4", "gamma5"))
        total = total + row_x * (
            (a2 * b2 - a4 - b4) * kx2**2
            + (a2 * b1 + a1 * b2 - a5 - b5) * kx2 * ky2
            + (a1 * b1 - a3 - b3) * ky2**2
        )
        total = total + row_y * (
            (a2 * g2 - a4 - g5) * kx2**2
            + (a2 * g1 + a1 * g2 - a5 - g4) * kx2 * ky2
            + (a1 * g1 - a3 - g3) * ky2**2
        )
    return avg.K_h * total


def omega_squared(coeffs: HomogCoefficients, avg: MediumAverages, k, theta, order: int):
    """Squared frequency of the dispersion relation truncated at ``order``.

    Parameters
    ----------
    k, theta : array_like
        Wavenumber magnitude and propagation angle; broadcast together.
    order : {0, 2, 4}
        Correction order.  Order 0 is exactly ``c_eff(theta)^2 k^2``.

    Raises
    ------
    CoefficientUnavailableError
        When the coefficient table lacks the requested order.
    """
    if order not in _VALID_ORDERS:
        raise ValueError(f"order must be one of {_VALID_ORDERS}, got {order}")
    k = np.asarray(k, dtype=float)
    theta = np.asarray(theta, dtype=float)
    kx2 = (k * np.cos(theta)) ** 2
    ky2 = (k * np.sin(theta)) ** 2
    out = _series_terms(coeffs, avg, kx2, ky2, order)
    return float(out) if np.ndim(out) == 0 else out


def mode_brackets(coeffs: HomogCoefficients, kx, ky, order: int):
    """Per-equation dispersive multipliers (S_alpha, S_beta, S_gamma).

    The homogenized system acts on a Fourier mode (k_x, k_y) through three
    scalar brackets, one per equation:

    S_alpha = 1 + (a2 kx^2 + a1 ky^2) - (a4 kx^4 + a5 kx^2 ky^2 + a3 ky^4)
    S_beta  = likewise with beta coefficients,
    S_gamma = 1 + (g2 kx^2 + g1 ky^2) - (g5 kx^4 + g4 kx^2 ky^2 + g3 ky^4).

    Order 6 appends ``+ a6 kx^6`` / ``+ b6 kx^6`` and exists only for
    modes with k_y = 0 (the transverse 1D system).
    """
    if order not in (0, 2, 4, 6):
        raise ValueError(f"order must be one of (0, 2, 4, 6), got {order}")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    if order == 6 and np.any(ky != 0):
        raise ValueError("sixth-order corrections exist only for the transverse system (k_y = 0)")
    kx2, ky2 = kx**2, ky**2
    one = np.ones(np.broadcast_shapes(kx2.shape, ky2.shape))
    s_alpha = s_beta = s_gamma = one
    if order >= 2:
        a1, a2 = coeffs.require("alpha1"), coeffs.require("alpha2")
        b1, b2 = coeffs.require("beta1"), coeffs.require("beta2")
        g1, g2 = coeffs.require("gamma1"), coeffs.require("gamma2")
        s_alpha = s_alpha + (a2 * kx2 + a1 * ky2)
        s_beta = s_beta + (b2 * kx2 + b1 * ky2)
        s_gamma = s_gamma + (g2 * kx2 + g1 * ky2)
    if order >= 4:
        a3, a4, a5 = (coeffs.require(n) for n in ("alpha3", "alpha4", "alpha5"))
        b3, b4, b5 = (coeffs.require(n) for n in ("beta3", "beta4", "beta5"))
        g3, g4, g5 = (coeffs.require(n) for n in ("gamma3", "gamma4", "gamma5"))
        s_alpha = s_alpha - (a4 * kx2**2 + a5 * kx2 * ky2 + a3 * ky2**2)
        s_beta = s_beta - (b4 * kx2**2 + b5 * kx2 * ky2 + b3 * ky2**2)
        s_gamma = s_gamma - (g5 * kx2**2 + g4 * kx2 * ky2 + g3 * ky2**2)
    if order >= 6:
        s_alpha = s_alpha + coeffs.require("alpha6") * kx2**3
        s_beta = s_beta + coeffs.require("beta6") * kx2**3
    return s_alpha, s_beta, s_gamma


def system_omega_squared(coeffs: HomogCoefficients, avg: MediumAverages, kx, ky, order: int):
    """Exact per-mode omega^2 of the order-truncated system.

    omega^2 = K_h S_alpha (kx^2 S_beta / rho_h + ky^2 S_gamma / rho_m).
    Agrees with :func:`omega_squared` through the truncation order; the
    bracket products differ beyond it.  May be negative for short waves,
    signalling truncation ill-posedness for those modes.
    """
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    s_alpha, s_beta, s_gamma = mode_brackets(coeffs, kx, ky, order)
    out = avg.K_h * s_alpha * (
        kx**2 * s_beta / avg.rho_h + ky**2 * s_gamma / avg.rho_m
    )
    return float(out) if np.ndim(out) == 0 else out


def dispersion_surface(
    coeffs: HomogCoefficients,
    avg: MediumAverages,
    k_grid,
    theta_grid,
    order: int,
) -> list[DispersionSample]:
    """Tabulate the dispersion relation over a (theta, k) product grid.

    Samples are emitted theta-major, k-minor.  Invalid samples (negative
    omega^2 or k beyond the validity cutoff) are flagged, not dropped, and
    carry NaN phase speed when omega^2 < 0.
    """
    k_grid = np.atleast_1d(np.asarray(k_grid, dtype=float))
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if k_grid.size == 0 or theta_grid.size == 0:
        raise ValueError("k and theta grids must be non-empty")
    if np.any(k_grid <= 0):
        raise ValueError("wavenumbers must be positive")
    samples = []
    for theta in theta_grid:
        w2 = np.atleast_1d(omega_squared(coeffs, avg, k_grid, theta, order))
        for k, omega2 in zip(k_grid, w2):
            ok = omega2 >= 0.0
            samples.append(
                DispersionSample(
                    k=float(k),
                    theta=float(theta),
                    omega2=float(omega2),
                    phase_speed=math.sqrt(omega2) / k if ok else math.nan,
                    valid=bool(ok and k <= VALIDITY_CUTOFF),
                )
            )
    return samples
