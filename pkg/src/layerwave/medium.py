"""Material models for media that are periodic in one direction.

A medium is described by its bulk modulus ``K`` and density ``rho`` as
functions of the fast coordinate ``yhat`` over one period (the period is
normalized to 1 throughout).  Three kinds of media are supported:

``piecewise``
    Two alternating material bands per period.  Material A occupies the
    inner half band ``|yhat - 1/2| < 1/4``; material B the rest.
``sinusoidal``
    ``K(yhat) = (K_A+K_B)/2 + (K_A-K_B)/2 * sin(2*pi*yhat)`` with
    ``rho = 1/K``, a smooth constant-impedance profile.
``tabulated``
    Uniform point samples of ``K`` and ``rho`` over ``[0, 1)``.

Derived pointwise quantities are the impedance ``Z = sqrt(K*rho)`` and the
sound speed ``c = sqrt(K/rho)``.  Variation of ``Z`` controls reflection
(and hence dispersion of normally propagating waves); variation of ``c``
controls diffraction (dispersion of transversely propagating waves).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MediumSpec",
    "MediumAverages",
    "make_piecewise",
    "make_sinusoidal",
    "make_tabulated",
    "averages",
    "sample",
]

DEFAULT_SAMPLES = 4096

# Relative tolerance for the constant-impedance / constant-sound-speed flags.
CONSTANT_FLAG_RTOL = 1e-12

# Interfaces of the piecewise band layout within one period.
BAND_EDGES = (0.25, 0.75)


@dataclass(frozen=True, eq=False)
class MediumSpec:
    """Immutable description of a 1-periodic medium.

    Construct via :func:`make_piecewise`, :func:`make_sinusoidal`, or
    :func:`make_tabulated` rather than directly; the factories validate
    parameters.

    Attributes
    ----------
    kind : str
        One of ``"piecewise"``, ``"sinusoidal"``, ``"tabulated"``.
    K_A, K_B : float or None
        Band bulk moduli (piecewise) or sinusoid extremes (sinusoidal).
    rho_A, rho_B : float or None
        Band densities (piecewise only).
    K_table, rho_table : ndarray or None
        Uniform samples over ``[0, 1)`` (tabulated only; read-only).
    """

    kind: str
    K_A: float | None = None
    K_B: float | None = None
    rho_A: float | None = None
    rho_B: float | None = None
    K_table: np.ndarray | None = None
    rho_table: np.ndarray | None = None

    def bulk_modulus(self, yhat):
        """Pointwise ``K`` at ``yhat`` (taken modulo 1); vectorized."""
        yhat = np.asarray(yhat, dtype=float) % 1.0
        if self.kind == "piecewise":
            return np.where(np.abs(yhat - 0.5) < 0.25, self.K_A, self.K_B)
        if self.kind == "sinusoidal":
            mid = 0.5 * (self.K_A + self.K_B)
            amp = 0.5 * (self.K_A - self.K_B)
            return mid + amp * np.sin(2.0 * np.pi * yhat)
        # Tabulated media are point samples with sample-and-hold lookup.
        n = self.K_table.size
        idx = np.floor(yhat * n).astype(int) % n
        return self.K_table[idx]

    def density(self, yhat):
        """Pointwise ``rho`` at ``yhat`` (taken modulo 1); vectorized."""
        yhat = np.asarray(yhat, dtype=float) % 1.0
        if self.kind == "piecewise":
            return np.where(np.abs(yhat - 0.5) < 0.25, self.rho_A, self.rho_B)
        if self.kind == "sinusoidal":
            return 1.0 / self.bulk_modulus(yhat)
        n = self.rho_table.size
        idx = np.floor(yhat * n).astype(int) % n
        return self.rho_table[idx]

    @property
    def table_size(self) -> int | None:
        """Number of table samples, or None for analytic media."""
        return None if self.K_table is None else self.K_table.size


@dataclass(frozen=True)
class MediumAverages:
    """Period averages of a medium and its degeneracy flags.

    Attributes
    ----------
    K_m, rho_m : float
        Arithmetic averages ``<K>``, ``<rho>``.
    K_h, rho_h : float
        Harmonic averages ``<K^-1>^-1``, ``<rho^-1>^-1``.
    constant_impedance : bool
        True when ``Z = sqrt(K*rho)`` is constant over the period to
        1e-12 relative.  Constant impedance kills reflective dispersion.
    constant_soundspeed : bool
        True when ``c = sqrt(K/rho)`` is constant to the same tolerance.
        Constant sound speed kills diffractive dispersion.

    Notes
    -----
    The AM-HM inequality guarantees ``K_h <= K_m`` and ``rho_h <= rho_m``,
    with equality exactly when the coefficient is constant.
    """

    K_m: float
    K_h: float
    rho_m: float
    rho_h: float
    constant_impedance: bool
    constant_soundspeed: bool


def _require_positive(**params: float) -> None:
    for name, value in params.items():
        if not np.isfinite(value) or value <= 0.0:
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


def make_piecewise(K_A: float, K_B: float, rho_A: float, rho_B: float) -> MediumSpec:
    """Two-band layered medium: (K_A, rho_A) on ``|yhat - 1/2| < 1/4``.

    Parameters
    ----------
    K_A, K_B : float
        Bulk moduli of the inner and outer band; must be positive.
    rho_A, rho_B : float
        Densities of the inner and outer band; must be positive.
    """
    _require_positive(K_A=K_A, K_B=K_B, rho_A=rho_A, rho_B=rho_B)
    return MediumSpec(
        kind="piecewise",
        K_A=float(K_A),
        K_B=float(K_B),
        rho_A=float(rho_A),
        rho_B=float(rho_B),
    )


def make_sinusoidal(K_A: float, K_B: float) -> MediumSpec:
    """Smooth constant-impedance medium with sinusoidal ``K`` and ``rho=1/K``.

    ``K`` attains ``K_A`` at ``yhat = 1/4`` and ``K_B`` at ``yhat = 3/4``.
    """
    _require_positive(K_A=K_A, K_B=K_B)
    return MediumSpec(kind="sinusoidal", K_A=float(K_A), K_B=float(K_B))


def make_tabulated(K_samples, rho_samples) -> MediumSpec:
    """Medium defined by uniform samples of ``K`` and ``rho`` over ``[0, 1)``.

    The arrays must have equal length >= 2 and strictly positive entries.
    Sample j is the value at ``yhat = j / n``.
    """
    K_tab = np.ascontiguousarray(K_samples, dtype=float)
    rho_tab = np.ascontiguousarray(rho_samples, dtype=float)
    if K_tab.ndim != 1 or rho_tab.ndim != 1 or K_tab.size != rho_tab.size:
        raise ValueError("K and rho tables must be 1D arrays of equal length")
    if K_tab.size < 2:
        raise ValueError("tabulated medium needs at least 2 samples")
    if not (np.all(np.isfinite(K_tab)) and np.all(np.isfinite(rho_tab))):
        raise ValueError("table entries must be finite")
    if np.any(K_tab <= 0.0) or np.any(rho_tab <= 0.0):
        raise ValueError("table entries must be positive")
    K_tab.flags.writeable = False
    rho_tab.flags.writeable = False
    return MediumSpec(kind="tabulated", K_table=K_tab, rho_table=rho_tab)


def fast_grid(n_samples: int) -> np.ndarray:
    """Uniform fast-coordinate grid ``yhat_j = j / n`` over one period."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    return np.arange(n_samples, dtype=float) / n_samples


def sample(medium: MediumSpec, yhat):
    """Evaluate ``(K, rho, Z, c)`` at ``yhat`` (scalar or array, modulo 1)."""
    K = medium.bulk_modulus(yhat)
    rho = medium.density(yhat)
    return K, rho, np.sqrt(K * rho), np.sqrt(K / rho)


def _constant_to_tol(values: np.ndarray) -> bool:
    mean = values.mean()
    return bool(np.max(np.abs(values - mean)) < CONSTANT_FLAG_RTOL * abs(mean))


def averages(medium: MediumSpec, n_samples: int = DEFAULT_SAMPLES) -> MediumAverages:
    """Arithmetic and harmonic period averages of ``K`` and ``rho``.

    Piecewise media are averaged exactly from the two band values (each
    band has measure 1/2); smooth and tabulated media use the periodic
    rectangle rule on ``n_samples`` uniform points, which is spectrally
    accurate for smooth profiles.

    Parameters
    ----------
    medium : MediumSpec
    n_samples : int
        Grid size for non-piecewise media (ignored for piecewise; a
        tabulated medium is always averaged on its own table).

    Returns
    -------
    MediumAverages
    """
    if medium.kind == "piecewise":
        K = np.array([medium.K_A, medium.K_B])
        rho = np.array([medium.rho_A, medium.rho_B])
    elif medium.kind == "tabulated":
        K, rho = medium.K_table, medium.rho_table
    else:
        grid = fast_grid(n_samples)
        K = medium.bulk_modulus(grid)
        rho = medium.density(grid)
    return MediumAverages(
        K_m=float(K.mean()),
        K_h=float(1.0 / (1.0 / K).mean()),
        rho_m=float(rho.mean()),
        rho_h=float(1.0 / (1.0 / rho).mean()),
        constant_impedance=_constant_to_tol(np.sqrt(K * rho)),
        constant_soundspeed=_constant_to_tol(np.sqrt(K / rho)),
    )
