"""Homogenized-system coefficients for 1D-periodic media.

The effective equations carry three families of dispersive coefficients
(six ``alpha`` for the pressure equation, six ``beta`` for the x-momentum
equation, five ``gamma`` for the y-momentum equation), each a weighted
period average of fast-variable chain functions.  All are dimensionless
in the period-1 normalization used throughout the package.

Two independent routes are provided for layered media: the generic
numeric chain (:func:`compute_coefficients`) and closed forms for the
first nonzero corrections (:func:`closed_form_first_order_layered`),
which serve as an oracle for each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .fastfield import FastVarTable
from .medium import MediumSpec, averages as medium_averages

__all__ = [
    "HomogCoefficients",
    "CoefficientUnavailableError",
    "compute_coefficients",
    "closed_form_first_order_layered",
    "combined_leading_dispersion",
    "FirstOrderCoefficients",
    "LeadingDispersion",
]

# Fast-variable function (and its chain level) each coefficient needs.
_REQUIRED_FUNCTION = {
    "alpha1": ("F", 2),
    "alpha2": ("H", 2),
    "alpha3": ("U", 4),
    "alpha4": ("W", 4),
    "alpha5": ("V", 4),
    "alpha6": ("Btilde", 6),
    "beta1": ("F", 2),
    "beta2": ("H", 2),
    "beta3": ("U", 4),
    "beta4": ("W", 4),
    "beta5": ("V", 4),
    "beta6": ("Btilde", 6),
    "gamma1": ("E", 2),
    "gamma2": ("D", 2),
    "gamma3": ("T", 4),
    "gamma4": ("Q", 4),
    "gamma5": ("R", 4),
}

COEFFICIENT_NAMES = tuple(_REQUIRED_FUNCTION)


class CoefficientUnavailableError(ValueError):
    """A coefficient was requested beyond the computed chain order."""


@dataclass(frozen=True)
class HomogCoefficients:
    """The 17 homogenized coefficients, with ``None`` marking not-computed.

    A ``None`` entry means the fast-variable table was not built deep
    enough for that coefficient — it is an explicit marker, never a zero.
    Use :meth:`require` to fetch a value with a helpful error.

    ``provenance`` records how the values were obtained:
    ``"numeric-chain"`` or ``"closed-form"``.
    """

    alpha1: float | None = None
    alpha2: float | None = None
    alpha3: float | None = None
    alpha4: float | None = None
    alpha5: float | None = None
    alpha6: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    beta3: float | None = None
    beta4: float | None = None
    beta5: float | None = None
    beta6: float | None = None
    gamma1: float | None = None
    gamma2: float | None = None
    gamma3: float | None = None
    gamma4: float | None = None
    gamma5: float | None = None
    provenance: str = "numeric-chain"

    def require(self, name: str) -> float:
        """Return coefficient ``name``, or raise naming what is missing."""
        if name not in _REQUIRED_FUNCTION:
            raise KeyError(f"unknown coefficient {name!r}")
        value = getattr(self, name)
        if value is None:
            function, level = _REQUIRED_FUNCTION[name]
            raise CoefficientUnavailableError(
                f"coefficient {name} needs fast-variable function {function} "
                f"(chain order {level}); rebuild the table with max_order >= {level}"
            )
        return value

    def as_dict(self, include_missing: bool = False) -> dict:
        """Name -> value mapping, skipping ``None`` entries by default."""
        out = {}
        for name in COEFFICIENT_NAMES:
            value = getattr(self, name)
            if value is not None or include_missing:
                out[name] = value
        return out


def compute_coefficients(
    table: FastVarTable, medium: MediumSpec | None = None
) -> HomogCoefficients:
    """Assemble every coefficient the table's chain depth supports.

    Parameters
    ----------
    table : FastVarTable
        Chain output of :func:`layerwave.fastfield.solve_fastvars`.
    medium : MediumSpec, optional
        Consistency check only; must be the table's medium when given.

    Returns
    -------
    HomogCoefficients
        Entries beyond ``table.max_order`` are ``None``.
    """
    if medium is not None and medium is not table.medium:
        raise ValueError("medium does not match the one the table was built from")
    avg = table.averages
    Kh, rho_m, rho_h = avg.K_h, avg.rho_m, avg.rho_h
    wm = table.weighted_means

    def have(*names: str) -> bool:
        return all(name in table.functions for name in names)

    values: dict = {}
    if have("F", "H", "D", "E"):
        kF, kH = wm["Kinv*F"], wm["Kinv*H"]
        rF, rH = wm["rhoinv*F"], wm["rhoinv*H"]
        rhoD, rhoE = wm["rho*D"], wm["rho*E"]
        values["alpha1"] = Kh * kF
        values["alpha2"] = Kh * kH
        values["beta1"] = -rho_h * rF
        values["beta2"] = -rho_h * rH
        values["gamma1"] = rhoE / rho_m
        values["gamma2"] = rhoD / rho_h
        if have("U", "V", "W", "Q", "R", "S", "T"):
            kW = wm["Kinv*W"]
            values["alpha3"] = Kh * wm["Kinv*U"] - Kh**2 * kF**2
            values["alpha4"] = Kh * kW - Kh**2 * kH**2
            values["alpha5"] = Kh * wm["Kinv*V"] - 2 * Kh**2 * kF * kH
            values["beta3"] = -rho_h * wm["rhoinv*U"]
            values["beta4"] = -rho_h * wm["rhoinv*W"]
            values["beta5"] = -rho_h * wm["rhoinv*V"]
            values["gamma3"] = wm["rho*T"] / rho_m - (rhoE / rho_m) ** 2
            values["gamma4"] = (
                wm["rho*Q"] / rho_h
                + rF * rhoD
                + wm["rho*S"] / rho_m
                - rhoE * rhoD / (rho_m * rho_h)
            )
            values["gamma5"] = rhoD * rH + wm["rho*R"] / rho_h
            if have("Btilde"):
                values["alpha6"] = (
                    Kh * wm["Kinv*Btilde"] + Kh**3 * kH**3 - 2 * Kh**2 * kH * kW
                )
                values["beta6"] = -rho_h * wm["rhoinv*Btilde"]
    return HomogCoefficients(**values, provenance="numeric-chain")


class FirstOrderCoefficients(NamedTuple):
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    gamma1: float
    gamma2: float


def closed_form_first_order_layered(medium: MediumSpec) -> FirstOrderCoefficients:
    """Closed forms of the first nonzero corrections for a two-band medium.

    Valid for the piecewise layout only (equal half-period bands).  The
    impedance-difference factor ``Z_A^2 - Z_B^2`` drives the normal-family
    coefficients; the sound-speed factor ``c_A^2 - c_B^2`` the transverse
    ones.  The two-band structure forces ``beta1 = -gamma1`` and
    ``beta2 = -gamma2``.
    """
    if medium.kind != "piecewise":
        raise ValueError(f"closed forms require a piecewise medium, got {medium.kind!r}")
    avg = medium_averages(medium)
    K_m, rho_m = avg.K_m, avg.rho_m
    dK = medium.K_A - medium.K_B
    drho = medium.rho_A - medium.rho_B
    dZ2 = medium.K_A * medium.rho_A - medium.K_B * medium.rho_B
    dc2 = medium.K_A / medium.rho_A - medium.K_B / medium.rho_B
    beta1 = drho * dZ2 / (192 * K_m * rho_m**2)
    beta2 = drho * dc2 / (192 * K_m)
    return FirstOrderCoefficients(
        alpha1=-dK * dZ2 / (192 * K_m**2 * rho_m),
        alpha2=-dK * dc2 * rho_m / (192 * K_m**2),
        beta1=beta1,
        beta2=beta2,
        gamma1=-beta1,
        gamma2=-beta2,
    )


class LeadingDispersion(NamedTuple):
    normal: float
    transverse: float


def combined_leading_dispersion(coeffs: HomogCoefficients) -> LeadingDispersion:
    """Leading dispersive coefficients of the combined wave forms.

    Eliminating the velocities from the homogenized first-order system
    (keeping terms through the first correction) gives scalar wave
    equations ``p_tt = c^2 (p_ss + C p_ssss)`` along each axis; the
    returned values are the two ``C``'s:

    ``normal     = -(alpha1 + gamma1)`` (propagation across the layers),
    ``transverse = -(alpha2 + beta2)`` (propagation along the layers).

    For two-band media these equal ``(Z_A^2-Z_B^2)^2/(192 K_m^2 rho_m^2)``
    and ``(c_A^2-c_B^2)^2 rho_m rho_h/(192 K_m^2)`` respectively; both
    vanish exactly when the corresponding material property is constant.
    """
    return LeadingDispersion(
        normal=-(coeffs.require("alpha1") + coeffs.require("gamma1")),
        transverse=-(coeffs.require("alpha2") + coeffs.require("beta2")),
    )
