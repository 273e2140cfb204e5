"""Fast-scale cell functions over one period of the medium.

The homogenized coefficients are weighted averages of a chain of zero-mean
periodic functions of the fast coordinate ``yhat``, built by repeatedly
applying two linear operators to products of the material profiles:

fluctuation
    ``{f} = f - <f>`` where ``<.>`` is the period average.
zero-mean antiderivative
    ``[[f]]`` with ``d/dyhat [[f]] = {f}`` and ``<[[f]]> = 0``.  Periodic
    because the fluctuation integrates to zero over the period.

Two representations back the chain:

* exact per-band polynomials for piecewise media (each antiderivative
  raises the band degree by one; no quadrature error at interfaces), and
* uniform grid samples with FFT antiderivatives for smooth or tabulated
  media (spectrally accurate for smooth profiles).

Both expose the same small algebra (add, subtract, multiply, mean,
fluctuation, antiderivative), so the chain is written once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .medium import DEFAULT_SAMPLES, MediumAverages, MediumSpec, averages, fast_grid

__all__ = [
    "FastVarTable",
    "PeriodicGridFunction",
    "PeriodicPolyFunction",
    "fluctuation",
    "zero_mean_antiderivative",
    "solve_fastvars",
    "closed_form_fastvars_layered",
    "ORDER_LEVELS",
]

# Chain depth -> function names introduced at that depth.
ORDER_LEVELS = {
    1: ("A", "B", "C"),
    2: ("D", "E", "F", "H"),
    3: ("I", "J", "L", "M", "N", "P"),
    4: ("Q", "R", "S", "T", "U", "V", "W"),
    6: ("Atilde", "Btilde"),
}
VALID_ORDERS = (1, 2, 3, 4, 6)

# Minimum table resolution accepted by solve_fastvars.
MIN_TABLE_SAMPLES = 64

# Averages assumed to vanish by the derivation; checked at build time.
_ASSUMED_ZERO = (("Kinv", "C"), ("rhoinv", "C"), ("rho", "A"), ("rho", "B"))
_ASSUMED_ZERO_TOL = 1e-10


def fluctuation(values: np.ndarray) -> np.ndarray:
    """``{f} = f - <f>`` for uniform period samples."""
    values = np.asarray(values, dtype=float)
    return values - values.mean()


def zero_mean_antiderivative(values: np.ndarray) -> np.ndarray:
    """``[[f]]`` for uniform period samples, via the FFT.

    Dividing each Fourier coefficient by ``2*pi*i*m`` integrates the trig
    interpolant; zeroing the ``m = 0`` weight simultaneously drops the
    input mean (the fluctuation) and enforces a zero-mean result.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    spectrum = np.fft.rfft(values)
    modes = np.arange(spectrum.size)
    weights = np.zeros(spectrum.size, dtype=complex)
    weights[1:] = 1.0 / (2j * np.pi * modes[1:])
    return np.fft.irfft(spectrum * weights, n=n)


class PeriodicGridFunction:
    """Period function represented by samples at ``yhat_j = j / n``."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def mean(self) -> float:
        return float(self.values.mean())

    def fluctuation(self) -> "PeriodicGridFunction":
        return PeriodicGridFunction(fluctuation(self.values))

    def zero_mean_antiderivative(self) -> "PeriodicGridFunction":
        return PeriodicGridFunction(zero_mean_antiderivative(self.values))

    def samples_on(self, yhat: np.ndarray) -> np.ndarray:
        # The chain only ever samples a grid function on its own grid.
        if yhat.size != self.values.size:
            raise ValueError("grid function sampled on a foreign grid")
        return self.values.copy()

    def evaluate(self, yhat) -> np.ndarray:
        # Periodic linear interpolation for off-grid queries (the chain
        # functions are continuous, so the error is O(1/n^2)).
        n = self.values.size
        return np.interp(
            np.asarray(yhat, dtype=float) % 1.0,
            np.arange(n) / n,
            self.values,
            period=1.0,
        )

    def _coerce(self, other):
        if isinstance(other, PeriodicGridFunction):
            return other.values
        return float(other)

    def __add__(self, other):
        return PeriodicGridFunction(self.values + self._coerce(other))

    def __sub__(self, other):
        return PeriodicGridFunction(self.values - self._coerce(other))

    def __mul__(self, other):
        return PeriodicGridFunction(self.values * self._coerce(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicGridFunction(-self.values)


class PeriodicPolyFunction:
    """Period function that is polynomial on each band between breakpoints.

    ``breaks`` is the sorted breakpoint array starting at 0 and ending at
    1; segment ``i`` covers ``[breaks[i], breaks[i+1])`` and stores
    ascending coefficients in the local coordinate ``u = yhat - breaks[i]``
    (local coordinates keep high-degree evaluation well conditioned).
    """

    __slots__ = ("breaks", "coefs")

    def __init__(self, breaks, coefs):
        self.breaks = np.asarray(breaks, dtype=float)
        self.coefs = [np.atleast_1d(np.asarray(c, dtype=float)) for c in coefs]

    @classmethod
    def from_band_values(cls, breaks, band_values) -> "PeriodicPolyFunction":
        """Piecewise-constant function from one value per segment."""
        return cls(breaks, [np.array([float(v)]) for v in band_values])

    @property
    def _lengths(self) -> np.ndarray:
        return np.diff(self.breaks)

    def mean(self) -> float:
        total = 0.0
        for length, c in zip(self._lengths, self.coefs):
            total += npoly.polyval(length, npoly.polyint(c))
        return float(total)

    def fluctuation(self) -> "PeriodicPolyFunction":
        m = self.mean()
        out = []
        for c in self.coefs:
            shifted = c.copy()
            shifted[0] -= m
            out.append(shifted)
        return PeriodicPolyFunction(self.breaks, out)

    def zero_mean_antiderivative(self) -> "PeriodicPolyFunction":
        fluct = self.fluctuation()
        running = 0.0
        out = []
        for length, c in zip(self._lengths, fluct.coefs):
            integral = npoly.polyint(c)
            integral[0] += running
            out.append(integral)
            running = npoly.polyval(length, integral)
        result = PeriodicPolyFunction(self.breaks, out)
        return result - result.mean()

    def evaluate(self, yhat) -> np.ndarray:
        yhat = np.asarray(yhat, dtype=float) % 1.0
        seg = np.clip(np.searchsorted(self.breaks, yhat, side="right") - 1, 0, len(self.coefs) - 1)
        out = np.empty(yhat.shape, dtype=float)
        for i, c in enumerate(self.coefs):
            mask = seg == i
            if np.any(mask):
                out[mask] = npoly.polyval(yhat[mask] - self.breaks[i], c)
        return out

    def samples_on(self, yhat: np.ndarray) -> np.ndarray:
        return self.evaluate(yhat)

    def _binary(self, other, op):
        if isinstance(other, PeriodicPolyFunction):
            if not np.array_equal(other.breaks, self.breaks):
                raise ValueError("operands carry different breakpoints")
            return [op(a, b) for a, b in zip(self.coefs, other.coefs)]
        scalar = np.array([float(other)])
        return [op(c, scalar) for c in self.coefs]

    def __add__(self, other):
        return PeriodicPolyFunction(self.breaks, self._binary(other, npoly.polyadd))

    def __sub__(self, other):
        return PeriodicPolyFunction(self.breaks, self._binary(other, npoly.polysub))

    def __mul__(self, other):
        return PeriodicPolyFunction(self.breaks, self._binary(other, npoly.polymul))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicPolyFunction(self.breaks, [-c for c in self.coefs])


@dataclass(frozen=True)
class FastVarTable:
    """Sampled fast-variable functions plus their cached weighted averages.

    Attributes
    ----------
    yhat : ndarray
        Uniform output grid over ``[0, 1)``.
    functions : dict of str -> ndarray
        Zero-mean chain functions sampled on ``yhat``.  Keys follow
        :data:`ORDER_LEVELS` ("A".."W", "Atilde", "Btilde").
    weighted_means : dict of str -> float
        ``<w * f>`` for every stored function and each weight
        ``w in {Kinv, rho, rhoinv}``; keys look like ``"Kinv*F"``.
        Exact for piecewise media.
    means : dict of str -> float
        Plain averages ``<f>`` (zero up to representation accuracy).
    max_order : int
        Deepest chain level computed (see :data:`ORDER_LEVELS`).
    medium : MediumSpec
    averages : MediumAverages
    representation : dict of str -> object
        Backing algebra objects (exact polynomials or grid samples);
        useful for exact follow-up quadrature in tests.
    """

    yhat: np.ndarray
    functions: dict
    weighted_means: dict
    means: dict
    max_order: int
    medium: MediumSpec
    averages: MediumAverages
    representation: dict

    def names(self) -> tuple:
        return tuple(self.functions)

    def evaluate(self, name: str, yhat) -> np.ndarray:
        """Evaluate function ``name`` at arbitrary fast coordinates.

        Exact for the polynomial representation; periodic linear
        interpolation for the grid representation.
        """
        if name not in self.representation:
            raise KeyError(
                f"fast-variable function {name!r} not in table "
                f"(max_order={self.max_order})"
            )
        return self.representation[name].evaluate(yhat)


def _material_functions(medium: MediumSpec, n_samples: int):
    """Return (kinv, rho, rhoinv, output grid) in the fitting algebra."""
    if medium.kind == "piecewise":
        breaks = np.array([0.0, 0.25, 0.75, 1.0])
        kinv = PeriodicPolyFunction.from_band_values(
            breaks, [1.0 / medium.K_B, 1.0 / medium.K_A, 1.0 / medium.K_B]
        )
        rho = PeriodicPolyFunction.from_band_values(
            breaks, [medium.rho_B, medium.rho_A, medium.rho_B]
        )
        rhoinv = PeriodicPolyFunction.from_band_values(
            breaks, [1.0 / medium.rho_B, 1.0 / medium.rho_A, 1.0 / medium.rho_B]
        )
        return kinv, rho, rhoinv, fast_grid(n_samples)
    if medium.kind == "tabulated":
        if medium.table_size < MIN_TABLE_SAMPLES:
            raise ValueError(
                f"tabulated medium has {medium.table_size} samples; "
                f"need at least {MIN_TABLE_SAMPLES} to resolve the chain"
            )
        grid = fast_grid(medium.table_size)
    else:
        grid = fast_grid(n_samples)
    K = medium.bulk_modulus(grid)
    rho_vals = medium.density(grid)
    return (
        PeriodicGridFunction(1.0 / K),
        PeriodicGridFunction(rho_vals),
        PeriodicGridFunction(1.0 / rho_vals),
        grid,
    )


def _build_chain(kinv, rho, rhoinv, avg: MediumAverages, max_order: int) -> dict:
    """Run the fast-variable chain through ``max_order`` levels."""
    Kh, rho_m, rho_h = avg.K_h, avg.rho_m, avg.rho_h
    kK = kinv * Kh          # K^-1 K_h, unit mean
    rR = rhoinv * rho_h     # rho^-1 rho_h, unit mean
    rom = rho * (1.0 / rho_m)
    roh = rho * (1.0 / rho_h)
    def iavg(f):
        return f.zero_mean_antiderivative()

    def wmean(w, f):
        return (w * f).mean()

    fns = {}
    fns["A"] = iavg(kK - rR)
    fns["B"] = iavg(kK)
    fns["C"] = iavg(rom)
    if max_order < 2:
        return fns

    A, B, C = fns["A"], fns["B"], fns["C"]
    fns["D"] = iavg(kK * C - rR * C - A)
    fns["E"] = iavg(kK * C - B)
    fns["F"] = iavg(rom * B - C)
    fns["H"] = iavg(roh * A)
    if max_order < 3:
        return fns

    D, E, F, H = fns["D"], fns["E"], fns["F"], fns["H"]
    kF, rF = wmean(kinv, F), wmean(rhoinv, F)
    kH, rH = wmean(kinv, H), wmean(rhoinv, H)
    rhoE, rhoD = wmean(rho, E), wmean(rho, D)
    fns["I"] = iavg(kK * (F - Kh * kF) - rR * (F - rho_h * rF) - D)
    fns["J"] = iavg(kK * (H - Kh * kH) - rR * (H - rho_h * rH))
    fns["L"] = iavg(kK * (H - Kh * kH))
    fns["M"] = iavg(kK * (F - Kh * kF) - E)
    fns["N"] = iavg(rom * (E - rhoE / rho_m) - F)
    fns["P"] = iavg(roh * (D - rhoD / rho_m) - H)
    if max_order < 4:
        return fns

    I, J, L, M, N, P = (fns[k] for k in ("I", "J", "L", "M", "N", "P"))
    fns["Q"] = iavg(kK * (N - C * (Kh * kF)) - rR * (N - C * (rho_h * rF)) - I)
    fns["R"] = iavg(kK * (P - C * (Kh * kH)) - rR * (P - C * (rho_h * rH)) - J)
    fns["S"] = iavg(kK * (P - C * (Kh * kH)) - L)
    fns["T"] = iavg(kK * (N - C * (Kh * kF)) - M)
    fns["U"] = iavg(rom * (M - B * (rhoE / rho_m)) - N)
    fns["V"] = iavg(rho * A * rF + roh * I + rom * (L - B * (rhoD / rho_h)) - P)
    fns["W"] = iavg(rho * A * rH + roh * J)
    if max_order < 6:
        return fns

    W = fns["W"]
    kW, rW = wmean(kinv, W), wmean(rhoinv, W)
    fns["Atilde"] = iavg(
        kK * (W - Kh * kW - (Kh * kH) * H + Kh**2 * kH**2)
        - rR * (W - rho_h * rW - (rho_h * rH) * H + rho_h**2 * rH**2)
    )
    fns["Btilde"] = iavg(rho * A * rW + rho * J * rH + roh * fns["Atilde"])
    return fns


def solve_fastvars(
    medium: MediumSpec, max_order: int = 6, n_samples: int = DEFAULT_SAMPLES
) -> FastVarTable:
    """Compute the fast-variable function chain for ``medium``.

    Parameters
    ----------
    medium : MediumSpec
    max_order : {1, 2, 3, 4, 6}
        Chain depth.  Level 1 yields A, B, C; 2 adds D..H; 3 adds I..P;
        4 adds Q..W; 6 adds the two functions behind the sixth-order
        transverse corrections.
    n_samples : int
        Output grid size, and the working grid for sinusoidal media.
        Tabulated media always work on their own table grid (and are
        refused below 64 samples); piecewise media are exact regardless.

    Returns
    -------
    FastVarTable

    Warns
    -----
    UserWarning
        When one of the averages the derivation assumes to vanish
        (``<Kinv*C>``, ``<rhoinv*C>``, ``<rho*A>``, ``<rho*B>``) exceeds
        1e-10 in magnitude — possible for asymmetric tabulated media, for
        which the homogenized model is not justified.
    """
    if max_order not in VALID_ORDERS:
        raise ValueError(f"max_order must be one of {VALID_ORDERS}, got {max_order!r}")
    avg = averages(medium, n_samples)
    kinv, rho, rhoinv, grid = _material_functions(medium, n_samples)
    fns = _build_chain(kinv, rho, rhoinv, avg, max_order)

    weights = {"Kinv": kinv, "rho": rho, "rhoinv": rhoinv}
    weighted_means = {
        f"{wname}*{fname}": (w * fn).mean()
        for wname, w in weights.items()
        for fname, fn in fns.items()
    }
    means = {name: fn.mean() for name, fn in fns.items()}
    sampled = {name: fn.samples_on(grid) for name, fn in fns.items()}

    for wname, fname in _ASSUMED_ZERO:
        if fname not in fns:
            continue
        value = weighted_means[f"{wname}*{fname}"]
        if abs(value) > _ASSUMED_ZERO_TOL:
            warnings.warn(
                f"<{wname}*{fname}> = {value:.3e} does not vanish; the "
                "homogenized model assumes it does (asymmetric medium?)",
                UserWarning,
                stacklevel=2,
            )

    return FastVarTable(
        yhat=grid,
        functions=sampled,
        weighted_means=weighted_means,
        means=means,
        max_order=max_order,
        medium=medium,
        averages=avg,
        representation=fns,
    )


def closed_form_fastvars_layered(medium: MediumSpec, yhat) -> tuple:
    """Closed-form first-order functions A, B, C for a piecewise medium.

    Independent oracle for :func:`solve_fastvars`: the three functions are
    piecewise linear with slopes fixed by the band fluctuation values.
    The classical formulas place the band switch at the period boundary;
    they are evaluated here with the quarter-period phase shift that
    aligns their interfaces with this package's band layout (material A
    centered at ``yhat = 1/2``).

    Returns
    -------
    (A, B, C) : tuple of ndarray
        Values on ``yhat``.
    """
    if medium.kind != "piecewise":
        raise ValueError(f"closed forms require a piecewise medium, got {medium.kind!r}")
    avg = averages(medium)
    y = (np.asarray(yhat, dtype=float) - 0.25) % 1.0
    c2_A = medium.K_A / medium.rho_A
    c2_B = medium.K_B / medium.rho_B
    dK = medium.K_A - medium.K_B
    drho = medium.rho_A - medium.rho_B

    first = y < 0.5
    ramp_1 = 1.0 - 4.0 * y   # runs 1 -> -1 over the first half period
    ramp_2 = 3.0 - 4.0 * y   # runs 1 -> -1 over the second half period
    A = np.where(
        first,
        avg.rho_h * (c2_A - c2_B) * ramp_1,
        avg.rho_h * (c2_B - c2_A) * ramp_2,
    ) / (8.0 * avg.K_m)
    B = np.where(first, dK * ramp_1, -dK * ramp_2) / (8.0 * avg.K_m)
    C = np.where(first, -drho * ramp_1, drho * ramp_2) / (8.0 * avg.rho_m)
    return A, B, C
