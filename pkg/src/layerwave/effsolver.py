"""Pseudospectral solver for the homogenized effective systems.

The homogenized equations are linear with constant coefficients on a
periodic box, so a Fourier collocation discretization decouples into
independent 3x3 mode systems

    p_hat' = -i K_h S_alpha (k_x u_hat + k_y v_hat)
    u_hat' = -i S_beta  k_x p_hat / rho_h
    v_hat' = -i S_gamma k_y p_hat / rho_m

with the per-equation dispersive brackets S_* from
:mod:`layerwave.dispersion`.  Time integration is classical RK4 applied
to the spectral coefficients; for a linear system this is identical,
step for step, to RK4 on the collocation values, but costs no transforms
between snapshots.  No dealiasing is applied anywhere: constant
coefficients produce no mode coupling.

Odd-derivative factors (the single k in each equation) carry a zeroed
Nyquist mode so that derivatives of real fields stay real; the even
bracket polynomials use the full wavenumber.

The one-dimensional reductions reuse the same machinery on degenerate
grids: the transverse system is ``Ny == 1`` (y-constant fields, sixth
order available), the normal system ``Nx == 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .coeffs import HomogCoefficients
from .dispersion import mode_brackets
from .fastfield import solve_fastvars
from .medium import MediumAverages, MediumSpec
from .medium import averages as medium_averages
from .medium import sample as medium_sample

__all__ = [
    "RK4_IMAGINARY_STABILITY",
    "SYSTEMS",
    "WaveField",
    "EffSolverParams",
    "spectral_derivative",
    "energy",
    "rhs_2d",
    "run",
    "exact_mode_propagator",
    "reconstruct_fast_scale_u",
]

# Extent of RK4's stability interval on the imaginary axis.
RK4_IMAGINARY_STABILITY = 2.8

SYSTEMS = ("2d", "normal1d", "transverse1d")

_DERIVATIVE_ORDERS = (1, 3, 5, 7)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class WaveField:
    """Periodic state (p, u, v) on a uniform collocation grid.

    Arrays are indexed ``[ix, iy]`` with collocation points
    ``x_i = i Lx / Nx`` on ``[0, Lx)`` and likewise in y.  Grid sizes must
    be powers of two; fields must be real and finite.
    """

    Lx: float
    Ly: float
    p: np.ndarray
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("p", "u", "v"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError("domain extents must be positive")
        if self.p.ndim != 2 or self.p.shape != self.u.shape or self.p.shape != self.v.shape:
            raise ValueError("p, u, v must be 2D arrays of one common shape")
        nx, ny = self.p.shape
        if not (_is_power_of_two(nx) and _is_power_of_two(ny)):
            raise ValueError(f"grid sizes must be powers of two, got {nx} x {ny}")
        for name in ("p", "u", "v"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"field {name} contains non-finite values")

    @property
    def Nx(self) -> int:
        return self.p.shape[0]

    @property
    def Ny(self) -> int:
        return self.p.shape[1]

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.Nx) * (self.Lx / self.Nx)

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.Ny) * (self.Ly / self.Ny)

    @classmethod
    def from_pressure(cls, Lx, Ly, Nx, Ny, pressure, t=0.0) -> "WaveField":
        """Build a state with given pressure and zero initial velocities.

        ``pressure`` is either an ``(Nx, Ny)`` array or a callable
        ``pressure(X, Y)`` evaluated on the collocation meshgrid.
        """
        if callable(pressure):
            x = np.arange(Nx) * (Lx / Nx)
            y = np.arange(Ny) * (Ly / Ny)
            X, Y = np.meshgrid(x, y, indexing="ij")
            pressure = pressure(X, Y)
        p = np.asarray(pressure, dtype=float)
        if p.shape != (Nx, Ny):
            raise ValueError(f"pressure shape {p.shape} does not match ({Nx}, {Ny})")
        zero = np.zeros((Nx, Ny))
        return cls(Lx=Lx, Ly=Ly, p=p, u=zero, v=zero.copy(), t=t)


@dataclass(frozen=True)
class EffSolverParams:
    """Run controls: truncation order, end time, step safety, cadence.

    ``order`` 6 is meaningful only for the transverse 1D system (checked
    at run time against the chosen system).  ``snapshots`` equally spaced
    outputs are produced after the initial time.
    """

    order: int
    t_end: float
    safety: float = 0.5
    snapshots: int = 1

    def __post_init__(self):
        if self.order not in (0, 2, 4, 6):
            raise ValueError(f"order must be one of (0, 2, 4, 6), got {self.order}")
        if not 0 < self.safety <= 1:
            raise ValueError("safety factor must lie in (0, 1]")
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")


def spectral_derivative(values, period, axis=0, order=1):
    """Differentiate the trigonometric interpolant along one axis.

    Parameters
    ----------
    values : ndarray
        Real samples on a uniform periodic grid.
    period : float
        Domain length along ``axis``.
    order : {1, 3, 5, 7}
        Odd derivative order; the Nyquist mode is zeroed so the result
        of an odd derivative of a real field is real.
    """
    if order not in _DERIVATIVE_ORDERS:
        raise ValueError(f"derivative order must be one of {_DERIVATIVE_ORDERS}")
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    k = 2 * math.pi * np.fft.rfftfreq(n, d=period / n)
    if n % 2 == 0:
        k[-1] = 0.0
    mult = (1j * k) ** order
    shape = [1] * values.ndim
    shape[axis] = k.size
    spectrum = np.fft.rfft(values, axis=axis) * mult.reshape(shape)
    return np.fft.irfft(spectrum, n=n, axis=axis)


def energy(field: WaveField, avg: MediumAverages) -> float:
    """Quadratic invariant of the leading-order system.

    E = integral of (p^2/K_h + rho_h u^2 + rho_m v^2) over the box.
    Conserved exactly by the order-0 flow; RK4 introduces only a
    high-order drift.
    """
    cell = (field.Lx / field.Nx) * (field.Ly / field.Ny)
    return cell * float(
        np.sum(field.p**2) / avg.K_h
        + avg.rho_h * np.sum(field.u**2)
        + avg.rho_m * np.sum(field.v**2)
    )


class _ModeSpace:
    """Precomputed spectral multipliers for one grid/order combination."""

    def __init__(self, field: WaveField, coeffs: HomogCoefficients,
                 avg: MediumAverages, order: int):
        nx, ny = field.Nx, field.Ny
        kx = 2 * math.pi * np.fft.fftfreq(nx, d=field.Lx / nx)
        ky = 2 * math.pi * np.fft.rfftfreq(ny, d=field.Ly / ny)
        kxo = kx.copy()
        if nx % 2 == 0:
            kxo[nx // 2] = 0.0
        kyo = ky.copy()
        if ny % 2 == 0:
            kyo[-1] = 0.0
        KX, KY = np.meshgrid(kx, ky, indexing="ij")
        KXo, KYo = np.meshgrid(kxo, kyo, indexing="ij")
        s_alpha, s_beta, s_gamma = mode_brackets(coeffs, KX, KY, order)
        self.kx, self.ky = kx, ky
        self.shape = (nx, ny)
        self.pa = avg.K_h * s_alpha * KXo
        self.pb = avg.K_h * s_alpha * KYo
        self.ub = s_beta * KXo / avg.rho_h
        self.vg = s_gamma * KYo / avg.rho_m
        self.omega2 = avg.K_h * s_alpha * (
            KXo**2 * s_beta / avg.rho_h + KYo**2 * s_gamma / avg.rho_m
        )

    def forward(self, field: WaveField) -> np.ndarray:
        return np.stack(
            [np.fft.rfft2(field.p), np.fft.rfft2(field.u), np.fft.rfft2(field.v)]
        )

    def inverse(self, state: np.ndarray) -> tuple:
        return tuple(np.fft.irfft2(state[i], s=self.shape) for i in range(3))

    def rhs(self, state: np.ndarray) -> np.ndarray:
        out = np.empty_like(state)
        out[0] = -1j * (self.pa * state[1] + self.pb * state[2])
        out[1] = -1j * self.ub * state[0]
        out[2] = -1j * self.vg * state[0]
        return out


def rhs_2d(field: WaveField, coeffs: HomogCoefficients, avg: MediumAverages,
           order: int):
    """Time derivative (p_t, u_t, v_t) of the combined system.

    Every derivative, including the mixed dispersive ones, is evaluated
    spectrally.  Intended for direct inspection and tests; :func:`run`
    applies the identical operator in mode space.
    """
    if order not in (0, 2, 4):
        raise ValueError(f"2D right-hand side supports orders (0, 2, 4), got {order}")
    ms = _ModeSpace(field, coeffs, avg, order)
    return ms.inverse(ms.rhs(ms.forward(field)))


def _check_system(system: str, initial: WaveField, order: int) -> None:
    if system not in SYSTEMS:
        raise ValueError(f"system must be one of {SYSTEMS}, got {system!r}")
    if system == "transverse1d" and initial.Ny != 1:
        raise ValueError("transverse1d requires a grid with Ny == 1")
    if system == "normal1d" and initial.Nx != 1:
        raise ValueError("normal1d requires a grid with Nx == 1")
    if order == 6 and system != "transverse1d":
        raise ValueError("order 6 corrections exist only for the transverse system")


def run(system: str, medium: MediumSpec, coeffs: HomogCoefficients,
        params: EffSolverParams, initial: WaveField) -> list:
    """March the chosen homogenized system from ``initial`` to ``t_end``.

    The step size is ``safety * 2.8 / max |omega|`` over all grid modes,
    the RK4 imaginary-axis bound for the per-mode frequencies; segments
    between snapshots use uniform steps that land exactly on snapshot
    times.  Returns ``[initial, snapshot_1, ..., snapshot_n]``.

    Raises
    ------
    RuntimeError
        If a non-finite spectral amplitude appears (instability); the
        diagnostic names the offending mode.
    """
    _check_system(system, initial, params.order)
    duration = params.t_end - initial.t
    if duration <= 0:
        raise ValueError("t_end must exceed the initial time")
    avg = medium_averages(medium)
    ms = _ModeSpace(initial, coeffs, avg, params.order)

    negative = ms.omega2 < 0
    if np.any(negative):
        rate = math.sqrt(-float(ms.omega2.min()))
        warnings.warn(
            f"{int(negative.sum())} grid modes have negative omega^2 "
            f"(truncation ill-posed at short waves; max growth rate {rate:.3g}); "
            "expect exponential growth on long runs",
            UserWarning,
            stacklevel=2,
        )
    omega_max = math.sqrt(float(np.abs(ms.omega2).max()))
    dt_max = (
        params.safety * RK4_IMAGINARY_STABILITY / omega_max
        if omega_max > 0
        else duration
    )

    state = ms.forward(initial)
    series = [initial]
    t = initial.t
    for i in range(1, params.snapshots + 1):
        target = initial.t + duration * i / params.snapshots
        n_steps = max(1, math.ceil((target - t) / dt_max - 1e-12))
        dt = (target - t) / n_steps
        for _ in range(n_steps):
            k1 = ms.rhs(state)
            k2 = ms.rhs(state + (dt / 2) * k1)
            k3 = ms.rhs(state + (dt / 2) * k2)
            k4 = ms.rhs(state + dt * k3)
            state = state + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = target
        bad = ~np.isfinite(state)
        if np.any(bad):
            _, ix, iy = np.argwhere(bad)[0]
            raise RuntimeError(
                f"instability: non-finite spectral amplitude at mode "
                f"(k_x={ms.kx[ix]:.6g}, k_y={ms.ky[iy]:.6g}) by t={t:.6g}; "
                "reduce the safety factor or refine the truncation order"
            )
        p, u, v = ms.inverse(state)
        series.append(WaveField(Lx=initial.Lx, Ly=initial.Ly, p=p, u=u, v=v, t=t))
    return series


def _phi_functions(omega2: float, t: float) -> tuple:
    """Return (sin(wt)/w, (1-cos(wt))/w^2) as analytic functions of w^2.

    Uniformly valid across omega2 positive, negative and zero; the
    omega2 -> 0 limit (where the mode matrix has a repeated eigenvalue
    and is defective) is handled by the series branch, which is exact
    there.
    """
    z = omega2 * t * t
    if abs(z) < 1e-6:
        f1 = 1.0 - z / 6.0 + z * z / 120.0 - z**3 / 5040.0
        f2 = 0.5 - z / 24.0 + z * z / 720.0 - z**3 / 40320.0
        return t * f1, t * t * f2
    if omega2 > 0:
        s = math.sqrt(omega2)
        return math.sin(s * t) / s, (1.0 - math.cos(s * t)) / omega2
    s = math.sqrt(-omega2)
    return math.sinh(s * t) / s, (math.cosh(s * t) - 1.0) / (-omega2)


def exact_mode_propagator(coeffs: HomogCoefficients, avg: MediumAverages,
                          kx: float, ky: float, order: int, t: float) -> np.ndarray:
    """Exact 3x3 evolution map of one Fourier mode over time ``t``.

    The mode matrix M has eigenvalues {0, +i omega, -i omega} and
    satisfies M^3 = -omega^2 M, so

        expm(M t) = I + phi1(omega^2, t) M + phi2(omega^2, t) M^2

    with the phi functions of :func:`_phi_functions`.  This is exact for
    every sign of omega^2, including the defective omega = 0 case.
    Serves as the oracle for :func:`run`.
    """
    s_alpha, s_beta, s_gamma = mode_brackets(coeffs, float(kx), float(ky), order)
    a = float(s_alpha)
    b = float(s_beta)
    g = float(s_gamma)
    M = np.array(
        [
            [0.0, -1j * avg.K_h * a * kx, -1j * avg.K_h * a * ky],
            [-1j * b * kx / avg.rho_h, 0.0, 0.0],
            [-1j * g * ky / avg.rho_m, 0.0, 0.0],
        ],
        dtype=complex,
    )
    omega2 = avg.K_h * a * (kx**2 * b / avg.rho_h + ky**2 * g / avg.rho_m)
    phi1, phi2 = _phi_functions(float(omega2), float(t))
    return np.eye(3, dtype=complex) + phi1 * M + phi2 * (M @ M)


def reconstruct_fast_scale_u(field: WaveField, medium: MediumSpec,
                             include_first_correction: bool = False) -> np.ndarray:
    """Fast-scale horizontal velocity implied by the averaged field.

    The leading-order fast-scale velocity is ``u0 = (rho_h / rho(yhat)) u``
    with ``yhat = y mod 1``; its fast-variable mean is ``u`` again since
    ``rho_h <1/rho> = 1``.  With ``include_first_correction`` the
    next-order term ``(rho_h / rho) C(yhat) u_y`` is added, which needs
    the spectral y-derivative of ``u``.
    """
    yhat = field.y % 1.0
    _, rho, _, _ = medium_sample(medium, yhat)
    avg = medium_averages(medium)
    out = (avg.rho_h / rho)[None, :] * field.u
    if include_first_correction:
        table = solve_fastvars(medium, max_order=1)
        C = table.evaluate("C", yhat)
        u_y = spectral_derivative(field.u, field.Ly, axis=1, order=1)
        out = out + (avg.rho_h * C / rho)[None, :] * u_y
    return out
