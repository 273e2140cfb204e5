"""Finite-volume reference solver for variable-coefficient acoustics.

Second-order wave-propagation scheme (fluctuation form with limited
correction waves) for the first-order system

    p_t + K(y) (u_x + v_y) = 0
    rho(y) u_t + p_x = 0
    rho(y) v_t + p_y = 0

on a periodic Cartesian box.  The medium varies only in y, so x-sweeps
see constant coefficients along every row while y-sweeps solve genuine
material-interface Riemann problems with the cell impedances on either
side.  Materials are sampled at cell centers; for piecewise media the
grid resolution is restricted so every layer interface falls on a cell
edge, which keeps the per-interface Riemann solution exact instead of
smearing the material by O(1).

Dimension splitting alternates the sweep order between consecutive
steps (x-then-y, then y-then-x), which restores second-order splitting
accuracy for smooth solutions without transverse correction terms.
Snapshots are returned in the same immutable ``WaveField`` container
the homogenized solver uses; note that finite-volume values are cell
averages located at centers ``(i + 1/2) dx`` whereas the container's
coordinate convention is ``i dx``, so cross-solver comparisons must
account for the half-cell offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .effsolver import WaveField
from .medium import MediumSpec
from .medium import sample as medium_sample

__all__ = [
    "LIMITERS",
    "FVGrid",
    "Profile1D",
    "build_grid",
    "riemann_acoustics",
    "step_fv",
    "run_fv",
    "y_average",
    "acoustic_energy",
]


def _mc(theta):
    return np.maximum(0.0, np.minimum(np.minimum(0.5 * (1.0 + theta), 2.0), 2.0 * theta))


def _minmod(theta):
    return np.maximum(0.0, np.minimum(1.0, theta))


def _superbee(theta):
    return np.maximum(0.0, np.maximum(np.minimum(1.0, 2.0 * theta), np.minimum(2.0, theta)))


#: Flux limiters phi(theta); "mc" is the default used by the runs.
LIMITERS = {"mc": _mc, "minmod": _minmod, "superbee": _superbee}


@dataclass(frozen=True, eq=False)
class FVGrid:
    """Cell-averaged state and per-cell materials on a periodic box.

    The medium varies only in y, so the material arrays ``K`` and
    ``rho`` are one-dimensional over the y-cells and shared by every
    x-column; impedance ``Z`` and sound speed ``c`` derive from them.
    State arrays are indexed ``[ix, iy]`` with cell centers at
    ``(i + 1/2) dx`` and ``(j + 1/2) dy``.  Use :func:`build_grid` to
    construct grids whose cell edges line up with layer interfaces.
    """

    Lx: float
    Ly: float
    K: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("K", "rho", "p", "u", "v"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError("domain extents must be positive")
        if self.K.ndim != 1 or self.K.shape != self.rho.shape:
            raise ValueError("K and rho must be 1D arrays of one common length")
        if not (np.all(np.isfinite(self.K)) and np.all(np.isfinite(self.rho))):
            raise ValueError("material arrays must be finite")
        if np.any(self.K <= 0.0) or np.any(self.rho <= 0.0):
            raise ValueError("K and rho must be positive in every cell")
        if self.p.ndim != 2 or self.p.shape != self.u.shape or self.p.shape != self.v.shape:
            raise ValueError("p, u, v must be 2D arrays of one common shape")
        if self.p.shape[1] != self.K.size:
            raise ValueError(
                f"state has {self.p.shape[1]} y-cells but materials have {self.K.size}"
            )
        for name in ("p", "u", "v"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"field {name} contains non-finite values")

    @property
    def mx(self) -> int:
        return self.p.shape[0]

    @property
    def my(self) -> int:
        return self.p.shape[1]

    @property
    def dx(self) -> float:
        return self.Lx / self.mx

    @property
    def dy(self) -> float:
        return self.Ly / self.my

    @property
    def x(self) -> np.ndarray:
        """Cell-center x coordinates."""
        return (np.arange(self.mx) + 0.5) * self.dx

    @property
    def y(self) -> np.ndarray:
        """Cell-center y coordinates."""
        return (np.arange(self.my) + 0.5) * self.dy

    @property
    def Z(self) -> np.ndarray:
        """Per-cell impedance sqrt(K rho)."""
        return np.sqrt(self.K * self.rho)

    @property
    def c(self) -> np.ndarray:
        """Per-cell sound speed sqrt(K / rho)."""
        return np.sqrt(self.K / self.rho)


class Profile1D(NamedTuple):
    """y-averaged line profile: x locations with mean p and u."""

    x: np.ndarray
    p: np.ndarray
    u: np.ndarray


def _evaluate_initial(values, X, Y, name):
    if values is None:
        return np.zeros(X.shape)
    if callable(values):
        values = values(X, Y)
    arr = np.asarray(values, dtype=float)
    if arr.shape != X.shape:
        raise ValueError(f"initial {name} shape {arr.shape} does not match grid {X.shape}")
    return arr


def build_grid(medium: MediumSpec, Lx: float, Ly: float, resolution: int,
               mx: int | None = None, pressure=None, velocities=None,
               t: float = 0.0) -> FVGrid:
    """Construct a grid with materials sampled at cell centers.

    Parameters
    ----------
    medium : MediumSpec
    Lx, Ly : float
        Box extents; ``Ly`` must span a whole number of periods.
    resolution : int
        Cells per period in y (the period is 1).  Must be an even
        integer >= 8; piecewise media additionally require a multiple
        of 4 so the band interfaces at quarter-period offsets land on
        cell edges.
    mx : int, optional
        x-cell count, defaulting to ``Lx * resolution`` (square cells).
        The medium is uniform in x, so any value >= 2 is valid.
    pressure, velocities : optional
        Initial pressure (callable ``f(X, Y)`` on the cell-center
        meshgrid, or an ``(mx, my)`` array) and optionally a pair
        ``(u0, v0)`` in the same formats.  Defaults are zero fields.
    """
    if resolution != int(resolution) or int(resolution) < 8 or int(resolution) % 2:
        raise ValueError(
            f"resolution must be an even integer >= 8 cells per period, got {resolution}"
        )
    resolution = int(resolution)
    if medium.kind == "piecewise" and resolution % 4:
        raise ValueError(
            "piecewise media need a resolution divisible by 4 so band "
            "interfaces fall on cell edges"
        )
    periods = round(Ly)
    if periods < 1 or abs(Ly - periods) > 1e-12:
        raise ValueError(f"Ly must span a whole positive number of periods, got {Ly}")
    my = periods * resolution
    if mx is None:
        mxf = Lx * resolution
        mx = round(mxf)
        if mx < 2 or abs(mxf - mx) > 1e-9:
            raise ValueError(
                f"Lx = {Lx} is not a positive multiple of the cell size 1/{resolution}; "
                "pass mx explicitly for a non-square grid"
            )
    elif mx != int(mx) or int(mx) < 2:
        raise ValueError(f"mx must be an integer >= 2, got {mx}")
    mx = int(mx)

    x = (np.arange(mx) + 0.5) * (Lx / mx)
    y = (np.arange(my) + 0.5) * (Ly / my)
    K, rho, _, _ = medium_sample(medium, y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    p = _evaluate_initial(pressure, X, Y, "pressure")
    u0, v0 = velocities if velocities is not None else (None, None)
    u = _evaluate_initial(u0, X, Y, "u")
    v = _evaluate_initial(v0, X, Y, "v")
    return FVGrid(Lx=float(Lx), Ly=float(Ly), K=K, rho=rho, p=p, u=u, v=v, t=t)


def _wave_strengths(dp, dun, Z_l, Z_r):
    # Jump decomposition onto the left-going (-Z_l, 1) and right-going
    # (Z_r, 1) eigenvectors in (p, normal-velocity) space.
    denom = Z_l + Z_r
    a1 = (-dp + Z_r * dun) / denom
    a2 = (dp + Z_l * dun) / denom
    return a1, a2


def riemann_acoustics(q_left, q_right, Z_l, Z_r, c_l, c_r, normal_axis):
    """Solve the acoustics Riemann problem at a material interface.

    Parameters
    ----------
    q_left, q_right : array_like, shape (..., 3)
        States ``(p, u, v)`` on either side; leading axes broadcast.
    Z_l, Z_r, c_l, c_r : array_like
        Impedances and sound speeds of the left/right materials.
    normal_axis : {0, 1}
        Sweep direction: 0 couples p with u, 1 couples p with v.  The
        tangential velocity jump is a zero-speed contact and produces
        no fluctuation.

    Returns
    -------
    waves : ndarray, shape (2, ..., 3)
        Left-going wave ``alpha_1 (-Z_l, 1)`` and right-going wave
        ``alpha_2 (Z_r, 1)`` embedded in (p, u, v) space.
    speeds : ndarray, shape (2, ...)
        ``(-c_l, +c_r)``.
    fluctuations : (ndarray, ndarray)
        Left-going and right-going fluctuations ``speed * wave``, the
        A-minus / A-plus contributions of the wave-propagation update.
    """
    if normal_axis not in (0, 1):
        raise ValueError(f"normal_axis must be 0 or 1, got {normal_axis}")
    q_left = np.asarray(q_left, dtype=float)
    q_right = np.asarray(q_right, dtype=float)
    Z_l, Z_r, c_l, c_r = (np.asarray(m, dtype=float) for m in (Z_l, Z_r, c_l, c_r))
    for name, m in (("Z_l", Z_l), ("Z_r", Z_r), ("c_l", c_l), ("c_r", c_r)):
        if np.any(m <= 0.0) or not np.all(np.isfinite(m)):
            raise ValueError(f"{name} must be positive and finite")
    comp = normal_axis + 1
    dq = q_right - q_left
    a1, a2 = _wave_strengths(dq[..., 0], dq[..., comp], Z_l, Z_r)
    shape = np.broadcast_shapes(a1.shape, Z_l.shape, c_l.shape)
    waves = np.zeros((2,) + shape + (3,))
    waves[0, ..., 0] = -Z_l * a1
    waves[0, ..., comp] = a1
    waves[1, ..., 0] = Z_r * a2
    waves[1, ..., comp] = a2
    speeds = np.stack(
        [np.broadcast_to(-c_l, shape), np.broadcast_to(c_r, shape)]
    ).astype(float)
    amdq = speeds[0][..., None] * waves[0]
    apdq = speeds[1][..., None] * waves[1]
    return waves, speeds, (amdq, apdq)


def _wave_ratio(wp, wu, shift, axis):
    # Projection of the upwind-neighbor wave onto this interface's wave;
    # a vanishing wave gets theta = 0, which every limiter maps to 0.
    num = np.roll(wp, shift, axis) * wp + np.roll(wu, shift, axis) * wu
    den = wp * wp + wu * wu
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0.0)


def _sweep(p, un, Z_l, Z_r, c_l, c_r, spacing, dt, axis, phi):
    """One limited wave-propagation sweep along ``axis``.

    ``un`` is the velocity component normal to the sweep; the material
    arrays broadcast against the grid and are indexed so that interface
    arrays live at the cell to their right (interface i separates cells
    i-1 and i, periodically).
    """
    coef = dt / spacing
    dp = p - np.roll(p, 1, axis)
    dun = un - np.roll(un, 1, axis)
    a1, a2 = _wave_strengths(dp, dun, Z_l, Z_r)
    w1p = -Z_l * a1
    w1u = a1
    w2p = Z_r * a2
    w2u = a2
    # First-order fluctuation update: cell i absorbs the right-going
    # fluctuation of its left interface and the left-going one of its
    # right interface (speeds -c_l and +c_r).
    p_new = p - coef * (c_r * w2p - np.roll(c_l * w1p, -1, axis))
    un_new = un - coef * (c_r * w2u - np.roll(c_l * w1u, -1, axis))
    # Limited second-order corrections, flux-difference form.  Upwind
    # comparison: the left-going wave looks right (+1 cell), the
    # right-going wave looks left (-1 cell).
    lim1 = phi(_wave_ratio(w1p, w1u, -1, axis))
    lim2 = phi(_wave_ratio(w2p, w2u, +1, axis))
    g1 = 0.5 * c_l * (1.0 - coef * c_l) * lim1
    g2 = 0.5 * c_r * (1.0 - coef * c_r) * lim2
    f_p = g1 * w1p + g2 * w2p
    f_u = g1 * w1u + g2 * w2u
    p_new -= coef * (np.roll(f_p, -1, axis) - f_p)
    un_new -= coef * (np.roll(f_u, -1, axis) - f_u)
    return p_new, un_new


def _step_arrays(p, u, v, Z, c, dx, dy, dt, first_axis, phi):
    Z_row = Z[None, :]
    c_row = c[None, :]
    Z_up = np.roll(Z, 1)[None, :]
    c_up = np.roll(c, 1)[None, :]
    for axis in (first_axis, 1 - first_axis):
        if axis == 0:
            # Materials do not vary along x: both interface sides match.
            p, u = _sweep(p, u, Z_row, Z_row, c_row, c_row, dx, dt, 0, phi)
        else:
            p, v = _sweep(p, v, Z_up, Z_row, c_up, c_row, dy, dt, 1, phi)
    return p, u, v


def _validate_controls(cfl: float, limiter: str) -> None:
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    if limiter not in LIMITERS:
        raise ValueError(f"unknown limiter {limiter!r}; choose from {sorted(LIMITERS)}")


def step_fv(grid: FVGrid, cfl: float = 0.9, limiter: str = "mc",
            first_axis: int = 0, dt: float | None = None) -> FVGrid:
    """Advance the grid one time step; returns a new grid at ``t + dt``.

    ``dt`` defaults to ``cfl * min(dx, dy) / max(c)``.  ``first_axis``
    picks which sweep runs first; alternate it between consecutive
    steps for second-order splitting accuracy.

    Raises
    ------
    RuntimeError
        If the step produces non-finite values (e.g. when driven with
        an externally supplied unstable ``dt``).
    """
    _validate_controls(cfl, limiter)
    if first_axis not in (0, 1):
        raise ValueError(f"first_axis must be 0 or 1, got {first_axis}")
    Z, c = grid.Z, grid.c
    if dt is None:
        dt = cfl * min(grid.dx, grid.dy) / float(c.max())
    p, u, v = _step_arrays(
        grid.p, grid.u, grid.v, Z, c, grid.dx, grid.dy, dt, first_axis,
        LIMITERS[limiter],
    )
    t_new = grid.t + dt
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise RuntimeError(
            f"finite-volume step produced non-finite values by t={t_new:.6g}; "
            "the time step exceeds the stable CFL limit"
        )
    return FVGrid(Lx=grid.Lx, Ly=grid.Ly, K=grid.K, rho=grid.rho,
                  p=p, u=u, v=v, t=t_new)


def run_fv(medium: MediumSpec, pressure, domain, t_end: float,
           resolution: int = 32, cfl: float = 0.9, snapshots: int = 1,
           limiter: str = "mc", mx: int | None = None,
           velocities=None) -> list:
    """Evolve the variable-coefficient system, emitting WaveField snapshots.

    Parameters
    ----------
    medium : MediumSpec
    pressure : callable or ndarray
        Initial pressure at the cell centers; velocities start at zero
        unless ``velocities=(u0, v0)`` is given.
    domain : (float, float)
        Box extents ``(Lx, Ly)``; ``Ly`` spans whole periods.
    t_end : float
        Final time; ``snapshots`` equally spaced outputs are produced.
    resolution : int
        Cells per period (see :func:`build_grid`).

    Returns
    -------
    list of WaveField
        ``[initial, snapshot_1, ..., snapshot_n]``.  Cell counts must
        be powers of two because the snapshot container is shared with
        the pseudospectral solver; values are cell averages at centers
        ``(i + 1/2) dx``, half a cell off the container's nominal
        coordinates.
    """
    _validate_controls(cfl, limiter)
    if snapshots < 1:
        raise ValueError("snapshots must be >= 1")
    Lx, Ly = domain
    grid = build_grid(medium, Lx, Ly, resolution, mx=mx, pressure=pressure,
                      velocities=velocities)
    if grid.mx & (grid.mx - 1) or grid.my & (grid.my - 1):
        raise ValueError(
            f"snapshot container requires power-of-two cell counts, got "
            f"{grid.mx} x {grid.my}; adjust the domain or resolution"
        )
    if t_end <= grid.t:
        raise ValueError("t_end must exceed the initial time")

    phi = LIMITERS[limiter]
    Z, c = grid.Z, grid.c
    dx, dy = grid.dx, grid.dy
    dt_max = cfl * min(dx, dy) / float(c.max())
    p, u, v = grid.p, grid.u, grid.v
    series = [WaveField(Lx=grid.Lx, Ly=grid.Ly, p=p, u=u, v=v, t=grid.t)]
    t = grid.t
    step_count = 0
    for i in range(1, snapshots + 1):
        target = grid.t + (t_end - grid.t) * i / snapshots
        n_steps = max(1, math.ceil((target - t) / dt_max - 1e-12))
        dt = (target - t) / n_steps
        for _ in range(n_steps):
            p, u, v = _step_arrays(p, u, v, Z, c, dx, dy, dt,
                                   step_count % 2, phi)
            step_count += 1
        t = target
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(u))
                and np.all(np.isfinite(v))):
            raise RuntimeError(
                f"finite-volume instability: non-finite values by t={t:.6g}; "
                "reduce the CFL number"
            )
        series.append(WaveField(Lx=grid.Lx, Ly=grid.Ly, p=p, u=u, v=v, t=t))
    return series


def y_average(field: WaveField) -> Profile1D:
    """Arithmetic mean of p and u over all y-cells, per x-column."""
    return Profile1D(field.x, field.p.mean(axis=1), field.u.mean(axis=1))


def acoustic_energy(grid: FVGrid) -> float:
    """Discrete energy: sum over cells of (p^2/(2K) + rho (u^2+v^2)/2) dV.

    Non-increasing under the limited scheme (upwind dissipation) and
    conserved to a fraction of a percent on resolved smooth runs.
    """
    K = grid.K[None, :]
    rho = grid.rho[None, :]
    cell = grid.dx * grid.dy
    return cell * float(
        np.sum(grid.p**2 / (2.0 * K) + 0.5 * rho * (grid.u**2 + grid.v**2))
    )
