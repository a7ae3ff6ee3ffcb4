"""Average trajectories behind a double slit from the weak velocity field.

The transverse wave function evolves freely along the propagation axis
``z`` (mass 1, hbar 1) by exact split-step in Fourier space. The weak value
of momentum conditioned on position gives the velocity
``v(x) = Re(<x|P|psi> / <x|psi>)``, which is integrated with RK4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore import NumericalContractError


class TrajectoryEscapeError(ValueError):
    """A trajectory or the wave itself reached the edge of the transverse grid."""


@dataclass(frozen=True)
class SlitGeometry:
    separation: float = 10.0     # distance between slit centres
    width: float = 1.0           # std of each packet's |psi|^2
    n: int = 512
    half_range: float = 160.0
    z_final: float = 40.0
    z_steps: int = 200
    two_slits: bool = True

    @property
    def x(self) -> np.ndarray:
        dx = 2 * self.half_range / self.n
        return (np.arange(self.n) - self.n // 2) * dx

    @property
    def p(self) -> np.ndarray:
        dx = 2 * self.half_range / self.n
        return 2 * np.pi * (np.arange(self.n) - self.n // 2) / (self.n * dx)


def _fft(psi):
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(psi), norm="ortho"))


def _ifft(phi):
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(phi), norm="ortho"))


def initial_wave(geo: SlitGeometry) -> np.ndarray:
    x = geo.x
    centers = (-geo.separation / 2, geo.separation / 2) if geo.two_slits else (0.0,)
    psi = sum(np.exp(-((x - c) ** 2) / (4 * geo.width**2)) for c in centers).astype(complex)
    return psi / np.linalg.norm(psi)


def propagate(psi: np.ndarray, geo: SlitGeometry, dz: float) -> np.ndarray:
    return _ifft(np.exp(-0.5j * geo.p**2 * dz) * _fft(psi))


def velocity_field(psi: np.ndarray, geo: SlitGeometry) -> np.ndarray:
    """``Re((P psi)(x) / psi(x))`` on the grid (``P`` applied spectrally)."""
    ppsi = _ifft(geo.p * _fft(psi))
    rho = np.abs(psi) ** 2
    current = np.real(np.conj(psi) * ppsi)
    # zero where the wave has underflowed; no trajectory goes there
    return np.divide(current, rho, out=np.zeros_like(current), where=rho > 1e-300)


@dataclass(frozen=True)
class TrajectorySet:
    z: np.ndarray                # (z_steps + 1,)
    x: np.ndarray                # (z_steps + 1, n_traj)
    final_density: np.ndarray    # |psi(x, z_final)|^2 / dx
    grid: np.ndarray
    geometry: SlitGeometry

    def rows(self):
        """Long-format ``(trajectory, z, x)`` rows."""
        for k in range(self.x.shape[1]):
            for i, z in enumerate(self.z):
                yield k, float(z), float(self.x[i, k])


def starting_positions(psi: np.ndarray, geo: SlitGeometry, n_traj: int) -> np.ndarray:
    """Quantiles ``(k + 1/2) / n_traj`` of ``|psi|^2`` so each path carries equal weight."""
    w = np.abs(psi) ** 2
    cdf = np.cumsum(w) - 0.5 * w
    cdf /= cdf[-1] + 0.5 * w[-1]
    return np.interp((np.arange(n_traj) + 0.5) / n_traj, cdf, geo.x)


def two_slit_trajectories(geo: SlitGeometry | None = None, n_traj: int = 400,
                          edge_tol: float = 1e-8) -> TrajectorySet:
    """Integrate ``dx/dz = v(x, z)`` for a fan of starting points.

    Ordering of the trajectories is checked after every step and a violation
    raises :class:`NumericalContractError`; leaving the inner 90% of the grid
    or wave amplitude reaching the grid edge raises
    :class:`TrajectoryEscapeError`.
    """
    geo = SlitGeometry() if geo is None else geo
    x_grid = geo.x
    dz = geo.z_final / geo.z_steps
    psi = initial_wave(geo)
    xs = np.empty((geo.z_steps + 1, n_traj))
    xs[0] = starting_positions(psi, geo, n_traj)
    limit = 0.9 * geo.half_range
    edge = max(4, geo.n // 32)

    def v_at(field, pos):
        return np.interp(pos, x_grid, field)

    for i in range(geo.z_steps):
        psi_half = propagate(psi, geo, dz / 2)
        psi_next = propagate(psi_half, geo, dz / 2)
        v0, vh, v1 = (velocity_field(w, geo) for w in (psi, psi_half, psi_next))
        x0 = xs[i]
        k1 = v_at(v0, x0)
        k2 = v_at(vh, x0 + 0.5 * dz * k1)
        k3 = v_at(vh, x0 + 0.5 * dz * k2)
        k4 = v_at(v1, x0 + dz * k3)
        xs[i + 1] = x0 + dz * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        psi = psi_next
        if np.any(np.abs(xs[i + 1]) > limit):
            raise TrajectoryEscapeError(f"trajectory left the grid at z = {(i + 1) * dz:.4g}")
        if max(np.max(np.abs(psi[:edge]) ** 2), np.max(np.abs(psi[-edge:]) ** 2)) > edge_tol:
            raise TrajectoryEscapeError(f"wave reached the grid edge at z = {(i + 1) * dz:.4g}")
        if np.any(np.diff(xs[i + 1]) <= 0):
            raise NumericalContractError(f"trajectories crossed at z = {(i + 1) * dz:.4g}")
    dx = x_grid[1] - x_grid[0]
    z = np.linspace(0.0, geo.z_final, geo.z_steps + 1)
    return TrajectorySet(z, xs, np.abs(psi) ** 2 / dx, x_grid, geo)


def density_correlation(ts: TrajectorySet, n_bins: int = 60) -> float:
    """Pearson correlation between the final trajectory histogram and ``|psi|^2``
    averaged over the same bins."""
    lo, hi = ts.x[-1].min(), ts.x[-1].max()
    pad = 0.05 * (hi - lo)
    edges = np.linspace(lo - pad, hi + pad, n_bins + 1)
    hist, _ = np.histogram(ts.x[-1], bins=edges, density=True)
    idx = np.digitize(ts.grid, edges) - 1
    dens = np.array([ts.final_density[idx == b].mean() if np.any(idx == b) else 0.0
                     for b in range(n_bins)])
    return float(np.corrcoef(hist, dens)[0, 1])


def count_fringes(ts: TrajectorySet, rel_height: float = 1e-3) -> int:
    """Local maxima of the final ``|psi|^2`` above ``rel_height`` of the peak."""
    d = ts.final_density
    inner = (d[1:-1] > d[:-2]) & (d[1:-1] > d[2:]) & (d[1:-1] > rel_height * d.max())
    return int(np.count_nonzero(inner))
