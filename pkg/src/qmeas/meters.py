"""Concrete meters: a grid-discretized Gaussian pointer and a qubit meter.

Grid kets carry the quadrature weight, ``c_j = phi(q_j) * sqrt(dq)``, so that
ordinary vector norms and inner products approximate the continuum ones.
The grid is ``q_j = (j - n/2) dq`` with ``dq = 2L/n``; the momentum grid is
the fftshift-centred ``p_k = 2 pi (k - n/2) / (n dq)``, so both contain 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .ancilla import MeterModel, PreMeasurement, build_from_markers
from .qcore import KET0, KET1, as_observable, dag, kron


class GridOverflowError(ValueError):
    """A shifted pointer packet does not fit on the grid."""


@dataclass(frozen=True, eq=False)
class GaussianPointer:
    """von Neumann pointer with ``|phi0(q)|^2`` a centred Gaussian of variance ``width**2``.

    ``coupling`` is the effective coupling ``g``: eigenvalue ``s`` moves the
    pointer to ``q = g s``.
    """

    width: float
    coupling: float
    half_range: float
    n: int = 1024

    def __post_init__(self):
        if self.width <= 0 or self.half_range <= 0 or self.n < 8:
            raise ValueError("width, half_range must be positive and n >= 8")
        if self.n % 2:
            raise ValueError("n must be even so that q = 0 and p = 0 lie on the grid")

    @classmethod
    def default(cls, width: float, coupling: float, max_abs_eigenvalue: float = 1.0,
                n: int = 1024) -> "GaussianPointer":
        """Grid with ``L = 10 width + 10 |g| max|s|``."""
        half = 10.0 * width + 10.0 * abs(coupling) * max_abs_eigenvalue
        return cls(width, coupling, half, n)

    @cached_property
    def dq(self) -> float:
        return 2.0 * self.half_range / self.n

    @cached_property
    def q(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dq

    @cached_property
    def p(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.n) - self.n // 2) / (self.n * self.dq)

    def wavefunction(self, center: float = 0.0) -> np.ndarray:
        """Grid ket of ``phi0(q - center)``."""
        amp = (2.0 * np.pi * self.width**2) ** -0.25 * np.exp(-((self.q - center) ** 2)
                                                              / (4.0 * self.width**2))
        return (amp * np.sqrt(self.dq)).astype(complex)

    @cached_property
    def phi0(self) -> np.ndarray:
        return self.wavefunction(0.0)

    def to_momentum(self, psi: np.ndarray, axis: int = 0) -> np.ndarray:
        """Unitary DFT onto the centred momentum grid."""
        shifted = np.fft.ifftshift(psi, axes=axis)
        return np.fft.fftshift(np.fft.fft(shifted, axis=axis, norm="ortho"), axes=axis)

    def from_momentum(self, phi: np.ndarray, axis: int = 0) -> np.ndarray:
        shifted = np.fft.ifftshift(phi, axes=axis)
        return np.fft.fftshift(np.fft.ifft(shifted, axis=axis, norm="ortho"), axes=axis)

    def translate(self, psi: np.ndarray, lam: float) -> np.ndarray:
        """``exp(i lam P) psi``, i.e. ``psi(q + lam)``, by a momentum-space phase."""
        return self.from_momentum(np.exp(1j * lam * self.p) * self.to_momentum(psi))

    @cached_property
    def momentum_operator(self) -> np.ndarray:
        """Dense ``P`` on the grid, ``F^dag diag(p) F``."""
        f = self.to_momentum(np.eye(self.n, dtype=complex))
        return dag(f) @ (self.p[:, None] * f)

    @cached_property
    def position_operator(self) -> np.ndarray:
        return np.diag(self.q).astype(complex)

    def meter_model(self) -> MeterModel:
        return MeterModel(self.phi0, pointer_basis=None, pointer_values=self.q)

    def required_half_range(self, shift: float) -> float:
        return abs(shift) + 5.0 * self.width


def pointer_shift(meter: GaussianPointer, s_i: float) -> np.ndarray:
    """Grid ket of ``phi0(q - g s_i)``."""
    shift = meter.coupling * s_i
    need = meter.required_half_range(shift)
    if need >= meter.half_range:
        raise GridOverflowError(
            f"shifted packet leaves the grid: need L > {need:.6g}, have L = {meter.half_range:.6g}")
    return meter.wavefunction(shift)


def von_neumann_premeasurement(meter: GaussianPointer, obs,
                               method: str = "markers") -> PreMeasurement:
    """Pre-measurement of ``U = exp(-i g S (x) P)`` on the pointer grid.

    ``method="markers"`` samples the shifted Gaussians directly;
    ``method="momentum"`` applies the phase ``exp(-i g s_i p)`` in momentum
    space, i.e. the Hamiltonian form of the same unitary.
    """
    obs = as_observable(obs)
    if method == "markers":
        markers = [pointer_shift(meter, s) for s in obs.basis_values]
    elif method == "momentum":
        for s in obs.basis_values:
            pointer_shift(meter, s)  # grid check only
        phi_p = meter.to_momentum(meter.phi0)
        markers = [meter.from_momentum(np.exp(-1j * meter.coupling * s * meter.p) * phi_p)
                   for s in obs.basis_values]
    else:
        raise ValueError(f"unknown method {method!r}")
    return build_from_markers(obs.dim, meter.meter_model(), markers, basis=obs.basis)


class PointerMoments(NamedTuple):
    q: float
    q2: float
    p: float
    p2: float
    qp_anti: float  # <{Q, P}>

    @property
    def q_var(self) -> float:
        return self.q2 - self.q**2

    @property
    def p_var(self) -> float:
        return self.p2 - self.p**2


def pointer_moments(meter: GaussianPointer, mu) -> PointerMoments:
    """Position and momentum moments of a grid ket (1-D) or grid density (2-D)."""
    mu = np.asarray(mu, dtype=complex)
    q, p = meter.q, meter.p
    if mu.ndim == 1:
        psi = mu
        norm = np.vdot(psi, psi).real
        phi = meter.to_momentum(psi)
        ppsi = meter.from_momentum(p * phi)
        wq = np.abs(psi) ** 2 / norm
        wp = np.abs(phi) ** 2 / norm
        qp = np.vdot(q * psi, ppsi) / norm  # <Q P>
    else:
        norm = np.trace(mu).real
        wq = np.real(np.diag(mu)) / norm
        fm = meter.to_momentum(mu, axis=0)                       # F mu
        fmf = np.conj(meter.to_momentum(np.conj(fm).T, axis=0)).T  # F mu F^dag
        wp = np.real(np.diag(fmf)) / norm
        pmu = meter.from_momentum(p[:, None] * fm, axis=0)       # P mu
        qp = np.sum(q * np.diag(pmu)) / norm                     # Tr(Q P mu)
    return PointerMoments(
        q=float(np.sum(q * wq)),
        q2=float(np.sum(q**2 * wq)),
        p=float(np.sum(p * wp)),
        p2=float(np.sum(p**2 * wp)),
        qp_anti=float(2.0 * np.real(qp)),
    )


@dataclass(frozen=True)
class QubitMeter:
    """Double-qubit meter: ``|m0> = cos(theta/2)|0> + sin(theta/2)|1>``.

    ``theta = 0`` is a strong (projective) measurement, ``theta = pi/2`` no
    measurement at all.
    """

    theta: float

    def markers(self) -> tuple[np.ndarray, np.ndarray]:
        return qubit_meter_markers(self)

    def meter_model(self) -> MeterModel:
        return MeterModel(self.markers()[0], pointer_values=np.array([1.0, -1.0]))

    def premeasurement(self, **kwargs) -> PreMeasurement:
        """Markers for the system basis ``|0>`` (s=+1), ``|1>`` (s=-1)."""
        return build_from_markers(2, self.meter_model(), list(self.markers()), **kwargs)

    def overlap(self) -> float:
        a, b = self.markers()
        return float(np.real(np.vdot(a, b)))


def qubit_meter_markers(m: QubitMeter) -> tuple[np.ndarray, np.ndarray]:
    c, s = np.cos(m.theta / 2), np.sin(m.theta / 2)
    return c * KET0 + s * KET1, s * KET0 + c * KET1


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def cnot_images(m: QubitMeter) -> np.ndarray:
    """``CNOT (1 (x) |m0>)`` for comparison with the marker construction."""
    return CNOT @ kron(np.eye(2), m.markers()[0].reshape(2, 1))
