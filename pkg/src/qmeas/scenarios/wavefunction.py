"""Direct reconstruction of a discrete wave function from weak values.

With post-selection on zero momentum, ``|p=0> = (1, ..., 1)/sqrt(d)``, the
weak value of the position projector is ``(Pi_x)_w = psi(x) / sum(psi)``,
proportional to the wave function itself.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ancilla import MeterModel, build_from_hamiltonian
from ..qcore import KET0, SIGMA_X, SIGMA_Y, ZeroProbabilityError, check_ket, density, \
    normalize, projector
from ..weakpost import postselect_meter


def zero_momentum_state(d: int) -> np.ndarray:
    """Zero-frequency column of the unitary DFT."""
    return np.ones(d, dtype=complex) / np.sqrt(d)


def fix_global_phase(psi: np.ndarray) -> np.ndarray:
    """Rotate so that the largest-magnitude component is real and positive."""
    k = int(np.argmax(np.abs(psi)))
    return psi * np.exp(-1j * np.angle(psi[k]))


@dataclass(frozen=True)
class Reconstruction:
    weak_values: np.ndarray
    amplitudes: np.ndarray     # normalized, phase-fixed
    fidelity: float            # |<psi_rec|psi>|
    coupling: float | None     # None for the exact path


def exact_weak_values(psi, floor: float = 1e-12) -> np.ndarray:
    psi = check_ket(psi, name="wave function")
    f = zero_momentum_state(psi.size)
    fs = np.vdot(f, psi)
    if abs(fs) <= floor:
        raise ZeroProbabilityError("wave function has no zero-momentum component")
    return np.conj(f) * psi / fs


def pointer_weak_value(psi, x: int, g: float) -> complex:
    """Estimate ``(Pi_x)_w`` from a qubit pointer coupled by ``exp(-i g Pi_x (x) sigma_x)``.

    After post-selecting ``|p=0>`` the meter reads
    ``<sigma_x> ~ 2 g Im W`` and ``<sigma_y> ~ -2 g Re W``.
    """
    psi = check_ket(psi, name="wave function")
    d = psi.size
    e = np.zeros(d, dtype=complex)
    e[x] = 1.0
    pm = build_from_hamiltonian(projector(e), MeterModel(KET0), SIGMA_X, g)
    mu, _ = postselect_meter(pm, density(psi), zero_momentum_state(d))
    sx = np.real(np.trace(SIGMA_X @ mu))
    sy = np.real(np.trace(SIGMA_Y @ mu))
    return complex(-sy, sx) / (2.0 * g)


def reconstruct_wavefunction(psi, g: float | None = None, floor: float = 1e-12) -> Reconstruction:
    """Reconstruct ``psi`` from ``(Pi_x)_w``; exact when ``g`` is None, else
    simulated with a weakly coupled qubit pointer per grid point."""
    psi = check_ket(psi, name="wave function")
    exact_weak_values(psi, floor)          # validates the zero-momentum overlap
    if g is None:
        w = exact_weak_values(psi, floor)
    else:
        w = np.array([pointer_weak_value(psi, x, g) for x in range(psi.size)])
    # (Pi_x)_w is proportional to conj(<p=0|x>) psi(x); the DFT column is uniform
    rec = fix_global_phase(normalize(w))
    return Reconstruction(w, rec, float(abs(np.vdot(rec, psi))), g)
