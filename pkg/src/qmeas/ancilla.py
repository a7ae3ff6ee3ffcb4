"""Indirect (ancilla) measurements.

A pre-measurement couples the system to a meter prepared in ``|m0>`` so that
``U (|s_i> (x) |m0>) = |s_i> (x) |m^(i)>``. Everything observable depends only
on the *images* ``U (1 (x) |m0>)``, a ``(d_S * d_M) x d_S`` isometry, which is
what :class:`PreMeasurement` stores. The full unitary is completed lazily
when asked for.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .qcore import (
    DimensionError,
    Numerics,
    Observable,
    ZeroProbabilityError,
    _num,
    as_observable,
    as_square,
    check_ket,
    dag,
    hermitian_part,
    is_hermitian,
    is_unitary,
    kron,
    matexp_hermitian,
    maxabs,
    random_unitary,
)


@dataclass(frozen=True, eq=False)
class MeterModel:
    """Meter initial state and pointer basis.

    ``pointer_basis`` holds the pointer states ``|m_k>`` as columns; ``None``
    means the computational basis, which avoids storing a large identity for
    grid meters. ``pointer_values`` are the readings ``m_k`` (defaults to
    ``0..d_M-1``).
    """

    initial: np.ndarray
    pointer_basis: np.ndarray | None = None
    pointer_values: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "initial", check_ket(self.initial, name="meter initial state"))
        if self.pointer_basis is not None:
            b = as_square(self.pointer_basis, "pointer basis")
            if b.shape[0] != self.dim or not is_unitary(b, 1e-10):
                raise ValueError("pointer basis must be a complete orthonormal set")
            object.__setattr__(self, "pointer_basis", b)

    @property
    def dim(self) -> int:
        return self.initial.size

    def pointer_state(self, k: int) -> np.ndarray:
        if self.pointer_basis is None:
            e = np.zeros(self.dim, dtype=complex)
            e[k] = 1.0
            return e
        return self.pointer_basis[:, k]

    def values(self) -> np.ndarray:
        if self.pointer_values is None:
            return np.arange(self.dim, dtype=float)
        return np.asarray(self.pointer_values, dtype=float)

    def pointer_observable(self) -> Observable:
        b = np.eye(self.dim, dtype=complex) if self.pointer_basis is None else self.pointer_basis
        return Observable.from_spectrum(self.values(), b)


@dataclass(frozen=True, eq=False)
class PreMeasurement:
    """Entangling step of an ancilla measurement.

    Attributes
    ----------
    meter : MeterModel
    basis : (d_S, d_S) array
        System eigenbasis ``|s_i>`` as columns.
    markers : (d_S, d_M) array
        Row ``i`` is the marker state ``|m^(i)>``.
    explicit_unitary : array or None
        Set when the pre-measurement was built from a Hamiltonian.
    """

    meter: MeterModel
    basis: np.ndarray
    markers: np.ndarray
    explicit_unitary: np.ndarray | None = None
    completion_seed: int | None = None

    @property
    def system_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def meter_dim(self) -> int:
        return self.meter.dim

    @property
    def dims(self) -> tuple[int, int]:
        return self.system_dim, self.meter_dim

    @cached_property
    def images(self) -> np.ndarray:
        """``U (1_S (x) |m0>)`` in the computational system basis."""
        d_s, d_m = self.dims
        # sum_i (|s_i> (x) |m^(i)>) <s_i|
        cols = np.einsum("xi,ia->xai", self.basis, self.markers).reshape(d_s * d_m, d_s)
        return cols @ dag(self.basis)

    @cached_property
    def unitary(self) -> np.ndarray:
        if self.explicit_unitary is not None:
            return self.explicit_unitary
        return _complete_unitary(self)

    def marker_overlaps(self) -> np.ndarray:
        """Gram matrix ``G[i, j] = <m^(i)|m^(j)>``."""
        return np.conj(self.markers) @ self.markers.T


def _complete_unitary(pm: PreMeasurement) -> np.ndarray:
    d_s, d_m = pm.dims
    v_in = kron(pm.basis, pm.meter.initial.reshape(d_m, 1))     # |s_i> (x) |m0>
    w_out = pm.images @ pm.basis                                  # |s_i> (x) |m^(i)>
    v_perp = null_space(dag(v_in))
    w_perp = null_space(dag(w_out))
    if pm.completion_seed is not None:
        rot = random_unitary(v_perp.shape[1], np.random.default_rng(pm.completion_seed))
        w_perp = w_perp @ rot
    return w_out @ dag(v_in) + w_perp @ dag(v_perp)


def build_from_markers(system_dim: int, meter: MeterModel, markers: Sequence,
                       basis=None, numerics: Numerics | None = None,
                       completion_seed: int | None = None) -> PreMeasurement:
    """Pre-measurement sending ``|s_i> (x) |m0>`` to ``|s_i> (x) |markers[i]>``.

    The unitary outside the span of the inputs is an arbitrary completion;
    ``completion_seed`` picks a random one (observable results must not
    depend on it).
    """
    tol = _num(numerics)
    b = np.eye(system_dim, dtype=complex) if basis is None else as_square(basis, "basis")
    if b.shape[0] != system_dim or not is_unitary(b, tol.unitary_tol):
        raise ValueError("system basis must be orthonormal and match system_dim")
    m = np.array([np.asarray(x, dtype=complex).ravel() for x in markers])
    if m.shape != (system_dim, meter.dim):
        raise DimensionError(f"need {system_dim} markers of dim {meter.dim}, got {m.shape}")
    for i, row in enumerate(m):
        check_ket(row, tol, name=f"marker {i}")
    pm = PreMeasurement(meter, b, m, completion_seed=completion_seed)
    # images of orthonormal inputs must be orthonormal: rank check
    gram = dag(pm.images) @ pm.images
    if maxabs(gram - np.eye(system_dim)) > tol.unitary_tol:
        raise ValueError("markers do not admit a unitary completion")
    return pm


def build_from_hamiltonian(obs, meter: MeterModel, coupling_operator, g: float) -> PreMeasurement:
    """``U = exp(-i g S (x) N)`` for system observable ``S`` and meter operator ``N``."""
    obs = as_observable(obs)
    n_op = as_square(coupling_operator, "meter coupling operator")
    if n_op.shape[0] != meter.dim or not is_hermitian(n_op, 1e-12):
        raise ValueError("coupling operator must be Hermitian on the meter space")
    u = matexp_hermitian(kron(obs.matrix, hermitian_part(n_op)), g)
    markers = []
    for i, s_i in enumerate(obs.basis_values):
        markers.append(matexp_hermitian(n_op, g * s_i) @ meter.initial)
    return PreMeasurement(meter, obs.basis, np.array(markers), explicit_unitary=u)


def premeasure(pm: PreMeasurement, sigma0) -> np.ndarray:
    """Joint state ``tau_1 = U (sigma0 (x) mu0) U^dag``."""
    sigma0 = as_square(sigma0, "system state")
    if sigma0.shape[0] != pm.system_dim:
        raise DimensionError("system state does not match the pre-measurement")
    w = pm.images
    return w @ sigma0 @ dag(w)


def reduced_system_state(pm: PreMeasurement, sigma0) -> np.ndarray:
    """``Tr_M tau_1`` computed without forming ``tau_1``."""
    d_s, d_m = pm.dims
    w = pm.images.reshape(d_s, d_m, d_s)
    return np.einsum("iak,kl,jal->ij", w, as_square(sigma0), np.conj(w))


def reduced_meter_state(pm: PreMeasurement, sigma0) -> np.ndarray:
    """``Tr_S tau_1``."""
    d_s, d_m = pm.dims
    w = pm.images.reshape(d_s, d_m, d_s)
    return np.einsum("iak,kl,ibl->ab", w, as_square(sigma0), np.conj(w))


def readout(pm: PreMeasurement, tau1, k: int,
            numerics: Numerics | None = None) -> tuple[np.ndarray, float]:
    """Read pointer outcome ``k`` off the joint state.

    Returns the conditional system state and ``prob(m_k)``. Afterwards system
    and meter are in the product state ``sigma_1(|m_k) (x) |m_k><m_k|``.
    """
    d_s, d_m = pm.dims
    tau1 = as_square(tau1, "joint state")
    if tau1.shape[0] != d_s * d_m:
        raise DimensionError("joint state does not match the pre-measurement")
    mk = pm.meter.pointer_state(k)
    t = tau1.reshape(d_s, d_m, d_s, d_m)
    cond = np.einsum("a,iajb,b->ij", np.conj(mk), t, mk)
    prob = float(np.real(np.trace(cond)))
    if prob <= _num(numerics).probability_floor:
        raise ZeroProbabilityError(f"pointer outcome {k} has probability {prob:.3e}")
    return cond / prob, prob


@dataclass(frozen=True, eq=False)
class EffectSet:
    """POVM elements ``E_k`` stacked as a ``(K, d, d)`` array."""

    effects: np.ndarray

    def __len__(self):
        return len(self.effects)

    def completeness_error(self) -> float:
        d = self.effects.shape[-1]
        return maxabs(self.effects.sum(axis=0) - np.eye(d))

    def check(self, numerics: Numerics | None = None) -> "EffectSet":
        tol = _num(numerics)
        for k, e in enumerate(self.effects):
            if not is_hermitian(e, tol.hermitian_tol):
                raise ValueError(f"effect {k} is not Hermitian")
            if np.min(np.linalg.eigvalsh(hermitian_part(e))) < -tol.positivity_tol:
                raise ValueError(f"effect {k} is not positive")
        if self.completeness_error() > tol.unitary_tol:
            raise ValueError("effects do not sum to the identity")
        return self

    def probabilities(self, sigma0) -> np.ndarray:
        return np.real(np.einsum("kij,ji->k", self.effects, as_square(sigma0)))


@dataclass(frozen=True, eq=False)
class MeasurementOperatorSet:
    """Measurement operators ``Omega_k`` stacked as a ``(K, d_S, d_S)`` array."""

    operators: np.ndarray

    def __len__(self):
        return len(self.operators)

    def __getitem__(self, k):
        return self.operators[k]

    def effects(self) -> EffectSet:
        ops = self.operators
        return EffectSet(np.einsum("kji,kjl->kil", np.conj(ops), ops))

    def completeness_error(self) -> float:
        return self.effects().completeness_error()

    def apply(self, sigma) -> np.ndarray:
        """Unconditional update ``sum_k Omega_k sigma Omega_k^dag``."""
        ops = self.operators
        return np.einsum("kij,jl,kml->im", ops, as_square(sigma), np.conj(ops))

    def conditional(self, sigma, k: int,
                    numerics: Numerics | None = None) -> tuple[np.ndarray, float]:
        om = self.operators[k]
        unnorm = om @ as_square(sigma) @ dag(om)
        prob = float(np.real(np.trace(unnorm)))
        if prob <= _num(numerics).probability_floor:
            raise ZeroProbabilityError(f"outcome {k} has probability {prob:.3e}")
        return unnorm / prob, prob

    def compose(self, first: "MeasurementOperatorSet") -> "MeasurementOperatorSet":
        """Operators of ``first`` followed by ``self``: all products ``Omega2 Omega1``."""
        prod = np.einsum("aij,bjk->abik", self.operators, first.operators)
        d = prod.shape[-1]
        return MeasurementOperatorSet(prod.reshape(-1, d, d))


def measurement_operators(pm: PreMeasurement) -> MeasurementOperatorSet:
    """``Omega_k = <m_k| U |m0>``, one per pointer state."""
    d_s, d_m = pm.dims
    w = pm.images.reshape(d_s, d_m, d_s)
    if pm.meter.pointer_basis is None:
        ops = np.transpose(w, (1, 0, 2))
    else:
        ops = np.einsum("ak,iaj->kij", np.conj(pm.meter.pointer_basis), w)
    return MeasurementOperatorSet(np.ascontiguousarray(ops))


def consecutive(pm1: PreMeasurement, pm2: PreMeasurement, sigma0) -> np.ndarray:
    """Unconditional system state after ``pm1`` then ``pm2``, each with a fresh meter."""
    if pm1.system_dim != pm2.system_dim:
        raise DimensionError("consecutive measurements must act on the same system")
    return measurement_operators(pm2).apply(measurement_operators(pm1).apply(sigma0))


def repeated(pm: PreMeasurement, sigma0, n: int) -> np.ndarray:
    """``n`` identical consecutive measurements, outcomes unrecorded."""
    ops = measurement_operators(pm)
    sigma = as_square(sigma0)
    for _ in range(n):
        sigma = ops.apply(sigma)
    return sigma


def extended_measurement_operators(u, d0, m0, dims: tuple[int, int, int],
                                   pointer_basis=None,
                                   numerics: Numerics | None = None
                                   ) -> tuple[np.ndarray, EffectSet]:
    """Measurement operators when an unobserved environment ``D`` takes part.

    ``u`` acts on ``S (x) D (x) M`` with ``dims = (d_S, d_D, d_M)``. Returns
    ``Omega[k, r] = (<d_r| (x) <m_k|) U (|d0> (x) |m0>)`` as a
    ``(d_M, d_D, d_S, d_S)`` array and the effects
    ``E_k = sum_r Omega[k, r]^dag Omega[k, r]``.
    """
    d_s, d_d, d_m = dims
    u = as_square(u, "unitary")
    if u.shape[0] != d_s * d_d * d_m:
        raise DimensionError(f"unitary of size {u.shape[0]} does not match dims {dims}")
    if not is_unitary(u, _num(numerics).unitary_tol):
        raise ValueError("extended pre-measurement is not unitary")
    d0 = check_ket(d0, numerics, "environment initial state")
    m0 = check_ket(m0, numerics, "meter initial state")
    u4 = u.reshape(d_s, d_d, d_m, d_s, d_d, d_m)
    # contract the input environment and meter legs with |d0>, |m0>
    a = np.einsum("irkjsl,s,l->rkij", u4, d0, m0)  # (d_D, d_M, d_S, d_S) in computational basis
    if pointer_basis is not None:
        a = np.einsum("ak,raij->rkij", np.conj(as_square(pointer_basis)), a)
    omega = np.transpose(a, (1, 0, 2, 3))
    effects = np.einsum("krji,krjl->kil", np.conj(omega), omega)
    return np.ascontiguousarray(omega), EffectSet(effects)


def extended_readout(u, d0, m0, dims, sigma0, k: int,
                     numerics: Numerics | None = None) -> tuple[np.ndarray, float]:
    """Conditional system state after reading ``m_k``, environment traced out."""
    omega, _ = extended_measurement_operators(u, d0, m0, dims, numerics=numerics)
    sigma0 = as_square(sigma0)
    unnorm = sum(o @ sigma0 @ dag(o) for o in omega[k])
    prob = float(np.real(np.trace(unnorm)))
    if prob <= _num(numerics).probability_floor:
        raise ZeroProbabilityError(f"pointer outcome {k} has probability {prob:.3e}")
    return unnorm / prob, prob


def extended_joint_probability(u, d0, m0, dims, sigma0, k: int) -> float:
    """``Tr((1 (x) 1 (x) Lambda_k) tau_1)`` from the full joint state."""
    d_s, d_d, d_m = dims
    psi0 = kron(kron(np.eye(d_s), np.asarray(d0).reshape(-1, 1)), np.asarray(m0).reshape(-1, 1))
    tau1 = u @ psi0 @ as_square(sigma0) @ dag(psi0) @ dag(u)
    lam = np.zeros((d_m, d_m))
    lam[k, k] = 1.0
    return float(np.real(np.trace(kron(np.eye(d_s * d_d), lam) @ tau1)))
