"""Dense complex linear algebra and quantum-state primitives.

States and operators are plain ``numpy`` arrays (complex128). Composite
spaces are always ordered system first, meter second, so that the index of
``|i> (x) |a>`` is ``i * d_M + a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


class DimensionError(ValueError):
    """Operand shapes do not fit together."""


class ZeroProbabilityError(ValueError):
    """Conditioning on an outcome (or post-selection) that cannot occur."""


class NumericalContractError(ArithmeticError):
    """A computed result violates a physical invariant (trace, positivity, ...)."""


@dataclass(frozen=True)
class Numerics:
    """Tolerances shared by every module.

    Pass a modified copy (``dataclasses.replace``) to loosen or tighten
    checks; nothing here is global state.
    """

    hermitian_tol: float = 1e-12
    trace_tol: float = 1e-12
    positivity_tol: float = 1e-10
    unitary_tol: float = 1e-10
    norm_tol: float = 1e-10
    degeneracy_tol: float = 1e-9
    probability_floor: float = 1e-14
    overlap_floor: float = 1e-12


DEFAULT_NUMERICS = Numerics()


def _num(numerics: Numerics | None) -> Numerics:
    return DEFAULT_NUMERICS if numerics is None else numerics


# ---------------------------------------------------------------- helpers


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """``(A + A^dag) / 2``."""
    return 0.5 * (a + dag(a))


def antihermitian_part(a: np.ndarray) -> np.ndarray:
    """``(A - A^dag) / 2i``, itself a Hermitian matrix."""
    return (a - dag(a)) / 2j


def maxabs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return maxabs(a - dag(a)) <= tol


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return maxabs(dag(u) @ u - np.eye(u.shape[0])) <= tol


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def ket(amplitudes, normalized: bool = True) -> np.ndarray:
    """Build a state vector; normalizes unless ``normalized=False``."""
    v = np.asarray(amplitudes, dtype=complex).ravel()
    return normalize(v) if normalized else v


def check_ket(v, numerics: Numerics | None = None, name: str = "state") -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    err = abs(np.linalg.norm(v) - 1.0)
    if err > _num(numerics).norm_tol:
        raise ValueError(f"{name} is not normalized (|norm - 1| = {err:.3e})")
    return v


def projector(v) -> np.ndarray:
    """``|v><v|`` for a (normalized) ket."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, np.conj(v))


def density(v) -> np.ndarray:
    """Pure-state density matrix of the normalized ket ``v``."""
    return projector(normalize(v))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def check_density(rho, numerics: Numerics | None = None, name: str = "density matrix",
                  error: type[Exception] = ValueError) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array.

    Use ``error=NumericalContractError`` when checking a computed result
    rather than user input.
    """
    tol = _num(numerics)
    rho = as_square(rho, name)
    herm = maxabs(rho - dag(rho))
    if herm > tol.hermitian_tol:
        raise error(f"{name} is not Hermitian (deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol.trace_tol:
        raise error(f"{name} does not have unit trace (trace = {tr:.15g})")
    lam_min = float(np.min(np.linalg.eigvalsh(hermitian_part(rho))))
    if lam_min < -tol.positivity_tol:
        raise error(f"{name} is not positive (min eigenvalue {lam_min:.3e})")
    return rho


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state ``G G^dag / Tr`` with Ginibre ``G`` of the given rank."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ dag(g)
    return hermitian_part(rho / np.trace(rho))


# ------------------------------------------------------------- observables


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator together with its grouped spectral decomposition.

    ``eigenvalues[i]`` is a distinct eigenvalue and ``projectors[i]`` the
    projector onto its eigenspace. ``basis`` holds an orthonormal eigenbasis
    (columns) ordered consistently with ``basis_values``.
    """

    matrix: np.ndarray
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]
    basis: np.ndarray
    basis_values: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, matrix, numerics: Numerics | None = None) -> "Observable":
        tol = _num(numerics)
        m = as_square(matrix, "observable")
        if not is_hermitian(m, tol.hermitian_tol):
            raise ValueError("observable matrix is not Hermitian")
        m = hermitian_part(m)
        w, v = np.linalg.eigh(m)
        groups: list[list[int]] = []
        for k in range(len(w)):
            if groups and abs(w[k] - w[groups[-1][0]]) <= tol.degeneracy_tol:
                groups[-1].append(k)
            else:
                groups.append([k])
        values = tuple(float(np.mean(w[g])) for g in groups)
        projs = tuple(v[:, g] @ dag(v[:, g]) for g in groups)
        basis_values = np.concatenate([[values[i]] * len(g) for i, g in enumerate(groups)])
        return cls(m, values, projs, v, basis_values)

    @classmethod
    def from_spectrum(cls, values: Sequence[float], basis) -> "Observable":
        """``sum_i values[i] |b_i><b_i|`` for orthonormal columns ``b_i``."""
        b = as_square(basis, "basis")
        return cls.from_matrix(b @ np.diag(np.asarray(values, dtype=complex)) @ dag(b))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def projector_for(self, value: float, numerics: Numerics | None = None) -> np.ndarray:
        tol = _num(numerics).degeneracy_tol
        for s, p in zip(self.eigenvalues, self.projectors):
            if abs(s - value) <= tol:
                return p
        raise ValueError(f"{value!r} is not an eigenvalue (spectrum {self.eigenvalues})")

    def spectral_sum(self) -> np.ndarray:
        return sum(s * p for s, p in zip(self.eigenvalues, self.projectors))


def as_observable(obs) -> Observable:
    return obs if isinstance(obs, Observable) else Observable.from_matrix(obs)


def _operator(obs) -> np.ndarray:
    return obs.matrix if isinstance(obs, Observable) else as_square(obs, "operator")


# -------------------------------------------------------------- operations


def kron(a, b) -> np.ndarray:
    """Tensor product with ``a`` (system) as the slow index."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.kron(a, b)


def partial_trace(t, dims: tuple[int, int], keep: str | int = "system") -> np.ndarray:
    """Reduce a bipartite operator on ``d_S * d_M`` to one factor.

    ``keep`` is ``"system"``/0 (trace out the meter) or ``"meter"``/1.
    """
    d_s, d_m = dims
    t = as_square(t, "joint operator")
    if t.shape[0] != d_s * d_m:
        raise DimensionError(f"operator of size {t.shape[0]} does not match dims {dims}")
    r = t.reshape(d_s, d_m, d_s, d_m)
    if keep in ("system", 0):
        return np.einsum("iaja->ij", r)
    if keep in ("meter", 1):
        return np.einsum("iaib->ab", r)
    raise ValueError(f"keep must be 'system' or 'meter', got {keep!r}")


def evolve(rho, u, numerics: Numerics | None = None) -> np.ndarray:
    """``U rho U^dag``; rejects non-unitary ``u``."""
    rho = as_square(rho, "state")
    u = as_square(u, "unitary")
    if u.shape != rho.shape:
        raise DimensionError(f"unitary {u.shape} vs state {rho.shape}")
    if not is_unitary(u, _num(numerics).unitary_tol):
        raise ValueError("evolution operator is not unitary")
    return u @ rho @ dag(u)


def matexp_hermitian(h, t: float) -> np.ndarray:
    """``exp(-i t H)`` via the eigen-decomposition of Hermitian ``H``."""
    m = _operator(h)
    if not is_hermitian(m, 1e-10):
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh(hermitian_part(m))
    return (v * np.exp(-1j * t * w)) @ dag(v)


def expectation(obs, rho) -> complex:
    """``Tr(S rho)``."""
    s = _operator(obs)
    rho = as_square(rho, "state")
    if s.shape != rho.shape:
        raise DimensionError(f"operator {s.shape} vs state {rho.shape}")
    return complex(np.trace(s @ rho))
