"""Repeated measurements: the Zeno limit and the Lindblad master equation.

Both arise from slicing a time interval into ``n`` pre-measurements, each
with a fresh meter. With coupling ``g = gamma dt`` per slice the
disturbance vanishes as ``n`` grows (Zeno); with ``g^2 <N^2>_0 / (2 dt)``
held fixed it converges to the dephasing term of a Lindblad equation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..ancilla import MeterModel, PreMeasurement, build_from_hamiltonian, \
    measurement_operators
from ..meters import GaussianPointer, von_neumann_premeasurement
from ..qcore import (
    KET0,
    SIGMA_X,
    NumericalContractError,
    Numerics,
    _num,
    as_observable,
    as_square,
    check_density,
    commutator,
    dag,
    hermitian_part,
    matexp_hermitian,
    maxabs,
)

# ------------------------------------------------------------------- Zeno


def channel_superoperator(pm: PreMeasurement) -> np.ndarray:
    """Matrix of ``sigma -> sum_k Omega_k sigma Omega_k^dag`` acting on row-major ``vec(sigma)``."""
    ops = measurement_operators(pm).operators
    d = ops.shape[-1]
    return np.einsum("kij,klm->iljm", ops, np.conj(ops)).reshape(d * d, d * d)


@dataclass(frozen=True)
class ZenoRow:
    n: int
    deviation: float       # max-abs entry of sigma_n - sigma0
    closed_form: float     # same quantity from the per-step marker overlaps


def zeno_sweep(obs, sigma0, n_list, gamma: float = 1.0, duration: float = 1.0,
               width: float = 0.5, grid_points: int = 1024) -> list[ZenoRow]:
    """Deviation of the unconditional state after ``n`` equally spaced
    von Neumann measurements of ``S`` with coupling ``g = gamma duration / n``.

    Each step is the exact grid channel; ``n`` steps are its ``n``-th power.
    ``closed_form`` multiplies each coherence by the ``n``-th power of the
    analytic Gaussian overlap ``exp(-g^2 (s_i - s_j)^2 / (8 width^2))``.
    ``width = 0.5`` makes ``<P^2>_0 = 1``.
    """
    obs = as_observable(obs)
    sigma0 = as_square(sigma0, "initial state")
    d = sigma0.shape[0]
    b = obs.basis
    sig_eig = dag(b) @ sigma0 @ b
    ds = obs.basis_values[:, None] - obs.basis_values[None, :]
    rows = []
    for n in n_list:
        n = int(n)
        if n < 1:
            raise ValueError("number of slices must be positive")
        g = gamma * duration / n
        meter = GaussianPointer.default(width, g, max(abs(v) for v in obs.eigenvalues), grid_points)
        sup = channel_superoperator(von_neumann_premeasurement(meter, obs))
        vec = np.linalg.matrix_power(sup, n) @ sigma0.reshape(-1)
        dev = maxabs(vec.reshape(d, d) - sigma0)
        factor = np.exp(-(g**2) * ds**2 / (8 * width**2)) ** n
        closed = maxabs(b @ (sig_eig * factor) @ dag(b) - sigma0)
        rows.append(ZenoRow(n, float(dev), float(closed)))
    return rows


def fit_inverse_n(rows: list[ZenoRow]) -> float:
    """Least-squares ``C`` in ``deviation ~ C / n``."""
    n = np.array([r.n for r in rows], dtype=float)
    y = np.array([r.deviation for r in rows])
    return float(np.sum(y / n) / np.sum(1.0 / n**2))


# --------------------------------------------------------------- Lindblad


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """``d sigma/dt = i [sigma, H] - sum_a eta_a^2 [[sigma, T_a], T_a]``."""

    hamiltonian: np.ndarray
    channels: tuple = field(default_factory=tuple)   # ((T_a, eta_a), ...)

    def __post_init__(self):
        h = as_observable(self.hamiltonian).matrix
        chans = []
        for t_op, eta in self.channels:
            if eta < 0:
                raise ValueError("channel rates eta must be non-negative")
            chans.append((as_observable(t_op).matrix, float(eta)))
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "channels", tuple(chans))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def rhs(self, sigma: np.ndarray) -> np.ndarray:
        out = 1j * commutator(sigma, self.hamiltonian)
        for t_op, eta in self.channels:
            out -= eta**2 * commutator(commutator(sigma, t_op), t_op)
        return out

    def stiffness(self) -> float:
        """``max(eta^2 ||T||^2, ||H||)`` in spectral norm."""
        vals = [np.linalg.norm(self.hamiltonian, 2)]
        vals += [eta**2 * np.linalg.norm(t, 2) ** 2 for t, eta in self.channels]
        return float(max(vals))


class StepSizeError(ValueError):
    """Integration step too large for the fixed-step RK4 stability margin."""


@dataclass(frozen=True)
class LindbladTolerances:
    trace: float = 1e-10
    hermitian: float = 1e-10
    positivity: float = 1e-8


def _check_step_state(sigma, tol: LindbladTolerances, t: float):
    tr = np.trace(sigma)
    if abs(tr - 1) > tol.trace:
        raise NumericalContractError(f"trace drifted to {tr:.15g} at t = {t:.6g}")
    herm = maxabs(sigma - dag(sigma))
    if herm > tol.hermitian:
        raise NumericalContractError(f"state lost Hermiticity ({herm:.3e}) at t = {t:.6g}")
    lam = float(np.min(np.linalg.eigvalsh(hermitian_part(sigma))))
    if lam < -tol.positivity:
        raise NumericalContractError(f"negative eigenvalue {lam:.3e} at t = {t:.6g}")


def lindblad_integrate(model: LindbladModel, sigma0, t: float, dt: float,
                       tolerances: LindbladTolerances | None = None,
                       return_path: bool = False):
    """Fixed-step RK4 from 0 to ``t``; the last step is shortened to land on ``t``.

    Requires ``dt * stiffness < 0.1``. Every accepted state is checked for
    trace, Hermiticity and positivity; nothing is renormalized.
    """
    tol = LindbladTolerances() if tolerances is None else tolerances
    sigma = check_density(sigma0, name="initial state").astype(complex)
    if sigma.shape[0] != model.dim:
        raise ValueError("initial state does not match the model dimension")
    if dt <= 0 or t < 0:
        raise ValueError("need dt > 0 and t >= 0")
    if dt * model.stiffness() >= 0.1:
        raise StepSizeError(f"dt = {dt:g} too large: dt * stiffness = {dt * model.stiffness():.3g}")
    n_steps = int(np.ceil(t / dt - 1e-12))
    times, path = [0.0], [sigma]
    now = 0.0
    for _ in range(n_steps):
        h = min(dt, t - now)
        k1 = model.rhs(sigma)
        k2 = model.rhs(sigma + 0.5 * h * k1)
        k3 = model.rhs(sigma + 0.5 * h * k2)
        k4 = model.rhs(sigma + h * k3)
        sigma = sigma + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        now += h
        _check_step_state(sigma, tol, now)
        if return_path:
            times.append(now)
            path.append(sigma)
    if return_path:
        return np.array(times), np.array(path)
    return sigma


def dephasing_closed_form(sigma0, eta: float, t: float) -> np.ndarray:
    """Qubit with ``H = 0``, ``T = sigma_z``: coherences decay as ``exp(-4 eta^2 t)``."""
    s = as_square(sigma0).copy()
    decay = np.exp(-4 * eta**2 * t)
    s[0, 1] *= decay
    s[1, 0] *= decay
    return s


def ancilla_slice(t_op, eta: float, dt: float) -> PreMeasurement:
    """Qubit meter ``|0>`` coupled by ``exp(-i g T (x) sigma_x)`` with
    ``g = eta sqrt(2 dt)``, i.e. ``g^2 <sigma_x^2>_0 / (2 dt) = eta^2``."""
    return build_from_hamiltonian(t_op, MeterModel(KET0), SIGMA_X, eta * np.sqrt(2 * dt))


@dataclass(frozen=True)
class RepeatedRow:
    n: int
    error: float           # max-abs difference to the integrated state
    max_trace_error: float


def repeated_ancilla_evolution(model: LindbladModel, sigma0, t: float, n: int,
                               numerics: Numerics | None = None) -> tuple[np.ndarray, float]:
    """``n`` slices of ``exp(-i H dt)`` followed by one fresh-ancilla measurement
    per channel. Returns the final state and the largest trace error seen."""
    tol = _num(numerics)
    dt = t / n
    u = matexp_hermitian(model.hamiltonian, dt)
    ops = [measurement_operators(ancilla_slice(t_op, eta, dt)) for t_op, eta in model.channels]
    sigma = as_square(sigma0).astype(complex)
    worst = 0.0
    for _ in range(n):
        sigma = u @ sigma @ dag(u)
        for o in ops:
            sigma = o.apply(sigma)
        err = abs(np.trace(sigma) - 1)
        worst = max(worst, float(err))
        if err > 1e2 * tol.trace_tol:
            raise NumericalContractError(f"repeated-ancilla step lost trace ({err:.3e})")
    return sigma, worst


def lindblad_from_repeated(model: LindbladModel, sigma0, t: float, n_list,
                           dt: float = 1e-3) -> list[RepeatedRow]:
    """Compare the repeated-ancilla evolution with :func:`lindblad_integrate`."""
    target = lindblad_integrate(model, sigma0, t, dt)
    rows = []
    for n in n_list:
        final, worst = repeated_ancilla_evolution(model, sigma0, t, int(n))
        rows.append(RepeatedRow(int(n), maxabs(final - target), worst))
    return rows
