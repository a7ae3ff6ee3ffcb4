"""Weak measurement with and without post-selection.

Every second-order formula here has an exact counterpart computed from the
full system-meter evolution on the pointer grid, and the report objects
carry both so that truncation errors can be checked directly.

Operator "Re"/"Im" brackets are the Hermitian and anti-Hermitian parts
``(A + A^dag)/2`` and ``(A - A^dag)/2i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from .ancilla import PreMeasurement
from .meters import GaussianPointer, QubitMeter, pointer_moments, pointer_shift, \
    von_neumann_premeasurement
from .qcore import (
    SIGMA_Z,
    DimensionError,
    Numerics,
    ZeroProbabilityError,
    _num,
    antihermitian_part,
    as_observable,
    as_square,
    check_ket,
    commutator,
    dag,
    density,
    expectation,
    hermitian_part,
    normalize,
)


def weak_value(s, obs, f, floor: float = 1e-12) -> complex:
    """``<f|S|s> / <f|s>``; raises when ``|<f|s>|`` is below ``floor``."""
    obs = as_observable(obs)
    s = check_ket(s, name="pre-selected state")
    f = check_ket(f, name="post-selected state")
    if s.size != obs.dim or f.size != obs.dim:
        raise DimensionError("states do not match the observable")
    fs = np.vdot(f, s)
    if abs(fs) <= floor:
        raise ZeroProbabilityError(f"pre- and post-selected states are orthogonal (|<f|s>| = {abs(fs):.3e})")
    return complex(np.vdot(f, obs.matrix @ s) / fs)


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log|y|`` against ``log|x|``."""
    x = np.log(np.abs(np.asarray(x, dtype=float)))
    y = np.log(np.abs(np.asarray(y, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True, eq=False)
class WeakSetup:
    """Pre-selection ``|s>``, observable ``S``, post-selection ``|f>`` and a
    Gaussian pointer coupled through ``exp(-i g S (x) P)``."""

    pre: np.ndarray
    obs: object
    post: np.ndarray
    meter: GaussianPointer
    floor: float = 1e-12

    def __post_init__(self):
        obs = as_observable(self.obs)
        object.__setattr__(self, "obs", obs)
        object.__setattr__(self, "pre", check_ket(self.pre, name="pre-selected state"))
        object.__setattr__(self, "post", check_ket(self.post, name="post-selected state"))
        if self.pre.size != obs.dim or self.post.size != obs.dim:
            raise DimensionError("states do not match the observable")

    @classmethod
    def create(cls, pre, obs, post, coupling: float, width: float = 1.0, n: int = 1024,
               floor: float = 1e-12) -> "WeakSetup":
        obs = as_observable(obs)
        smax = max(abs(v) for v in obs.eigenvalues)
        return cls(pre, obs, post, GaussianPointer.default(width, coupling, smax, n), floor)

    @property
    def coupling(self) -> float:
        return self.meter.coupling

    @cached_property
    def pm(self) -> PreMeasurement:
        return von_neumann_premeasurement(self.meter, self.obs)

    @cached_property
    def initial_moments(self):
        return pointer_moments(self.meter, self.meter.phi0)

    @property
    def n2(self) -> float:
        """``<N^2>_0`` with ``N = P``."""
        return self.initial_moments.p2

    @cached_property
    def overlap(self) -> complex:
        return complex(np.vdot(self.post, self.pre))

    @cached_property
    def weak_value(self) -> complex:
        return weak_value(self.pre, self.obs, self.post, self.floor)

    @cached_property
    def weak_value_square(self) -> complex:
        """``<f|S^2|s> / <f|s>``."""
        s2 = self.obs.matrix @ self.obs.matrix
        return complex(np.vdot(self.post, s2 @ self.pre) / self.overlap)

    @property
    def denominator(self) -> float:
        """``D = 1 - g^2 <N^2>_0 Re(<f|S^2|s>/<f|s> - |S_w|^2)``."""
        g = self.coupling
        sw = self.weak_value
        return float(1.0 - g**2 * self.n2 * np.real(self.weak_value_square - abs(sw) ** 2))


# ------------------------------------------------------------ no post-selection


def weak_system_update(setup: WeakSetup, sigma0) -> np.ndarray:
    """Second-order unconditional state ``sigma0 - g^2 <N^2>_0 [[sigma0, S], S] / 2``."""
    s = setup.obs.matrix
    sigma0 = as_square(sigma0)
    return sigma0 - 0.5 * setup.coupling**2 * setup.n2 * commutator(commutator(sigma0, s), s)


def weak_system_update_exact(setup: WeakSetup, sigma0) -> np.ndarray:
    from .ancilla import reduced_system_state

    return reduced_system_state(setup.pm, sigma0)


def marker_overlap_weak(setup: WeakSetup, s_i: float, s_j: float) -> float:
    """``<m^(i)|m^(j)> ~ 1 - g^2 <N^2>_0 (s_i - s_j)^2 / 2``."""
    return float(1.0 - 0.5 * setup.coupling**2 * setup.n2 * (s_i - s_j) ** 2)


def marker_overlap_exact(setup: WeakSetup, s_i: float, s_j: float) -> float:
    """Overlap of the shifted grid packets (quadrature)."""
    a = pointer_shift(setup.meter, s_i)
    b = pointer_shift(setup.meter, s_j)
    return float(np.real(np.vdot(a, b)))


# ---------------------------------------------------------- post-selection


def postselect_meter(pm: PreMeasurement, sigma0, f,
                     numerics: Numerics | None = None) -> tuple[np.ndarray, float]:
    """Exact meter state after post-selecting ``|f>`` on the system, and
    ``prob(f | tau_1)``."""
    d_s, d_m = pm.dims
    f = check_ket(f, numerics, "post-selected state")
    w = pm.images.reshape(d_s, d_m, d_s)
    k = np.einsum("i,iaj->aj", np.conj(f), w)     # (<f| (x) 1) U (1 (x) |m0>)
    mu = k @ as_square(sigma0) @ dag(k)
    prob = float(np.real(np.trace(mu)))
    if prob <= _num(numerics).probability_floor:
        raise ZeroProbabilityError(f"post-selection probability {prob:.3e}")
    return mu / prob, prob


def postselected_pointer(setup: WeakSetup) -> tuple[np.ndarray, float]:
    """Pure pre-state only: unnormalized meter ket ``(<f| (x) 1) U |s>|m0>`` and its norm squared."""
    d_s, d_m = setup.pm.dims
    w = setup.pm.images.reshape(d_s, d_m, d_s)
    psi = np.einsum("i,iaj,j->a", np.conj(setup.post), w, setup.pre)
    return psi, float(np.vdot(psi, psi).real)


def postselect_meter_exact(setup: WeakSetup, sigma0=None) -> tuple[np.ndarray, float]:
    """Exact post-selected meter density; ``sigma0`` defaults to ``|s><s|``."""
    sigma0 = density(setup.pre) if sigma0 is None else sigma0
    return postselect_meter(setup.pm, sigma0, setup.post)


def _meter_vectors(setup: WeakSetup):
    m = setup.meter
    phi = m.phi0
    u = m.from_momentum(m.p * m.to_momentum(phi))       # N phi0
    v = m.from_momentum(m.p**2 * m.to_momentum(phi))    # N^2 phi0
    return phi, u, v


def meter_state_2nd(setup: WeakSetup) -> np.ndarray:
    """Second-order post-selected meter density on the grid (trace one)."""
    g = setup.coupling
    sw = setup.weak_value
    x2 = setup.weak_value_square
    phi, u, v = _meter_vectors(setup)
    a = sw * np.outer(u, np.conj(phi))                  # S_w N mu0
    b = x2 * np.outer(v, np.conj(phi)) - abs(sw) ** 2 * np.outer(u, np.conj(u))
    mu0 = np.outer(phi, np.conj(phi))
    return (mu0 + 2 * g * antihermitian_part(a) - g**2 * hermitian_part(b)) / setup.denominator


@dataclass(frozen=True)
class WeakReport:
    """Second-order post-selection results with their exact counterparts."""

    weak_value: complex
    denominator: float
    prob_post_exact: float
    prob_post_2nd: float
    pointer_Q: float
    pointer_P: float
    pointer_Q_var: float
    exact_Q: float
    exact_P: float
    exact_Q_var: float
    exact_minus_formula: dict = field(default_factory=dict)


def postselect_meter_2nd(setup: WeakSetup) -> WeakReport:
    """Weak value, ``D`` and second-order probability/pointer readings."""
    sw = setup.weak_value
    prob2 = abs(setup.overlap) ** 2 * setup.denominator
    fq, fp = _readout_formulas(setup)
    mu2 = meter_state_2nd(setup)
    m2 = pointer_moments(setup.meter, mu2)
    psi, prob = postselected_pointer(setup)
    ex = pointer_moments(setup.meter, psi)
    deltas = {
        "prob": prob - prob2,
        "Q": ex.q - fq,
        "P": ex.p - fp,
        "Q_var": ex.q_var - m2.q_var,
    }
    return WeakReport(sw, setup.denominator, prob, prob2, fq, fp, m2.q_var,
                      ex.q, ex.p, ex.q_var, deltas)


def _readout_formulas(setup: WeakSetup) -> tuple[float, float]:
    g = setup.coupling
    sw = setup.weak_value
    m0 = setup.initial_moments
    d = setup.denominator
    fq = (g * sw.real + g * m0.qp_anti * sw.imag) / d
    fp = 2 * g * m0.p2 * sw.imag / d
    return float(fq), float(fp)


@dataclass(frozen=True)
class PointerReadout:
    fQ: float
    fP: float
    exact_Q: float
    exact_P: float
    exact_Q2: float
    exact_P2: float
    initial_Q2: float
    initial_P2: float


def pointer_readout_weak(setup: WeakSetup) -> PointerReadout:
    """Post-selected pointer means: second-order formulas and exact values.

    ``fQ ~ (g Re S_w + g <{P,Q}>_0 Im S_w) / D`` and
    ``fP ~ 2 g <P^2>_0 Im S_w / D``.
    """
    fq, fp = _readout_formulas(setup)
    psi, _ = postselected_pointer(setup)
    ex = pointer_moments(setup.meter, psi)
    m0 = setup.initial_moments
    return PointerReadout(fq, fp, ex.q, ex.p, ex.q2, ex.p2, m0.q2, m0.p2)


@dataclass(frozen=True)
class MeterObservableEstimate:
    value: float             # Tr(L mu_f) with the full second-order mu_f
    leading: float           # (<L>_0 + 2g Im(S_w <L N>_0)) / D
    commutator_part: float   # i g <[N, L]>_0 Re S_w / D
    anticommutator_part: float  # g <{N, L}>_0 Im S_w / D
    exact: float


def meter_observable_weak(setup: WeakSetup, L) -> MeterObservableEstimate:
    """Expectation of a Hermitian grid operator ``L`` after post-selection.

    The two reported parts add up to the first-order term of ``leading``:
    ``2 Im(S_w <L N>_0) = i <[N, L]>_0 Re S_w + <{N, L}>_0 Im S_w``, so that
    ``L = Q`` (with ``[Q, P] = i``) gives ``+g Re S_w``.
    """
    L = as_square(L, "meter observable")
    if L.shape[0] != setup.meter.n:
        raise DimensionError("meter observable does not match the pointer grid")
    g = setup.coupling
    sw = setup.weak_value
    d = setup.denominator
    phi, u, _ = _meter_vectors(setup)
    l0 = np.vdot(phi, L @ phi).real
    ln = np.vdot(phi, L @ u)          # <L N>_0
    nl = np.vdot(u, L @ phi)          # <N L>_0
    comm = 1j * (nl - ln) * sw.real    # i <[N, L]>_0 Re S_w
    anti = (nl + ln) * sw.imag         # <{N, L}>_0 Im S_w
    leading = (l0 + 2 * g * np.imag(sw * ln)) / d
    mu2 = meter_state_2nd(setup)
    value = np.real(np.trace(L @ mu2))
    psi, prob = postselected_pointer(setup)
    exact = np.vdot(psi, L @ psi).real / prob
    return MeterObservableEstimate(float(value), float(leading), float(np.real(g * comm / d)),
                                   float(np.real(g * anti / d)), float(exact))


# ------------------------------------------------------------ amplification


@dataclass(frozen=True)
class AmplificationResult:
    max_abs_fQ: float
    bound: float
    overlap_r: float
    argmax_post: np.ndarray
    prob_at_max: float
    prob_formula: float
    var_at_max: float
    initial_var: float
    random_max_abs_fQ: float
    alpha_f: complex
    beta_f: complex


def _qubit_post(t, chi):
    return np.array([np.cos(t), np.exp(1j * chi) * np.sin(t)])


def amplification_scan(meter: GaussianPointer, alpha: complex, beta: complex,
                       n_theta: int = 181, n_phase: int = 72, n_random: int = 10_000,
                       rng: np.random.Generator | None = None) -> AmplificationResult:
    """Scan qubit post-selections ``|f>`` for the largest post-selected pointer mean.

    System ``alpha|0> + beta|1>`` measured in ``sigma_z``. All pointer values
    are exact grid expectations of ``alpha_f phi0(q - g) + beta_f phi0(q + g)``;
    the bound ``g / sqrt(1 - r^2)`` uses the quadrature overlap ``r``.

    The coarse scan runs over ``f = (cos t, e^{i chi} sin t)``; the optimum is
    then polished in the ratio ``z = beta_f / alpha_f``, on which the pointer
    mean depends smoothly, and mapped back to ``f``.
    """
    if abs(alpha) == 0 or abs(beta) == 0:
        raise ValueError("amplification scan needs both alpha and beta non-zero")
    alpha, beta = check_ket([alpha, beta], name="pre-selected state")
    rng = np.random.default_rng(0) if rng is None else rng
    q = meter.q
    pp = pointer_shift(meter, 1.0)
    pm_ = pointer_shift(meter, -1.0)
    r = float(np.real(np.vdot(pm_, pp)))
    # bilinear grid moments (weights 1, q, q^2) of a phi(q - g) + b phi(q + g)
    mom = np.array([[np.sum(w * abs(pp) ** 2), np.sum(w * abs(pm_) ** 2),
                     np.sum(w * pp * np.conj(pm_))] for w in (1.0, q, q**2)])

    def stats_ab(a, b):
        a, b = np.asarray(a), np.asarray(b)
        n0, n1, n2 = (np.real(abs(a) ** 2 * m[0] + abs(b) ** 2 * m[1]
                              + 2 * np.real(a * np.conj(b) * m[2])) for m in mom)
        return n1 / n0, n2 / n0 - (n1 / n0) ** 2, n0

    def stats_f(f0, f1):
        return stats_ab(alpha * np.conj(f0), beta * np.conj(f1))

    tt, cc = np.meshgrid(np.linspace(0.0, np.pi, n_theta),
                         np.linspace(0.0, 2 * np.pi, n_phase, endpoint=False), indexing="ij")
    fq_grid = stats_f(np.cos(tt), np.exp(1j * cc) * np.sin(tt))[0]
    k = np.unravel_index(np.nanargmax(np.abs(fq_grid)), fq_grid.shape)
    f0 = _qubit_post(tt[k], cc[k])
    z0 = (beta * np.conj(f0[1])) / (alpha * np.conj(f0[0]))

    def neg_abs(x):
        return -abs(stats_ab(1.0, np.exp(x[0] + 1j * x[1]))[0])

    res = minimize(neg_abs, np.array([np.log(abs(z0)), np.angle(z0)]), method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 20_000})
    z = np.exp(res.x[0] + 1j * res.x[1])
    # f with beta conj(f1) / (alpha conj(f0)) = z
    f_opt = normalize(np.conj(np.array([1.0 / alpha, z / beta])))
    a_f = alpha * np.conj(f_opt[0])
    b_f = beta * np.conj(f_opt[1])
    fq, var, prob = (float(x) for x in stats_ab(a_f, b_f))

    v = rng.normal(size=(n_random, 2)) + 1j * rng.normal(size=(n_random, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rand_max = float(np.max(np.abs(stats_f(v[:, 0], v[:, 1])[0])))

    q0 = pointer_moments(meter, meter.phi0)
    sq = np.sqrt(1 - r**2)
    # the maximising amplitude is alpha_f for fQ > 0 and beta_f for fQ < 0
    lead = a_f if fq > 0 else b_f
    return AmplificationResult(
        max_abs_fQ=abs(fq),
        bound=float(meter.coupling / sq),
        overlap_r=r,
        argmax_post=f_opt,
        prob_at_max=prob,
        prob_formula=float(2 * abs(lead) ** 2 * (1 - r**2) / (1 + sq)),
        var_at_max=var,
        initial_var=float(q0.q_var),
        random_max_abs_fQ=rand_max,
        alpha_f=complex(a_f),
        beta_f=complex(b_f),
    )


# --------------------------------------------------------------- double qubit


def double_qubit_exact(s, f, theta: float) -> tuple[float, float]:
    """Exact ``<S_1^M>`` of the meter qubit after post-selecting ``|f>``,
    from the full 4x4 evolution; returns ``(value, prob(f | tau_1))``."""
    pm = QubitMeter(theta).premeasurement()
    mu, prob = postselect_meter(pm, density(s), f)
    return float(np.real(expectation(SIGMA_Z, mu))), prob


@dataclass(frozen=True)
class DoubleQubitWeak:
    formula: float
    exact: float
    denominator: float
    prob: float
    weak_value: complex

    @property
    def delta(self) -> float:
        return self.exact - self.formula


def double_qubit_weak(s, f, eps: float, floor: float = 1e-12) -> DoubleQubitWeak:
    """Weak double-qubit pointer ``eps Re(S_w) / D_dq`` with ``theta = pi/2 - eps``.

    ``D_dq = 1 - eps^2 Re(alpha_f beta_f^*) / |<f|s>|^2``.
    """
    s = check_ket(s, name="pre-selected state")
    f = check_ket(f, name="post-selected state")
    a_f = s[0] * np.conj(f[0])
    b_f = s[1] * np.conj(f[1])
    fs = a_f + b_f
    if abs(fs) <= floor:
        raise ZeroProbabilityError("<f|s> vanishes")
    sw = weak_value(s, SIGMA_Z, f, floor)
    d = 1.0 - eps**2 * np.real(a_f * np.conj(b_f)) / abs(fs) ** 2
    exact, prob = double_qubit_exact(s, f, np.pi / 2 - eps)
    return DoubleQubitWeak(float(eps * sw.real / d), exact, float(d), prob, sw)
