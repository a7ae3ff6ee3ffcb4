"""Ideal (projective) measurements: Born probabilities, Lüders updates and
the ABL rule for pre- and post-selected ensembles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    DimensionError,
    Numerics,
    ZeroProbabilityError,
    _num,
    as_observable,
    as_square,
    check_ket,
)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities attached to the distinct eigenvalues of an observable."""

    values: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __iter__(self):
        return iter(zip(self.values, self.probabilities))

    def __len__(self) -> int:
        return len(self.values)

    def probability(self, value: float, tol: float = 1e-9) -> float:
        for s, p in self:
            if abs(s - value) <= tol:
                return p
        raise KeyError(value)

    def mean(self) -> float:
        return float(sum(s * p for s, p in self))

    def as_dict(self) -> dict[float, float]:
        return dict(self)


def _check_dims(obs, rho):
    if obs.dim != rho.shape[0]:
        raise DimensionError(f"observable of dim {obs.dim} vs state of dim {rho.shape[0]}")


def outcome_probability(obs, rho) -> OutcomeDistribution:
    """``prob(s_i) = Tr(Pi_i rho)`` for each distinct eigenvalue."""
    obs = as_observable(obs)
    rho = as_square(rho, "state")
    _check_dims(obs, rho)
    probs = tuple(float(np.real(np.trace(p @ rho))) for p in obs.projectors)
    return OutcomeDistribution(obs.eigenvalues, probs)


def luders_conditional(obs, rho, outcome: float,
                       numerics: Numerics | None = None) -> tuple[np.ndarray, float]:
    """State after obtaining ``outcome``: ``Pi rho Pi / prob``, and ``prob``."""
    tol = _num(numerics)
    obs = as_observable(obs)
    rho = as_square(rho, "state")
    _check_dims(obs, rho)
    p = obs.projector_for(outcome, tol)
    unnorm = p @ rho @ p
    prob = float(np.real(np.trace(unnorm)))
    if prob <= tol.probability_floor:
        raise ZeroProbabilityError(f"outcome {outcome} has probability {prob:.3e}")
    return unnorm / prob, prob


def luders_unconditional(obs, rho) -> np.ndarray:
    """``sum_i Pi_i rho Pi_i``: the state when the outcome is not recorded."""
    obs = as_observable(obs)
    rho = as_square(rho, "state")
    _check_dims(obs, rho)
    return sum(p @ rho @ p for p in obs.projectors)


def _branch_weights(pre, obs, post) -> tuple[np.ndarray, object]:
    obs = as_observable(obs)
    s = check_ket(pre, name="pre-selected state")
    f = check_ket(post, name="post-selected state")
    if s.size != obs.dim or f.size != obs.dim:
        raise DimensionError("pre/post states do not match the observable dimension")
    amps = np.array([np.vdot(f, p @ s) for p in obs.projectors])
    return np.abs(amps) ** 2, obs


def joint_then_post_probability(pre, obs, post) -> float:
    """``prob(f | s) = sum_i |<f|Pi_i|s>|^2`` with the intermediate
    measurement performed but not recorded."""
    w, _ = _branch_weights(pre, obs, post)
    return float(np.sum(w))


def abl_probability(pre, obs, post, numerics: Numerics | None = None) -> OutcomeDistribution:
    """ABL rule ``|<f|Pi_i|s>|^2 / sum_j |<f|Pi_j|s>|^2``."""
    w, obs = _branch_weights(pre, obs, post)
    total = float(np.sum(w))
    if total <= _num(numerics).probability_floor:
        raise ZeroProbabilityError(
            "post-selection is impossible once the intermediate measurement is made")
    return OutcomeDistribution(obs.eigenvalues, tuple(float(x) for x in w / total))


def abl_conditional_mean(pre, obs, post, numerics: Numerics | None = None) -> float:
    return abl_probability(pre, obs, post, numerics).mean()


def interference_free_expectation(a, obs, rho) -> float:
    """``sum_i <s_i|A|s_i><s_i|rho|s_i>`` over a non-degenerate eigenbasis;
    equals ``Tr(A * luders_unconditional(obs, rho))``."""
    obs = as_observable(obs)
    b = obs.basis
    a_diag = np.real(np.einsum("ki,kl,li->i", np.conj(b), np.asarray(a), b))
    r_diag = np.real(np.einsum("ki,kl,li->i", np.conj(b), np.asarray(rho), b))
    return float(np.sum(a_diag * r_diag))


__all__ = [
    "OutcomeDistribution",
    "outcome_probability",
    "luders_conditional",
    "luders_unconditional",
    "abl_probability",
    "abl_conditional_mean",
    "joint_then_post_probability",
    "interference_free_expectation",
]
