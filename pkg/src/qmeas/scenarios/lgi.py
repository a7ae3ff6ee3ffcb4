"""Leggett-Garg quantity for a weak measurement followed by post-selection.

``<B> = <s|S|s> + |<f|s>|^2 (Re S_w - 1)`` must satisfy ``-3 <= <B> <= 1``
for a macro-realistic, non-invasively measured system whenever the spectrum
of ``S`` lies in ``[-1, 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..qcore import SIGMA_Z, as_observable, check_ket

UPPER_BOUND = 1.0
LOWER_BOUND = -3.0


@dataclass(frozen=True)
class LgiReport:
    B_mean: float
    mean: float            # <s|S|s>
    overlap_sq: float      # |<f|s>|^2
    re_weak_value: float   # Re S_w (0 when <f|s> vanishes)
    violated: bool

    def recombined(self) -> float:
        return self.mean + self.overlap_sq * (self.re_weak_value - 1.0)


def lgi_value(s, obs, f, floor: float = 1e-12, tol: float = 1e-12) -> LgiReport:
    """Evaluate ``<B>`` exactly for pre-selection ``s``, observable ``S`` and post-selection ``f``."""
    obs = as_observable(obs)
    if min(obs.eigenvalues) < -1 - tol or max(obs.eigenvalues) > 1 + tol:
        raise ValueError(f"observable spectrum {obs.eigenvalues} is not inside [-1, 1]")
    s = check_ket(s, name="pre-selected state")
    f = check_ket(f, name="post-selected state")
    mean = float(np.real(np.vdot(s, obs.matrix @ s)))
    fs = np.vdot(f, s)
    ov = float(abs(fs) ** 2)
    re_sw = float(np.real(np.vdot(f, obs.matrix @ s) / fs)) if abs(fs) > floor else 0.0
    b = mean + ov * (re_sw - 1.0)
    return LgiReport(b, mean, ov, re_sw, bool(b > UPPER_BOUND + tol or b < LOWER_BOUND - tol))


def qubit_states(beta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """``|s> = alpha|0> + beta|1>`` with ``alpha = sqrt(1 - beta^2)`` and
    ``|f> = cos(phi/2)|0> + sin(phi/2)|1>``."""
    alpha = np.sqrt(max(0.0, 1.0 - beta**2))
    return (np.array([alpha, beta], dtype=complex),
            np.array([np.cos(phi / 2), np.sin(phi / 2)], dtype=complex))


def qubit_lgi(beta, phi):
    """Vectorized ``<B>`` for the qubit family with ``S = sigma_z``.

    Expands to ``1 - 3 beta^2 + beta^2 cos(phi) - alpha beta sin(phi)``.
    """
    beta = np.asarray(beta, dtype=float)
    alpha = np.sqrt(np.clip(1.0 - beta**2, 0.0, None))
    c, s = np.cos(np.asarray(phi) / 2), np.sin(np.asarray(phi) / 2)
    return (alpha**2 - beta**2 + (alpha * c) ** 2 - (beta * s) ** 2
            - (alpha * c + beta * s) ** 2)


@dataclass(frozen=True)
class LgiOptimum:
    beta: float
    phi: float
    B_mean: float


@dataclass(frozen=True)
class LgiSearch:
    max_B: float
    optima: tuple[LgiOptimum, ...]
    min_B: float
    grid_shape: tuple[int, int]


def _bounded_max(fun, lo, hi, tol):
    res = minimize_scalar(lambda x: -fun(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": tol})
    return float(res.x), float(-res.fun)


def lgi_search(n_beta: int = 400, n_phi: int = 400, refine_tol: float = 1e-10) -> LgiSearch:
    """Grid search over real ``beta in [-1, 1]``, ``phi in [0, 2 pi)`` followed by
    nested bounded scalar refinement (outer over ``beta``, inner over ``phi``).

    Every distinct local maximum of the grid that refines to the global value
    is reported, so symmetric optima on both signs of ``beta`` all appear.
    """
    betas = np.linspace(-1.0, 1.0, n_beta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    grid = qubit_lgi(betas[:, None], phis[None, :])
    db, dp = betas[1] - betas[0], phis[1] - phis[0]

    def best_phi(beta, p0):
        return _bounded_max(lambda p: float(qubit_lgi(beta, p)), p0 - dp, p0 + dp, refine_tol)

    # seed refinement from the best grid point in each beta half
    seeds = []
    for mask in (betas < 0, betas > 0):
        sub = np.where(mask[:, None], grid, -np.inf)
        i, j = np.unravel_index(np.argmax(sub), grid.shape)
        seeds.append((betas[i], phis[j]))
    found = []
    for b0, p0 in seeds:
        b, val = _bounded_max(lambda b: best_phi(b, p0)[1], b0 - db, b0 + db, refine_tol)
        p, val = best_phi(b, p0)
        found.append(LgiOptimum(b, float(np.mod(p, 2 * np.pi)), val))
    top = max(o.B_mean for o in found)
    optima = tuple(o for o in found if o.B_mean >= top - 1e-9)
    return LgiSearch(top, optima, float(grid.min()), grid.shape)


def analytic_lgi_optimum() -> tuple[float, float]:
    """Closed-form maximum ``1 - 3 beta^2 + |beta|`` at ``|beta| = 1/6``."""
    return 13.0 / 12.0, 1.0 / 6.0


def lgi_qubit_report(beta: float, phi: float) -> LgiReport:
    s, f = qubit_states(beta, phi)
    return lgi_value(s, SIGMA_Z, f)
