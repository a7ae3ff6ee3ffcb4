"""Post-selections that push the weak value of ``sigma_z`` to a chosen target."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..meters import GaussianPointer
from ..qcore import SIGMA_Z, check_ket, normalize
from ..weakpost import WeakSetup, pointer_readout_weak, weak_value


class UnreachableTargetError(ValueError):
    """No post-selection produces the requested weak value."""


def target_post_state(s, target: float, obs=SIGMA_Z, tol: float = 1e-12) -> np.ndarray:
    """Qubit ``|f>`` with ``<f|S|s> / <f|s> = target``.

    The condition is ``<f| (S - W) |s> = 0``, so ``|f>`` is the state
    orthogonal to ``(S - W)|s>``. It fails only when ``|s>`` is an
    eigenvector of ``S`` with eigenvalue other than ``W``.
    """
    s = check_ket(s, name="pre-selected state")
    if s.size != 2:
        raise ValueError("target_post_state handles qubits only")
    v = (np.asarray(obs) - target * np.eye(2)) @ s
    if np.linalg.norm(v) <= tol:
        return s.copy()          # s is an eigenvector with eigenvalue W
    f = normalize(np.array([np.conj(v[1]), -np.conj(v[0])]))
    if abs(np.vdot(f, s)) <= tol:
        raise UnreachableTargetError(
            f"weak value {target} is unreachable: the pre-selected state is an eigenvector")
    return f


def real_angle_for_target(a: float, target: float) -> float:
    """For ``|s> = (cos a, sin a)`` return ``b`` with ``|f> = (cos b, sin b)``
    giving ``cos(a + b) / cos(a - b) = target``.

    Solves ``tan b = (1 - W) / ((1 + W) tan a)`` in closed form.
    """
    return float(np.arctan2(1.0 - target, (1.0 + target) * np.tan(a)))


@dataclass(frozen=True)
class SpinTargetResult:
    post: np.ndarray
    weak_value: complex
    coupling: float
    width: float
    fQ_over_g: float         # exact post-selected pointer mean / g
    prob_post: float
    breakdown_halfwidth: float  # angular distance from orthogonality where g|S_w| = width


def spin_target(s, target: float = 100.0, width: float = 1.0, coupling: float | None = None,
                n: int = 1024) -> SpinTargetResult:
    """Construct ``|f>`` for ``(sigma_z)_w = target`` and check it with a Gaussian pointer.

    The default coupling puts the amplified shift at ``g |W| = 0.1 width``,
    inside the window where the first-order readout holds.
    ``breakdown_halfwidth`` measures the narrow band of post-selections
    ``cos(d) f_perp + sin(d) s`` around exact orthogonality in which
    ``g |S_w|`` exceeds the pointer width and the weak picture fails.
    """
    s = check_ket(s, name="pre-selected state")
    f = target_post_state(s, target)
    sw = weak_value(s, SIGMA_Z, f)
    g = 0.1 * width / max(abs(target), 1.0) if coupling is None else float(coupling)
    setup = WeakSetup(s, SIGMA_Z, f, GaussianPointer.default(width, g, 1.0, n))
    readout = pointer_readout_weak(setup)
    prob = float(abs(np.vdot(f, s)) ** 2)

    f_perp = normalize(np.array([-np.conj(s[1]), np.conj(s[0])]))
    lever = abs(np.vdot(f_perp, SIGMA_Z @ s))

    def excess(d):
        fd = np.cos(d) * f_perp + np.sin(d) * s
        return g * abs(np.vdot(fd, SIGMA_Z @ s)) / abs(np.vdot(fd, s)) - width

    if lever == 0 or excess(np.pi / 2) > 0:
        band = float("nan")
    else:
        band = float(brentq(excess, 1e-15, np.pi / 2, xtol=1e-15))
    return SpinTargetResult(f, sw, g, width, readout.exact_Q / g, prob, band)
