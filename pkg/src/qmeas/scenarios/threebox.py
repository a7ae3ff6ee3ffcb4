"""Three boxes A, B, C with a particle pre-selected in the uniform superposition.

Post-selection is the one-parameter family
``|f(theta)> = sin(theta) (|A> + |B>)/sqrt(2) + cos(theta) |C>``; the
canonical ``(|A> + |B> - |C>)/sqrt(3)`` is ``theta = pi - arctan(sqrt(2))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..meters import GaussianPointer
from ..projective import abl_probability
from ..qcore import ZeroProbabilityError, projector
from ..weakpost import WeakSetup, pointer_readout_weak, weak_value

BOXES = ("A", "B", "C")
PRE_STATE = np.ones(3, dtype=complex) / np.sqrt(3)
CANONICAL_THETA = float(np.pi - np.arctan(np.sqrt(2.0)))


def box_projector(box: str) -> np.ndarray:
    e = np.zeros(3, dtype=complex)
    e[BOXES.index(box)] = 1.0
    return projector(e)


def post_state(theta: float) -> np.ndarray:
    st = np.sin(theta) / np.sqrt(2.0)
    return np.array([st, st, np.cos(theta)], dtype=complex)


def weak_value_C_closed_form(theta: float) -> float:
    """``(Pi_C)_w = 1 / (sqrt(2) tan(theta) + 1)``."""
    return float(1.0 / (np.sqrt(2.0) * np.tan(theta) + 1.0))


@dataclass(frozen=True)
class ThreeBoxReport:
    theta: float
    post: np.ndarray
    abl: dict            # box -> probability of finding the particle there
    weak: dict           # box -> (Pi_box)_w
    weak_sum: complex
    weak_C_closed_form: float
    coupling: float
    pointer_P: float     # exact post-selected <P> of the meter

    @property
    def pointer_P_over_g(self) -> float:
        return self.pointer_P / self.coupling


def three_box(theta: float | None = None, coupling: float = 0.01, width: float = 1.0,
              n: int = 1024, floor: float = 1e-12) -> ThreeBoxReport:
    """ABL probabilities, weak values and a simulated pointer for ``|f(theta)>``.

    The pointer is the momentum ``P`` of a probe coupled through
    ``g Pi_C (x) X``; on the grid this is the von Neumann construction with
    the grid variable read as momentum, so ``<P> = g (Pi_C)_w + O(g^3)``.
    ``abl`` is only filled for boxes whose ABL rule is defined.
    """
    theta = CANONICAL_THETA if theta is None else float(theta)
    f = post_state(theta)
    if abs(np.vdot(f, PRE_STATE)) <= floor:
        raise ZeroProbabilityError("post-selection is orthogonal to the pre-selected state")
    abl, weak = {}, {}
    for box in BOXES:
        proj = box_projector(box)
        try:
            abl[box] = abl_probability(PRE_STATE, proj, f).probability(1.0)
        except ZeroProbabilityError:
            abl[box] = float("nan")
        weak[box] = weak_value(PRE_STATE, proj, f, floor)
    setup = WeakSetup(PRE_STATE, box_projector("C"), f,
                      GaussianPointer.default(width, coupling, 1.0, n), floor)
    readout = pointer_readout_weak(setup)
    return ThreeBoxReport(theta, f, abl, weak, complex(sum(weak.values())),
                          weak_value_C_closed_form(theta), coupling, readout.exact_Q)
