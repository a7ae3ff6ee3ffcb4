"""Quantum measurement theory in the density-matrix formalism.

Modules
-------
qcore        states, observables, partial traces and numerical tolerances
projective   Born probabilities, Lüders updates and the ABL rule
ancilla      pre-measurements, measurement operators and effects
meters       Gaussian (von Neumann) pointer on a grid and the qubit meter
weakpost     weak measurement, weak values and post-selected pointers
scenarios    Leggett-Garg, three boxes, spin-100, wave-function
             reconstruction, two-slit trajectories, Zeno and Lindblad
cli          ``qmeas run`` / ``qmeas sweep``
"""
from importlib.metadata import PackageNotFoundError, version

from .qcore import (
    DEFAULT_NUMERICS,
    DimensionError,
    NumericalContractError,
    Numerics,
    Observable,
    ZeroProbabilityError,
    density,
    ket,
    kron,
    partial_trace,
)

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

__all__ = [
    "DEFAULT_NUMERICS",
    "DimensionError",
    "NumericalContractError",
    "Numerics",
    "Observable",
    "ZeroProbabilityError",
    "density",
    "ket",
    "kron",
    "partial_trace",
    "__version__",
]
