"""Worked applications built on the measurement primitives."""
from .dynamics import (
    LindbladModel,
    LindbladTolerances,
    StepSizeError,
    ZenoRow,
    RepeatedRow,
    ancilla_slice,
    channel_superoperator,
    dephasing_closed_form,
    fit_inverse_n,
    lindblad_from_repeated,
    lindblad_integrate,
    repeated_ancilla_evolution,
    zeno_sweep,
)
from .lgi import LgiReport, LgiSearch, lgi_qubit_report, lgi_search, lgi_value, qubit_lgi, \
    qubit_states
from .spin import SpinTargetResult, UnreachableTargetError, real_angle_for_target, spin_target, \
    target_post_state
from .threebox import CANONICAL_THETA, ThreeBoxReport, post_state, three_box, \
    weak_value_C_closed_form
from .twoslit import SlitGeometry, TrajectoryEscapeError, TrajectorySet, count_fringes, \
    density_correlation, two_slit_trajectories
from .wavefunction import Reconstruction, exact_weak_values, reconstruct_wavefunction

__all__ = [name for name in dir() if not name.startswith("_")]
