"""Krotov-optimized adiabatic protocols for open quantum systems."""

from .dynamics import (ControlSet, TimeGrid, Trajectory, liouvillian,
                       populations, propagate)
from .fidelity import (RandomQubitState, mean_teleport_fidelity,
                       sample_random_state, swap_operator, uhlmann_fidelity)
from .krotov import (KrotovOptions, OptimizationResult, backward_costate,
                     initial_guess, krotov_update, optimize)
from .linalg import hermitian_eig, hermitian_sqrt, kron, matrix_exp
from .models import (NoiseChannel, ProtocolSpec, build_aep, build_atp,
                     build_channel, embed, pauli)

__version__ = "0.1.0"

__all__ = [
    "ControlSet", "TimeGrid", "Trajectory", "liouvillian", "populations",
    "propagate", "RandomQubitState", "mean_teleport_fidelity",
    "sample_random_state", "swap_operator", "uhlmann_fidelity",
    "KrotovOptions", "OptimizationResult", "backward_costate",
    "initial_guess", "krotov_update", "optimize", "hermitian_eig",
    "hermitian_sqrt", "kron", "matrix_exp", "NoiseChannel", "ProtocolSpec",
    "build_aep", "build_atp", "build_channel", "embed", "pauli",
    "__version__",
]
