"""Symmetric-extension tests for separability of multipartite quantum states."""

from .dps import ExtensionSpec, Verdict, Witness, check_extendible, threshold_scan
from .sdp import SdpProblem, SolverOptions, solve
from .states import DensityMatrix, load_state, make_family, save_state

__all__ = [
    "DensityMatrix",
    "ExtensionSpec",
    "SdpProblem",
    "SolverOptions",
    "Verdict",
    "Witness",
    "check_extendible",
    "load_state",
    "make_family",
    "save_state",
    "solve",
    "threshold_scan",
]
__version__ = "0.1.0"
