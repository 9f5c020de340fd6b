"""Spiking macrocolumn simulator with an exact state-machine oracle."""

from .column import ControlInputs, Dimensions, Macrocolumn, StepOutputs, select_c, select_d
from .kernels import BACKEND
from .neural import SdpParams
from .reference import RefEdge, RefInputs, RefMemory, RefModel, Symbols

__all__ = [
    "BACKEND", "ControlInputs", "Dimensions", "Macrocolumn", "RefEdge", "RefInputs",
    "RefMemory", "RefModel", "SdpParams", "StepOutputs", "Symbols", "select_c", "select_d",
]
__version__ = "0.1.0"
