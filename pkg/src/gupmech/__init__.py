"""Bounds on the generalized-uncertainty parameter beta0 from macroscopic oscillators."""
from .constants import CODATA, PhysicalConstants
from .physics import (GupModel, OscillatorSpec, OscillatorState, beta0_upper_bound,
                      gup_frequency_shift, min_position_uncertainty, secular_shift_oracle)

__version__ = "0.1.0"

__all__ = [
    "CODATA", "GupModel", "OscillatorSpec", "OscillatorState", "PhysicalConstants",
    "beta0_upper_bound", "gup_frequency_shift", "min_position_uncertainty",
    "secular_shift_oracle", "__version__",
]
