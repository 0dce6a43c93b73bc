"""Readout chain: frequency-discriminator lineshape and displacement calibration."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .timeseries import TimeSeries


@dataclass(frozen=True)
class TransducerSpec:
    """Calibration of the parametric readout.

    transduction_constant is dx/du in m/V; discriminator_slope is du/df in
    V/Hz, and the displacement-to-frequency factor df/dx follows from the two
    since du/dx = (du/df)(df/dx).
    """

    transduction_constant: float
    discriminator_slope: float = 1.0
    mixing_angle_deg: float = 0.0
    drive_coupling: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.transduction_constant) and self.transduction_constant > 0):
            raise ValueError("transduction_constant must be > 0")
        if not (math.isfinite(self.discriminator_slope) and self.discriminator_slope > 0):
            raise ValueError("discriminator_slope must be > 0")
        if not 0.0 <= self.mixing_angle_deg < 90.0:
            raise ValueError(f"mixing_angle_deg must be in [0, 90), got {self.mixing_angle_deg!r}")

    @property
    def displacement_to_frequency(self) -> float:
        return 1.0 / (self.transduction_constant * self.discriminator_slope)


def ifd_response(freq, center: float, linewidth: float, mixing_angle_deg: float,
                 scale: float = 1.0) -> np.ndarray:
    """Mixed absorptive/dispersive Lorentzian; ``linewidth`` is the FWHM in Hz."""
    if not linewidth > 0:
        raise ValueError(f"linewidth must be > 0, got {linewidth!r}")
    half = 0.5 * linewidth
    d = np.asarray(freq, dtype=float) - center
    denom = d * d + half * half
    theta = math.radians(mixing_angle_deg)
    return scale * (math.cos(theta) * half * half + math.sin(theta) * half * d) / denom


def transduce(displacement: TimeSeries, spec: TransducerSpec) -> TimeSeries:
    if displacement.channel != "displacement":
        raise ValueError(f"expected a displacement series, got {displacement.channel!r}")
    return displacement.with_values(displacement.values / spec.transduction_constant, "voltage")


def to_displacement(voltage: TimeSeries, spec: TransducerSpec) -> TimeSeries:
    if voltage.channel != "voltage":
        raise ValueError(f"expected a voltage series, got {voltage.channel!r}")
    return voltage.with_values(voltage.values * spec.transduction_constant, "displacement")


def drive_response(power_modulation: float, spec: TransducerSpec) -> float:
    """IFD voltage for modulated drive power dP: chi (du/df) (df/dx)^2 dP."""
    if power_modulation < 0:
        raise ValueError("power_modulation must be >= 0")
    return (spec.drive_coupling * spec.discriminator_slope
            * spec.displacement_to_frequency**2 * power_modulation)
