"""Fundamental constants and the Planck scales derived from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar [J s], c [m/s], G [m^3 kg^-1 s^-2] plus derived Planck scales.

    The derived fields are computed from the three inputs and cannot be
    passed to the constructor.
    """

    hbar: float = 1.054571817e-34
    c: float = 2.99792458e8
    G: float = 6.67430e-11
    planck_mass: float = field(init=False)
    planck_length: float = field(init=False)
    planck_momentum: float = field(init=False)

    def __post_init__(self):
        for name in ("hbar", "c", "G"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
        mp = math.sqrt(self.hbar * self.c / self.G)
        object.__setattr__(self, "planck_mass", mp)
        object.__setattr__(self, "planck_length", math.sqrt(self.hbar * self.G / self.c**3))
        object.__setattr__(self, "planck_momentum", mp * self.c)


CODATA = PhysicalConstants()
