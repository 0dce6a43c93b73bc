"""GUP-deformed harmonic oscillator: closed-form frequency shift and bounds.

The deformed commutator ``[x, p] = i hbar (1 + beta0 (p / Mp c)^2)`` is mapped
to a canonical oscillator with an extra quartic momentum term

    H = p^2 / 2m + m W0^2 x^2 / 2 + beta0 p^4 / (3 m (Mp c)^2)

and the resulting amplitude-frequency effect is what every bound in this
package is built on.  Two versions of the relative shift are exposed:
``gup_frequency_shift`` is the standard bound formula (used for every
reported limit), ``secular_shift_oracle`` is first-order averaging of the
quartic term over one harmonic cycle and is exactly half of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CODATA, PhysicalConstants


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class GupModel:
    """Dimensionless correction strength beta0 (one-sided, so >= 0)."""

    beta0: float = 0.0

    def __post_init__(self):
        _check_finite("beta0", self.beta0)
        if self.beta0 < 0:
            raise ValueError(f"beta0 must be >= 0, got {self.beta0!r}")


@dataclass(frozen=True)
class OscillatorSpec:
    """A single mechanical mode.

    ``omega0`` is angular (rad/s); the angular linewidth ``gamma`` is derived
    as ``omega0 / quality_factor``.
    """

    label: str
    m_eff: float
    omega0: float
    quality_factor: float

    def __post_init__(self):
        for name in ("m_eff", "omega0", "quality_factor"):
            value = getattr(self, name)
            _check_finite(name, value)
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")

    @classmethod
    def from_frequency(cls, label: str, m_eff: float, f0: float,
                       quality_factor: float) -> "OscillatorSpec":
        return cls(label, m_eff, 2 * math.pi * f0, quality_factor)

    @classmethod
    def from_linewidth(cls, label: str, m_eff: float, omega0: float,
                       gamma: float) -> "OscillatorSpec":
        if gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {gamma!r}")
        return cls(label, m_eff, omega0, omega0 / gamma)

    @property
    def gamma(self) -> float:
        return self.omega0 / self.quality_factor

    @property
    def f0(self) -> float:
        return self.omega0 / (2 * math.pi)


@dataclass(frozen=True)
class OscillatorState:
    x: float
    p: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("x", "p", "t"):
            _check_finite(name, getattr(self, name))


def momentum_ratio(osc: OscillatorSpec, amplitude: float,
                   constants: PhysicalConstants = CODATA) -> float:
    """Momentum amplitude ``m_eff W0 A`` in units of ``Mp c``."""
    return osc.m_eff * osc.omega0 * amplitude / constants.planck_momentum


def gup_frequency_shift(osc: OscillatorSpec, gup: GupModel, amplitude: float,
                        constants: PhysicalConstants = CODATA) -> float:
    """Relative shift dW/W0 = beta0 (m_eff W0 A / Mp c)^2."""
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude!r}")
    return gup.beta0 * momentum_ratio(osc, amplitude, constants) ** 2


def beta0_upper_bound(osc: OscillatorSpec, amplitude: float, shift_resolution: float,
                      constants: PhysicalConstants = CODATA) -> GupModel:
    """Largest beta0 whose predicted shift stays below ``shift_resolution``.

    Exact inverse of :func:`gup_frequency_shift`.
    """
    if not amplitude > 0:
        raise ValueError(f"amplitude must be > 0 for a bound, got {amplitude!r}")
    if not shift_resolution > 0:
        raise ValueError(f"shift_resolution must be > 0, got {shift_resolution!r}")
    return GupModel(shift_resolution / momentum_ratio(osc, amplitude, constants) ** 2)


def perturbed_hamiltonian(state: OscillatorState, osc: OscillatorSpec, gup: GupModel,
                          constants: PhysicalConstants = CODATA) -> float:
    m, p, x = osc.m_eff, state.p, state.x
    quartic = gup.beta0 * p**4 / (3 * m * constants.planck_momentum**2)
    return p * p / (2 * m) + 0.5 * m * osc.omega0**2 * x * x + quartic


def secular_shift_oracle(osc: OscillatorSpec, gup: GupModel, amplitude: float,
                         constants: PhysicalConstants = CODATA) -> float:
    """First-order averaged shift of the quartic momentum term.

    With p = -m W0 A sin(W0 t) the cycle average is <p^4> = 3/8 (m W0 A)^4,
    and dW = d<dH>/dI at fixed action I = E / W0 gives
    dW/W0 = (beta0 / 2) (m W0 A / Mp c)^2.  This is the shift an integrated
    trajectory actually shows.
    """
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude!r}")
    return 0.5 * gup.beta0 * momentum_ratio(osc, amplitude, constants) ** 2


def beta0_for_secular_shift(osc: OscillatorSpec, amplitude: float, shift: float,
                            constants: PhysicalConstants = CODATA) -> GupModel:
    """beta0 that makes the averaged (simulated) shift equal ``shift`` at ``amplitude``."""
    return GupModel(2 * beta0_upper_bound(osc, amplitude, shift, constants).beta0)


def min_position_uncertainty(gup: GupModel, constants: PhysicalConstants = CODATA) -> float:
    """Smallest resolvable length hbar sqrt(beta0) / (Mp c)."""
    return constants.hbar * math.sqrt(gup.beta0) / constants.planck_momentum
