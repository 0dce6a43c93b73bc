"""beta0 upper limits from the different measurement routes, and their summary."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import CODATA, PhysicalConstants
from .fits import FitResult
from .physics import OscillatorSpec, beta0_upper_bound

METHODS = ("null-shift", "regression", "duffing-fit", "pendulum")


@dataclass(frozen=True)
class BoundReport:
    method: str
    beta0_upper: float
    label: str
    mass: float
    confidence_note: str = ""
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.beta0_upper > 0):
            raise ValueError(f"beta0_upper must be > 0, got {self.beta0_upper!r}")
        if not (self.mass > 0):
            raise ValueError(f"mass must be > 0, got {self.mass!r}")


def _osc_inputs(osc: OscillatorSpec) -> dict:
    return {"label": osc.label, "m_eff": osc.m_eff, "omega0": osc.omega0,
            "quality_factor": osc.quality_factor}


def beta0_bound_null(osc: OscillatorSpec, max_amplitude: float, shift_resolution: float,
                     constants: PhysicalConstants = CODATA) -> BoundReport:
    """Limit from a null frequency shift at the largest amplitude reached."""
    gup = beta0_upper_bound(osc, max_amplitude, shift_resolution, constants)
    return BoundReport(
        "null-shift", gup.beta0, osc.label, osc.m_eff,
        "no shift observed within the stated resolution; limit from the closed-form "
        "amplitude-frequency relation",
        {"oscillator": _osc_inputs(osc), "amplitude": max_amplitude,
         "shift_resolution": shift_resolution})


def beta0_bound_regression(fit: FitResult, osc: OscillatorSpec) -> BoundReport:
    """Two-sigma limit from an amplitude-frequency regression fitted with ``osc``."""
    if "beta0_upper" not in fit.parameters:
        raise ValueError("regression fit carries no beta0; refit with the oscillator spec")
    return BoundReport(
        "regression", fit["beta0_upper"], osc.label, osc.m_eff,
        "2-sigma upper edge of the weighted frequency-vs-amplitude^2 slope",
        {"oscillator": _osc_inputs(osc),
         "amplitude": fit.info.get("max_amplitude", math.nan),
         "shift_resolution": 2 * fit.sigma("shift_at_max_amplitude"),
         "quadratic_coefficient": fit["quadratic_coefficient"],
         "quadratic_coefficient_sigma": fit.sigma("quadratic_coefficient")})


def beta0_bound_duffing(fit: FitResult, osc: OscillatorSpec) -> BoundReport:
    mode = "amplitudes and frequencies" if fit.info.get("use_frequency", True) else "amplitudes only"
    return BoundReport(
        "duffing-fit", fit["beta0_upper"], osc.label, osc.m_eff,
        f"2-sigma upper edge of a simulation-in-the-loop fit to ringdown {mode}",
        {"oscillator": _osc_inputs(osc), "beta0_best": fit["beta0_best"],
         "beta0_sigma": fit.sigma("beta0_best")})


def beta0_bound_pendulum(fit: FitResult, label: str, mass: float, length: float) -> BoundReport:
    return BoundReport(
        "pendulum", fit["beta0_upper"], label, mass,
        "estimate: period data carry no frequency-stability or suspension systematics, "
        "so this is not a rigorous limit",
        {"mass": mass, "length": length, "T0_fitted": fit["T0_fitted"],
         "beta0_best": fit["beta0_best"], "beta0_sigma": fit.sigma("beta0_best")})


@dataclass(frozen=True)
class SummaryRow:
    mass: float
    beta0_upper: float
    label: str
    kind: str = "computed"


def summary_plot_data(reports, annotations=()) -> list[SummaryRow]:
    """Rows sorted by mass (stable), literature annotations included.

    ``annotations`` are mappings with ``mass``, ``beta0_upper`` and ``label``.
    Nothing is deduplicated.
    """
    rows = [SummaryRow(r.mass, r.beta0_upper, r.label) for r in reports]
    if not rows:
        raise ValueError("need at least one bound report")
    for a in annotations:
        rows.append(SummaryRow(float(a["mass"]), float(a["beta0_upper"]), str(a["label"]),
                               "literature"))
    return sorted(rows, key=lambda r: r.mass)
