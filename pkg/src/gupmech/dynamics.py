"""Time-domain simulation of the damped, GUP-perturbed oscillator."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .constants import CODATA, PhysicalConstants
from .noise import NoiseSpec, fractional_frequency_samples
from .physics import GupModel, OscillatorSpec, OscillatorState
from .timeseries import TimeSeries

MIN_OVERSAMPLING = 4.0
DEFAULT_OVERSAMPLING = 16.0


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DampingModel:
    """Momentum damping p' = ... - gamma p; amplitude decays as exp(-gamma t / 2)."""

    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")

    @classmethod
    def from_decay_time(cls, amplitude_decay_time: float) -> "DampingModel":
        if not amplitude_decay_time > 0:
            raise ValueError("amplitude_decay_time must be > 0")
        return cls(2.0 / amplitude_decay_time)

    @classmethod
    def from_oscillator(cls, osc: OscillatorSpec) -> "DampingModel":
        return cls(osc.gamma)

    @property
    def amplitude_decay_time(self) -> float:
        return math.inf if self.gamma == 0 else 2.0 / self.gamma


UNDAMPED = DampingModel(0.0)


def _quartic_velocity_coefficient(osc, gup, constants):
    # d/dp of beta0 p^4 / (3 m (Mp c)^2)
    return 4.0 * gup.beta0 / (3.0 * osc.m_eff * constants.planck_momentum**2)


def equations_of_motion(state: OscillatorState, osc: OscillatorSpec, gup: GupModel,
                        damping: DampingModel, constants: PhysicalConstants = CODATA
                        ) -> tuple[float, float]:
    """(dx/dt, dp/dt) from Hamilton's equations plus momentum damping."""
    k3 = _quartic_velocity_coefficient(osc, gup, constants)
    p = state.p
    xdot = p / osc.m_eff + k3 * p**3
    pdot = -osc.m_eff * osc.omega0**2 * state.x - damping.gamma * p
    return xdot, pdot


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    n_steps: int = 0

    def __len__(self):
        return self.t.size

    def __getitem__(self, i) -> OscillatorState:
        return OscillatorState(float(self.x[i]), float(self.p[i]), float(self.t[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def integrate_trajectory(initial: OscillatorState, osc: OscillatorSpec, gup: GupModel,
                         damping: DampingModel, duration: float, rtol: float = 1e-10,
                         sample_rate: float | None = None, times=None,
                         stiffness_modulation=None, max_steps: int = 500_000_000,
                         constants: PhysicalConstants = CODATA) -> Trajectory:
    """Adaptive Dormand-Prince integration, output at uniform or given times.

    Output times default to ``DEFAULT_OVERSAMPLING`` samples per unperturbed
    cycle, including both endpoints.  ``stiffness_modulation`` is an optional
    per-output-interval fractional frequency offset y (the restoring force
    uses (W0 (1 + y))^2 on that interval).

    Raises IntegrationError if the step size underflows.
    """
    if not duration > 0:
        raise ValueError(f"duration must be > 0, got {duration!r}")
    if not rtol > 0:
        raise ValueError("rtol must be > 0")
    if times is None:
        if sample_rate is None:
            sample_rate = DEFAULT_OVERSAMPLING * osc.f0
        n = int(round(duration * sample_rate))
        times = initial.t + np.arange(n + 1) / sample_rate
    else:
        times = np.asarray(times, dtype=float)
        if times[0] != initial.t or np.any(np.diff(times) <= 0):
            raise ValueError("times must start at initial.t and increase strictly")
    w2 = np.full(times.size, osc.omega0**2)
    if stiffness_modulation is not None:
        y = np.asarray(stiffness_modulation, dtype=float)
        w2[: y.size] = (osc.omega0 * (1.0 + y[: times.size])) ** 2

    m = osc.m_eff
    energy = 0.5 * initial.p**2 / m + 0.5 * m * osc.omega0**2 * initial.x**2
    xref = math.sqrt(2 * energy / m) / osc.omega0 if energy > 0 else 1.0
    pref = math.sqrt(2 * energy * m) if energy > 0 else 1.0
    period = 2 * math.pi / osc.omega0
    hmin = 1e-13 * period
    k3 = _quartic_velocity_coefficient(osc, gup, constants)
    xs, ps, status, t_fail, steps = _kernel.integrate_gup(
        float(initial.x), float(initial.p), times, w2, m, float(damping.gamma), k3,
        float(rtol), xref, pref, hmin, int(max_steps))
    if status == _kernel.STATUS_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow (< {hmin:.3g} s) at t = {t_fail:.9g} s after {steps} steps; "
            f"rtol = {rtol:g} is likely below round-off for this problem")
    if status == _kernel.STATUS_MAXSTEPS:
        raise IntegrationError(f"exceeded {max_steps} steps at t = {t_fail:.9g} s")
    return Trajectory(times, xs, ps, steps)


def damped_cosine(osc: OscillatorSpec, damping: DampingModel, amplitude: float, t):
    """Closed-form beta0 = 0 displacement released from rest at x = amplitude."""
    t = np.asarray(t, dtype=float)
    g2 = 0.5 * damping.gamma
    wd = math.sqrt(osc.omega0**2 - g2**2)
    return amplitude * np.exp(-g2 * t) * (np.cos(wd * t) + (g2 / wd) * np.sin(wd * t))


def simulate_ringdown(osc: OscillatorSpec, gup: GupModel, damping: DampingModel,
                      amplitude: float, duration: float, sample_rate: float,
                      noise: NoiseSpec = NoiseSpec(), rtol: float = 1e-10,
                      constants: PhysicalConstants = CODATA) -> TimeSeries:
    """Free decay released from rest at ``amplitude``; displacement samples.

    Additive white noise is added to the samples; fractional-frequency noise
    modulates the oscillator stiffness sample by sample.
    """
    if not amplitude > 0:
        raise ValueError(f"amplitude must be > 0, got {amplitude!r}")
    min_rate = MIN_OVERSAMPLING * osc.f0
    if not sample_rate > min_rate:
        raise ValueError(
            f"sample_rate {sample_rate:g} Hz too low: need > {min_rate:g} Hz "
            f"({MIN_OVERSAMPLING:g} x the {osc.f0:g} Hz resonance)")
    n = int(round(duration * sample_rate))
    if n < 1:
        raise ValueError("duration shorter than one sample")
    times = np.arange(n) / sample_rate
    modulation = None
    if noise.has_frequency_noise:
        modulation = fractional_frequency_samples(noise, n, sample_rate)
    if n == 1:
        x = np.array([amplitude])
    else:
        traj = integrate_trajectory(OscillatorState(amplitude, 0.0, 0.0), osc, gup, damping,
                                    duration, rtol=rtol, times=times,
                                    stiffness_modulation=modulation, constants=constants)
        x = traj.x
    if noise.additive_white_rms > 0:
        g_add, _, _ = noise.generators()
        x = x + noise.additive_white_rms * g_add.standard_normal(n)
    return TimeSeries(sample_rate, x, 0.0, "displacement", noise.seed)
