"""End-to-end stages shared by the command line, sweeps and scripts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (BoundReport, beta0_bound_duffing, beta0_bound_null, beta0_bound_pendulum,
                     beta0_bound_regression)
from .config import ConfigError, ExperimentConfig, require
from .dynamics import simulate_ringdown
from .fits import (FitResult, duffing_fit, fit_amplitude_frequency, fit_exponential_decay,
                   fit_lineshape, quality_factor_check)
from .pendulum import PeriodDataset, fit_pendulum_beta0, read_period_csv, synthetic_dataset
from .timeseries import TimeSeries
from .tracking import RingdownRecord, track_spectral_peak, track_zero_crossings
from .transducer import ifd_response, transduce


def simulate(cfg: ExperimentConfig, full_scale: bool = False) -> TimeSeries:
    """Seeded ringdown; voltage at the discriminator output when a transducer is configured."""
    require(cfg, "oscillator", "run")
    run = cfg.run
    series = simulate_ringdown(cfg.oscillator, cfg.gup, cfg.damping, run.amplitude,
                               cfg.resolved_duration(full_scale), cfg.resolved_sample_rate(),
                               cfg.noise, rtol=run.rtol)
    if cfg.transducer is not None:
        series = transduce(series, cfg.transducer)
    return series


def simulate_lineshape(cfg: ExperimentConfig):
    """Swept-frequency discriminator response with Gaussian noise relative to the scale."""
    ls = cfg.lineshape
    offsets = np.linspace(-0.5, 0.5, ls.points) * ls.span_linewidths * ls.linewidth
    freq = ls.center + offsets
    volts = ifd_response(freq, ls.center, ls.linewidth, ls.mixing_angle_deg, ls.scale)
    if ls.noise_rel > 0:
        # a fourth child of the noise seed, independent of the ringdown streams
        child = np.random.SeedSequence(cfg.noise.seed).spawn(4)[3]
        volts = volts + ls.noise_rel * ls.scale * np.random.default_rng(child).standard_normal(
            ls.points)
    return freq, volts


def amplitude_scale(series: TimeSeries, cfg: ExperimentConfig) -> float:
    """Metres per record unit."""
    if series.channel == "displacement":
        return 1.0
    if series.channel == "voltage":
        if cfg.transducer is None:
            raise ConfigError(f"{cfg.source}: transducer: required to analyse a voltage series")
        return cfg.transducer.transduction_constant
    raise ConfigError(f"cannot analyse a {series.channel} series as a ringdown")


def track(series: TimeSeries, cfg: ExperimentConfig) -> RingdownRecord:
    run = cfg.run
    if run.tracker == "zero_crossing":
        return track_zero_crossings(series, run.window_cycles)
    return track_spectral_peak(series, run.bin_duration, run.resolution_bandwidth)


@dataclass
class AnalysisOutcome:
    record: RingdownRecord | None
    amplitude_scale: float
    fits: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return not self.failures and all(f.converged for f in self.fits.values())

    def stages(self) -> dict:
        out = {name: {"converged": bool(f.converged), "message": f.message}
               for name, f in self.fits.items()}
        for name, msg in self.failures.items():
            out[name] = {"converged": False, "message": msg}
        return out


def _default_resolution(cfg: ExperimentConfig) -> float:
    run = cfg.run
    if run.tracker == "zero_crossing":
        return 1.0 / run.window_cycles
    return run.resolution_bandwidth / cfg.oscillator.f0


def analyze(series: TimeSeries, cfg: ExperimentConfig, lineshape=None) -> AnalysisOutcome:
    """Tracker, exponential fit, amplitude-frequency regression, bounds.

    Each stage that fails is recorded and the remaining stages still run
    where their inputs exist.
    """
    require(cfg, "oscillator", "run")
    osc, settings = cfg.oscillator, cfg.analysis
    scale = amplitude_scale(series, cfg)
    out = AnalysisOutcome(None, scale)
    try:
        out.record = record = track(series, cfg)
    except ValueError as exc:
        out.failures["tracking"] = str(exc)
        return out

    out.fits["exponential"] = exp_fit = fit_exponential_decay(record.scaled(scale), osc.omega0)
    out.fits["regression"] = reg = fit_amplitude_frequency(
        record, osc, scale, settings.intrinsic_coefficient)

    max_amp = settings.max_amplitude or float(np.max(record.amplitudes) * scale)
    resolution = settings.shift_resolution or _default_resolution(cfg)
    out.bounds["null-shift"] = beta0_bound_null(osc, max_amp, resolution)
    if reg.converged:
        try:
            out.bounds["regression"] = beta0_bound_regression(reg, osc)
        except ValueError as exc:
            out.failures["regression-bound"] = str(exc)

    if settings.duffing_fit:
        duff = duffing_fit(record, osc, cfg.damping, amplitude_scale=scale,
                           use_frequency=not settings.duffing_amplitude_only,
                           tracker=cfg.run.tracker)
        out.fits["duffing"] = duff
        if duff.converged and math.isfinite(duff["beta0_upper"]):
            out.bounds["duffing-fit"] = beta0_bound_duffing(duff, osc)

    if lineshape is not None:
        out.fits["lineshape"] = ls = fit_lineshape(*lineshape)
        if ls.converged and exp_fit.converged:
            out.checks["quality_factor"] = quality_factor_check(
                ls["f0"], exp_fit["tau_a"], ls["linewidth"])
    return out


def pendulum_dataset(cfg: ExperimentConfig, path=None) -> PeriodDataset:
    require(cfg, "pendulum")
    p = cfg.pendulum
    path = path or p.data
    if path:
        return read_period_csv(path)
    syn = p.synthetic
    return synthetic_dataset(p.spec, float(syn.get("beta0", 0.0)), int(syn.get("n", 20)),
                             float(syn.get("theta_min_deg", 1.0)),
                             float(syn.get("theta_max_deg", 10.0)),
                             float(syn.get("sigma_rel", 1e-6)), syn.get("seed", 0))


def pendulum_bound(cfg: ExperimentConfig, data: PeriodDataset) -> tuple[FitResult, BoundReport | None]:
    p = cfg.pendulum
    fit = fit_pendulum_beta0(p.spec, data)
    report = None
    if fit.converged and math.isfinite(fit["beta0_upper"]) and fit["beta0_upper"] > 0:
        report = beta0_bound_pendulum(fit, p.label, p.spec.mass, p.spec.length)
    return fit, report
