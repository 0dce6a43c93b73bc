"""Fitters for the measurement pipeline.

All of them return a :class:`FitResult`; failures to converge are reported
through ``converged``/``message`` rather than raised, so a pipeline can carry
on with the stages that did work.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import CODATA, PhysicalConstants
from .dynamics import DampingModel, simulate_ringdown
from .lm import levenberg_marquardt
from .physics import GupModel, OscillatorSpec, momentum_ratio
from .tracking import RingdownRecord, track_spectral_peak, track_zero_crossings
from .transducer import ifd_response


@dataclass
class FitResult:
    parameters: dict
    uncertainties: dict
    residual_rms: float
    converged: bool
    message: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if set(self.parameters) != set(self.uncertainties):
            raise ValueError("uncertainty keys must match parameter keys")
        self.parameters = {k: float(v) for k, v in self.parameters.items()}
        self.uncertainties = {k: float(v) for k, v in self.uncertainties.items()}
        self.residual_rms = float(self.residual_rms)
        if not self.residual_rms >= 0 and not math.isnan(self.residual_rms):
            raise ValueError("residual_rms must be >= 0")

    def __getitem__(self, key):
        return self.parameters[key]

    def sigma(self, key):
        return self.uncertainties[key]


def _failed(names, message, info=None):
    nan = {k: math.nan for k in names}
    return FitResult(dict(nan), dict(nan), math.nan, False, message, info or {})


# -- exponential ringdown ----------------------------------------------------

def fit_exponential_decay(record: RingdownRecord, omega_ref: float | None = None) -> FitResult:
    """Least-squares A(t) = A0 exp(-t / tau_a); Q = W tau_a / 2.

    W is ``omega_ref`` if given, otherwise 2 pi times the mean recorded
    frequency.  The decay rate 1/tau_a is the fitted parameter so that a flat
    record is representable (rate 0) and flagged as not converged.
    """
    names = ("A0", "tau_a", "Q")
    t, a = record.times, record.amplitudes
    if t.size < 3:
        return _failed(names, f"need at least 3 entries, got {t.size}")
    span = t[-1] - t[0]
    if t.size < 10:
        warnings.warn(f"exponential fit on only {t.size} entries")
    pos = a > 0
    if pos.sum() >= 2:
        slope, icpt = np.polyfit(t[pos], np.log(a[pos]), 1, w=a[pos])
    else:
        slope, icpt = 0.0, math.log(max(a.max(), 1e-300))
    amp_scale = max(a.max(), 1e-300)
    x0 = [math.exp(icpt) / amp_scale, -slope * span]

    def resid(p):
        return p[0] * np.exp(-p[1] * t / span) - a / amp_scale

    res = levenberg_marquardt(resid, x0, x_scale=[1.0, 1.0])
    A0 = res.x[0] * amp_scale
    rate = res.x[1] / span
    s_A0, s_rate = res.stderr[0] * amp_scale, res.stderr[1] / span
    rms = math.sqrt(res.cost / t.size) * amp_scale
    omega = omega_ref if omega_ref is not None else 2 * math.pi * float(np.mean(record.frequencies))
    info = {"omega_ref": omega, "iterations": res.iterations}
    if not (res.converged and np.isfinite(rate)) or rate <= 0:
        return FitResult({"A0": A0, "tau_a": math.inf, "Q": math.inf},
                         {"A0": s_A0, "tau_a": math.inf, "Q": math.inf}, rms, False,
                         "no decay: fitted decay rate is not positive" if res.converged
                         else res.message, info)
    tau = 1.0 / rate
    s_tau = s_rate / rate**2
    converged = True
    message = res.message
    if rate < 2 * s_rate:
        converged = False
        message = "decay not resolved: decay rate below twice its uncertainty"
    elif span < tau:
        warnings.warn(f"record spans {span:.3g} s, less than one decay time ({tau:.3g} s)")
    return FitResult({"A0": A0, "tau_a": tau, "Q": 0.5 * omega * tau},
                     {"A0": s_A0, "tau_a": s_tau, "Q": 0.5 * omega * s_tau},
                     rms, converged, message, info)


def quality_factor_check(f0: float, tau_a: float, linewidth_hz: float, rtol: float = 0.1) -> dict:
    """Q from the amplitude decay time versus Q from the FWHM linewidth.

    For a Lorentzian mode both must agree (Q = W0 tau_a / 2 = f0 / FWHM);
    ``consistent`` is False when they differ by more than ``rtol``.
    """
    q_tau = math.pi * f0 * tau_a
    q_lw = f0 / linewidth_hz
    return {"Q_from_tau": q_tau, "Q_from_linewidth": q_lw,
            "ratio": q_tau / q_lw, "consistent": abs(q_tau / q_lw - 1) <= rtol}


# -- frequency-discriminator lineshape ----------------------------------------

def _normalised_half_max_width(theta):
    d = np.linspace(-50, 50, 200001)
    u = (math.cos(theta) + math.sin(theta) * d) / (1 + d * d)
    above = d[u >= 0.5 * u.max()]
    return above[-1] - above[0]


def _half_max_span(f, u, i_peak):
    """Width of the lobe around ``i_peak`` at half its height, edges interpolated."""
    half = 0.5 * u[i_peak]
    edges = []
    for step in (-1, 1):
        i = i_peak
        while 0 <= i + step < u.size and u[i + step] >= half:
            i += step
        j = i + step
        if 0 <= j < u.size:
            edges.append(f[i] + (f[j] - f[i]) * (u[i] - half) / (u[i] - u[j]))
        else:
            edges.append(f[i])
    return abs(edges[1] - edges[0])


def lineshape_initial_guess(freq, volts) -> dict:
    """Deterministic starting point from the extrema of the curve.

    With u = s (cos t + sin t d) / (1 + d^2), d = 2 (f - f0) / FWHM, the
    extrema are u_max = s (1 + cos t) / 2 at d = tan(t/2) and
    u_min = -s (1 - cos t) / 2, so the lobe asymmetry gives the angle and
    u_max - u_min the scale.  The width comes from the half-power span of
    the positive lobe.
    """
    f = np.asarray(freq, dtype=float)
    u = np.asarray(volts, dtype=float)
    i_max, i_min = int(np.argmax(u)), int(np.argmin(u))
    u_max, u_min = u[i_max], min(u[i_min], 0.0)
    cos_t = np.clip((u_max + u_min) / (u_max - u_min), -1.0, 1.0)
    theta = math.acos(cos_t)
    if f[i_min] > f[i_max]:
        theta = -theta
    span = max(_half_max_span(f, u, i_max), np.min(np.abs(np.diff(f))))
    fwhm = 2 * span / _normalised_half_max_width(abs(theta))
    f0 = f[i_max] - 0.5 * fwhm * math.tan(theta / 2)
    return {"f0": f0, "linewidth": fwhm, "mixing_angle": math.degrees(theta),
            "scale": u_max - u_min}


def fit_lineshape(freq, volts, initial: dict | None = None) -> FitResult:
    """Fit centre, FWHM linewidth, mixing angle (degrees) and scale."""
    names = ("f0", "linewidth", "mixing_angle", "scale")
    f = np.asarray(freq, dtype=float)
    u = np.asarray(volts, dtype=float)
    if f.size < 8:
        return _failed(names, f"need >= 8 points, got {f.size}")
    g = initial or lineshape_initial_guess(f, u)
    if f.max() - f.min() < 3 * g["linewidth"]:
        warnings.warn("frequency scan spans fewer than 3 linewidths")
    f_ref, lw_ref, s_ref = g["f0"], g["linewidth"], abs(g["scale"]) or 1.0

    def model(p):
        return ifd_response(f, f_ref + p[0] * lw_ref, abs(p[1]) * lw_ref,
                            math.degrees(p[2]), p[3] * s_ref)

    res = levenberg_marquardt(lambda p: (model(p) - u) / s_ref,
                              [0.0, 1.0, math.radians(g["mixing_angle"]), g["scale"] / s_ref],
                              x_scale=[1.0, 1.0, 1.0, 1.0])
    d0, lw, th, sc = res.x
    s = res.stderr
    params = {"f0": f_ref + d0 * lw_ref, "linewidth": abs(lw) * lw_ref,
              "mixing_angle": math.degrees(th), "scale": sc * s_ref}
    sig = {"f0": s[0] * lw_ref, "linewidth": s[1] * lw_ref,
           "mixing_angle": math.degrees(s[2]), "scale": s[3] * s_ref}
    rms = math.sqrt(res.cost / f.size) * s_ref
    return FitResult(params, sig, rms, res.converged, res.message,
                     {"initial": g, "iterations": res.iterations})


# -- amplitude-frequency regression -------------------------------------------

def fit_amplitude_frequency(record: RingdownRecord, osc: OscillatorSpec | None = None,
                            amplitude_scale: float = 1.0, intrinsic_coefficient: float = 0.0,
                            constants: PhysicalConstants = CODATA) -> FitResult:
    """Weighted regression f = F0 (1 + c A^2), weights proportional to A^2.

    A is the record amplitude times ``amplitude_scale`` (i.e. metres).  A
    known intrinsic (elastic) coefficient is subtracted from c before it is
    turned into a beta0 estimate.  When the record spans less than a factor
    2 in amplitude a warning is issued and the uncertainty is widened by
    2 / (A_max / A_min).

    With ``osc`` given, ``beta0`` and ``beta0_upper`` are added using the
    bound formula (beta0_upper at two sigma, clipped at zero).
    """
    f = record.frequencies
    A = record.amplitudes * amplitude_scale
    ok = A > 0
    f, A = f[ok], A[ok]
    if f.size < 3:
        return _failed(("f0", "quadratic_coefficient"), "fewer than 3 usable entries")
    a_max, a_min = A.max(), A.min()
    x = (A / a_max) ** 2
    w = x
    sw = np.sqrt(w)
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X * sw[:, None], f * sw, rcond=None)
    resid = f - X @ coef
    dof = f.size - 2
    s2 = float(np.sum(w * resid**2) / dof) if dof > 0 else math.inf
    try:
        cov = np.linalg.inv((X * w[:, None]).T @ X) * s2
    except np.linalg.LinAlgError:
        return _failed(("f0", "quadratic_coefficient"), "degenerate amplitude design")
    F0, b = coef
    # c = b / (F0 a_max^2), delta method in (F0, b)
    grad = np.array([-b / F0**2, 1.0 / F0]) / a_max**2
    c = b / F0 / a_max**2
    s_c = math.sqrt(max(grad @ cov @ grad, 0.0))
    s_F0 = math.sqrt(max(cov[0, 0], 0.0))
    dynamic_range = a_max / a_min
    info = {"amplitude_dynamic_range": dynamic_range, "max_amplitude": a_max,
            "intrinsic_coefficient": intrinsic_coefficient}
    message = "ok"
    if dynamic_range < 2:
        widen = 2.0 / dynamic_range
        s_c *= widen
        message = f"amplitude range only x{dynamic_range:.3g}; uncertainty widened x{widen:.3g}"
        warnings.warn(message)
    c_gup = c - intrinsic_coefficient
    params = {"f0": F0, "quadratic_coefficient": c_gup,
              "shift_at_max_amplitude": c_gup * a_max**2}
    sig = {"f0": s_F0, "quadratic_coefficient": s_c, "shift_at_max_amplitude": s_c * a_max**2}
    if osc is not None:
        k = momentum_ratio(osc, 1.0, constants) ** 2  # shift per (beta0 m^2)
        params["beta0"] = c_gup / k
        sig["beta0"] = s_c / k
        params["beta0_upper"] = max(c_gup, 0.0) / k + 2 * s_c / k
        sig["beta0_upper"] = math.nan
    return FitResult(params, sig, math.sqrt(float(np.mean(resid**2))), True, message, info)


# -- simulation-in-the-loop fit -----------------------------------------------

@dataclass(frozen=True)
class _SignedGup(GupModel):
    """beta0 of either sign; the fit must be free to land below zero."""

    def __post_init__(self):
        pass


def model_record(osc: OscillatorSpec, gup: GupModel, damping: DampingModel, amplitude: float,
                 like: RingdownRecord, tracker: str = "zero_crossing", oversampling: float = 16.0,
                 window_cycles: int | None = None, rtol: float = 1e-11,
                 constants: PhysicalConstants = CODATA) -> RingdownRecord:
    """Noiseless simulated record sampled the way ``like`` was tracked.

    The model signal is integrated from rest at ``amplitude`` and passed
    through the same tracker; its frequency and amplitude are then
    interpolated onto the record's time stamps.
    """
    duration = like.times[-1] + like.bin_duration
    rate = oversampling * osc.f0
    sig = simulate_ringdown(osc, gup, damping, amplitude, duration, rate, rtol=rtol,
                            constants=constants)
    if tracker == "spectral":
        rec = track_spectral_peak(sig, like.bin_duration, like.resolution_bandwidth)
    else:
        cycles = window_cycles or max(2, int(round(like.bin_duration * osc.f0)))
        rec = track_zero_crossings(sig, cycles)
    return RingdownRecord(like.times, np.interp(like.times, rec.times, rec.frequencies),
                          np.interp(like.times, rec.times, rec.amplitudes),
                          like.bin_duration, like.resolution_bandwidth)


def duffing_fit(record: RingdownRecord, osc: OscillatorSpec, damping: DampingModel,
                amplitude_scale: float = 1.0, use_frequency: bool = True,
                fix_beta0: bool = False, tracker: str = "zero_crossing",
                constants: PhysicalConstants = CODATA, **model_kw) -> FitResult:
    """Fit beta0 by integrating the perturbed equations of motion.

    Free parameters: beta0 and the nuisances A0, tau_a, plus a frequency
    offset when frequencies are used.  beta0 is carried internally as the
    bound-formula shift at the first recorded amplitude, so it is O(1e-4)
    rather than O(1e10).  Amplitude and frequency residuals are weighted by
    noise levels estimated from the exponential fit and the linear
    regression.  ``beta0_upper`` = max(beta0, 0) + 2 sigma.
    """
    names = ("beta0_best", "beta0_upper", "A0", "tau_a", "frequency_offset")
    A_rec = record.amplitudes * amplitude_scale
    if len(record) < 4 or not np.all(np.isfinite(A_rec)):
        return _failed(names, "record too short for a Duffing fit")
    exp_fit = fit_exponential_decay(record.scaled(amplitude_scale))
    if not exp_fit.converged:
        return _failed(names, "record does not decay: " + exp_fit.message)
    a_ref = A_rec[0]
    k_ref = momentum_ratio(osc, a_ref, constants) ** 2
    sigma_a = max(exp_fit.residual_rms, 1e-9 * A_rec.max())
    sigma_f = 1e-12 * osc.f0
    if use_frequency:
        reg = fit_amplitude_frequency(record, amplitude_scale=amplitude_scale)
        sigma_f = max(reg.residual_rms, sigma_f)
    A0_guess, tau_guess = exp_fit["A0"], exp_fit["tau_a"]

    def unpack(p):
        shift = 0.0 if fix_beta0 else p[-1]
        return p[0] * A0_guess, p[1] * tau_guess, shift

    def resid(p):
        A0, tau, shift = unpack(p)
        if tau <= 0 or A0 <= 0:
            return np.full((2 if use_frequency else 1) * len(record), np.inf)
        model = model_record(osc, _SignedGup(shift / k_ref), DampingModel.from_decay_time(tau),
                             A0, record, tracker, constants=constants, **model_kw)
        r = [(model.amplitudes - A_rec) / sigma_a]
        if use_frequency:
            r.append((model.frequencies + p[2] * osc.f0 * 1e-6 - record.frequencies) / sigma_f)
        return np.concatenate(r)

    x0 = [1.0, 1.0]
    scale = [1.0, 1.0]
    if use_frequency:
        x0.append(0.0)
        scale.append(1.0)
    if not fix_beta0:
        x0.append(0.0)
        scale.append(1e-3)
    res = levenberg_marquardt(resid, x0, x_scale=scale)
    A0, tau, shift = unpack(res.x)
    s = res.stderr
    s_shift = 0.0 if fix_beta0 else s[-1]
    beta0 = shift / k_ref
    s_beta0 = s_shift / k_ref
    params = {"beta0_best": beta0, "beta0_upper": max(beta0, 0.0) + 2 * s_beta0,
              "A0": A0, "tau_a": tau,
              "frequency_offset": res.x[2] * osc.f0 * 1e-6 if use_frequency else 0.0}
    sig = {"beta0_best": s_beta0, "beta0_upper": math.nan, "A0": s[0] * A0_guess,
           "tau_a": s[1] * tau_guess,
           "frequency_offset": s[2] * osc.f0 * 1e-6 if use_frequency else 0.0}
    rms = math.sqrt(res.cost / res.residuals.size)
    return FitResult(params, sig, rms, res.converged, res.message,
                     {"use_frequency": use_frequency, "fix_beta0": fix_beta0,
                      "iterations": res.iterations, "sigma_amplitude": sigma_a,
                      "sigma_frequency": sigma_f})
