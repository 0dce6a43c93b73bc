"""Headless SVG figures with byte-stable output for a given input."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .transducer import ifd_response  # noqa: E402

_STYLE = {"svg.hashsalt": "gupmech", "svg.fonttype": "none", "figure.figsize": (6.0, 4.0),
          "axes.grid": True, "grid.alpha": 0.3}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "gupmech"})
    plt.close(fig)


def plot_lineshape(path, freq, volts, fit=None):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        f_ref = float(np.mean(freq))
        ax.plot(freq - f_ref, volts, ".", ms=3, label="data")
        if fit is not None and fit.converged:
            ff = np.linspace(freq.min(), freq.max(), 1000)
            p = fit.parameters
            ax.plot(ff - f_ref, ifd_response(ff, p["f0"], p["linewidth"], p["mixing_angle"],
                                             p["scale"]), "-", label="fit")
        ax.set_xlabel(f"frequency - {f_ref:.4f} Hz")
        ax.set_ylabel("discriminator output (V)")
        ax.legend()
        _save(fig, path)


def plot_ringdown(path, record, amplitude_scale=1.0, fit=None):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        A = record.amplitudes * amplitude_scale
        ax.semilogy(record.times, A, "o", ms=3, label="tracked amplitude")
        if fit is not None and fit.converged:
            t = np.linspace(0, record.times[-1], 400)
            ax.semilogy(t, fit["A0"] * np.exp(-t / fit["tau_a"]), "-",
                        label=f"tau_a = {fit['tau_a']:.4g} s")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("amplitude (m)")
        ax.legend()
        _save(fig, path)


def plot_frequency_vs_amplitude(path, record, amplitude_scale=1.0, fit=None):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        A2 = (record.amplitudes * amplitude_scale) ** 2
        f_ref = float(np.median(record.frequencies))
        ax.plot(A2, record.frequencies - f_ref, "o", ms=3, label="tracked")
        if fit is not None and fit.converged:
            a2 = np.linspace(0, A2.max(), 100)
            model = fit["f0"] * (1 + fit["quadratic_coefficient"] * a2) - f_ref
            ax.plot(a2, model, "-", label=f"c = {fit['quadratic_coefficient']:.3g} "
                                          f"+/- {fit.sigma('quadratic_coefficient'):.2g} m^-2")
        ax.set_xlabel("amplitude^2 (m^2)")
        ax.set_ylabel(f"frequency - {f_ref:.6f} Hz")
        ax.legend()
        _save(fig, path)


def plot_pendulum(path, data, model_fn=None):
    """Period against theta0^2; ``model_fn(theta)`` gives the fitted model."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.errorbar(data.theta0**2, data.period, yerr=data.sigma, fmt="o", ms=3, label="data")
        if model_fn is not None:
            th = np.linspace(data.theta0.min(), data.theta0.max(), 200)
            ax.plot(th**2, model_fn(th), "-", label="model")
        ax.set_xlabel("theta0^2 (rad^2)")
        ax.set_ylabel("period (s)")
        ax.legend()
        _save(fig, path)


def plot_summary(path, rows):
    """Log-log beta0 upper limit against mass, one labelled marker per row."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(7.0, 5.0))
        for kind, marker in (("computed", "s"), ("literature", "o")):
            sel = [r for r in rows if r.kind == kind]
            if not sel:
                continue
            ax.loglog([r.mass for r in sel], [r.beta0_upper for r in sel], marker,
                      mfc="none" if kind == "literature" else None, label=kind)
            for r in sel:
                ax.annotate(r.label, (r.mass, r.beta0_upper), textcoords="offset points",
                            xytext=(4, 4), fontsize=7)
        ax.set_xlabel("mass (kg)")
        ax.set_ylabel("beta0 upper limit")
        ax.legend()
        _save(fig, path)
