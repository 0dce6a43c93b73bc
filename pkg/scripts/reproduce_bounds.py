#!/usr/bin/env python3
"""Print the beta0 limits for the sapphire, quartz and pendulum presets.

Fast closed-form route only; use ``gupmech simulate`` / ``analyze`` for the
simulated ringdown path.
"""
import argparse

from gupmech import pipeline
from gupmech.bounds import beta0_bound_null, summary_plot_data
from gupmech.config import load_config
from gupmech.fits import quality_factor_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sapphire-resolution", type=float, default=3.9e-5,
                    help="fractional frequency resolution for the sapphire limit")
    args = ap.parse_args()

    sapphire = load_config(preset="sapphire-sb")
    quartz = load_config(preset="quartz-baw")
    pend = load_config(preset="atkinson-pendulum")

    reports = [
        beta0_bound_null(sapphire.oscillator, sapphire.run.amplitude, args.sapphire_resolution),
        beta0_bound_null(quartz.oscillator, quartz.analysis.max_amplitude,
                         quartz.analysis.shift_resolution),
    ]
    fit, rep = pipeline.pendulum_bound(pend, pipeline.pendulum_dataset(pend))
    if rep is None:
        print(f"pendulum fit gave no limit: {fit.message}")
    else:
        reports.append(rep)

    rows = summary_plot_data(reports, load_config(preset="literature").annotations)
    print(f"{'mass (kg)':>12}  {'beta0 <':>10}  {'kind':<10}  label")
    for r in rows:
        print(f"{r.mass:12.3g}  {r.beta0_upper:10.3g}  {r.kind:<10}  {r.label}")

    ls = sapphire.lineshape
    chk = quality_factor_check(sapphire.oscillator.f0, sapphire.damping.amplitude_decay_time,
                               ls.linewidth)
    print(f"\nsapphire Q from decay time {chk['Q_from_tau']:.3g}, from linewidth "
          f"{chk['Q_from_linewidth']:.3g} (ratio {chk['ratio']:.2f}, "
          f"{'consistent' if chk['consistent'] else 'inconsistent'})")


if __name__ == "__main__":
    main()
