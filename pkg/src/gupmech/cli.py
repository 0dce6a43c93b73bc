"""Command-line front end.

Exit status: 0 when every requested stage converged, 1 when an analysis
stage did not converge, 2 on configuration or input/output errors.
"""
from __future__ import annotations

import argparse
import csv
import glob
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np
import yaml

from . import __version__, pipeline, reports, svgplot
from .bounds import summary_plot_data
from .config import PRESETS, ConfigError, load_config, parse_config
from .dynamics import IntegrationError
from .pendulum import model_period, write_period_csv
from .timeseries import read_csv, write_csv
from .tracking import write_record_csv

log = logging.getLogger("gupmech")

EXIT_OK, EXIT_NONCONVERGED, EXIT_CONFIG = 0, 1, 2


def _config(args, required=True):
    if args.config is None and args.preset is None:
        if required:
            raise ConfigError("give --config PATH or --preset NAME")
        return None
    return load_config(args.config, args.preset, seed=args.seed)


def _outdir(args, cfg) -> Path:
    out = Path(args.out) if args.out else (cfg.output if cfg is not None else Path("out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_lineshape(path, freq, volts):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frequency_hz", "voltage_v"])
        for f, u in zip(freq.tolist(), volts.tolist()):
            w.writerow([repr(f), repr(u)])


def _read_lineshape(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["frequency_hz", "voltage_v"]:
        raise ValueError(f"{path}: header must be frequency_hz,voltage_v")
    try:
        arr = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    except ValueError:
        raise ValueError(f"{path}: malformed lineshape row") from None
    if arr.size == 0:
        raise ValueError(f"{path}: no data rows")
    return arr[:, 0], arr[:, 1]


def cmd_simulate(args) -> int:
    cfg = _config(args)
    out = _outdir(args, cfg)
    series = pipeline.simulate(cfg, args.full_scale)
    write_csv(series, out / "timeseries.csv")
    files = ["timeseries.csv"]
    if cfg.lineshape is not None:
        _write_lineshape(out / "lineshape.csv", *pipeline.simulate_lineshape(cfg))
        files.append("lineshape.csv")
    meta = {
        "kind": "simulation_metadata", "version": reports.FORMAT_VERSION,
        "gupmech_version": __version__, "config_source": cfg.source,
        "resolved": {
            "duration": len(series) / series.sample_rate, "sample_rate": series.sample_rate,
            "n_samples": len(series), "channel": series.channel, "seed": series.seed,
            "full_scale": bool(args.full_scale), "beta0": cfg.gup.beta0,
            "gamma": cfg.damping.gamma, "omega0": cfg.oscillator.omega0,
            "quality_factor": cfg.oscillator.quality_factor},
        "files": files,
        "config": cfg.raw,
    }
    reports.dump(reports._plain(meta), out / "metadata.yaml")
    log.info("wrote %d samples to %s", len(series), out / "timeseries.csv")
    return EXIT_OK


def _analysis_config(args, input_path: Path):
    cfg = _config(args, required=False)
    if cfg is not None:
        return cfg
    meta_path = input_path.with_name("metadata.yaml")
    if not meta_path.exists():
        raise ConfigError(f"no --config/--preset given and no {meta_path} next to the input")
    meta = yaml.safe_load(meta_path.read_text())
    if not isinstance(meta, dict) or "config" not in meta:
        raise ConfigError(f"{meta_path}: not a simulation metadata file")
    return parse_config(meta["config"], str(meta_path))


def _write_analysis(out: Path, outcome, lineshape):
    rec, scale = outcome.record, outcome.amplitude_scale
    if rec is not None:
        write_record_csv(rec, out / "ringdown_record.csv")
    for name, fit in outcome.fits.items():
        reports.dump(reports.fit_to_dict(fit, name), out / f"fit_{name}.yaml")
    for i, (method, report) in enumerate(outcome.bounds.items()):
        fname = "bound_report.yaml" if i == 0 else f"bound_{method}.yaml"
        reports.dump(reports.bound_to_dict(report), out / fname)
    reports.dump(reports._plain({"stages": outcome.stages(), "checks": outcome.checks}),
                 out / "stages.yaml")
    if rec is not None:
        svgplot.plot_ringdown(out / "ringdown.svg", rec, scale, outcome.fits.get("exponential"))
        svgplot.plot_frequency_vs_amplitude(out / "frequency_vs_amplitude2.svg", rec, scale,
                                            outcome.fits.get("regression"))
    if lineshape is not None:
        svgplot.plot_lineshape(out / "lineshape.svg", *lineshape, outcome.fits.get("lineshape"))


def cmd_analyze(args) -> int:
    input_path = Path(args.input)
    series = read_csv(input_path)
    cfg = _analysis_config(args, input_path)
    out = _outdir(args, cfg)
    ls_path = Path(args.lineshape) if args.lineshape else input_path.with_name("lineshape.csv")
    lineshape = _read_lineshape(ls_path) if (args.lineshape or ls_path.exists()) else None
    outcome = pipeline.analyze(series, cfg, lineshape)
    _write_analysis(out, outcome, lineshape)
    for name, stage in outcome.stages().items():
        level = logging.INFO if stage["converged"] else logging.ERROR
        log.log(level, "%s: %s", name, stage["message"])
    for method, report in outcome.bounds.items():
        print(f"{method}: beta0 < {report.beta0_upper:.3g} ({report.label}, m = {report.mass:g} kg)")
    return EXIT_OK if outcome.converged else EXIT_NONCONVERGED


def cmd_pendulum(args) -> int:
    cfg = _config(args)
    out = _outdir(args, cfg)
    data = pipeline.pendulum_dataset(cfg, args.data)
    write_period_csv(data, out / "period_data.csv")
    fit, report = pipeline.pendulum_bound(cfg, data)
    reports.dump(reports.fit_to_dict(fit, "pendulum"), out / "fit_pendulum.yaml")
    spec = cfg.pendulum.spec

    def model(th):
        return model_period(spec, fit["T0_fitted"], fit["beta0_best"], th)

    svgplot.plot_pendulum(out / "pendulum.svg", data, model if fit.converged else None)
    if report is None:
        log.error("pendulum fit: %s", fit.message)
        return EXIT_NONCONVERGED
    reports.dump(reports.bound_to_dict(report), out / "bound_report.yaml")
    print(f"pendulum: beta0 < {report.beta0_upper:.3g} (estimate; best "
          f"{fit['beta0_best']:.3g} +/- {fit.sigma('beta0_best'):.2g})")
    return EXIT_OK


def cmd_summary(args) -> int:
    cfg = _config(args, required=False)
    paths = []
    for pattern in args.reports:
        matched = sorted(glob.glob(pattern, recursive=True))
        paths.extend(matched or ([pattern] if Path(pattern).exists() else []))
    found = []
    for p in paths:
        doc = yaml.safe_load(Path(p).read_text())
        if isinstance(doc, dict) and doc.get("kind") == "bound_report":
            found.append(reports.bound_from_dict(doc))
    if not found:
        raise ConfigError("no bound reports matched " + " ".join(args.reports))
    rows = summary_plot_data(found, cfg.annotations if cfg is not None else ())
    out = _outdir(args, cfg)
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mass_kg", "beta0_upper", "label", "kind"])
        for r in rows:
            w.writerow([repr(r.mass), repr(r.beta0_upper), r.label, r.kind])
    svgplot.plot_summary(out / "beta0_vs_mass.svg", rows)
    print(f"{len(found)} report(s), {len(rows) - len(found)} annotation(s) -> {out}")
    return EXIT_OK


def _parse_value(text):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    value = yaml.safe_load(text)
    if isinstance(value, (dict, list)):
        raise ConfigError(f"sweep value {text!r} must be a scalar")
    return value


def cmd_sweep(args) -> int:
    base = _config(args)
    param = args.param or (base.sweep or {}).get("parameter")
    if args.values:
        values = [_parse_value(v) for v in args.values.split(",")]
    else:
        values = (base.sweep or {}).get("values")
    if not param or not values:
        raise ConfigError("sweep needs --param and --values (or a sweep section)")
    out = _outdir(args, base)
    ok = True
    if base.run is not None:
        header = ["value", "f0", "quadratic_coefficient", "quadratic_coefficient_sigma",
                  "beta0_upper_regression", "beta0_upper_null", "tau_a", "converged"]
    else:
        header = ["value", "beta0_best", "beta0_sigma", "beta0_upper", "converged"]
    rows = []
    for value in values:
        cfg = load_config(args.config, args.preset, {param: value}, seed=args.seed)
        if cfg.run is not None:
            res = pipeline.analyze(pipeline.simulate(cfg, args.full_scale), cfg)
            reg, exp_fit = res.fits["regression"], res.fits.get("exponential")
            reg_bound = res.bounds.get("regression")
            rows.append([value, reg["f0"], reg["quadratic_coefficient"],
                         reg.sigma("quadratic_coefficient"),
                         reg_bound.beta0_upper if reg_bound else math.nan,
                         res.bounds["null-shift"].beta0_upper,
                         exp_fit["tau_a"] if exp_fit else math.nan, res.converged])
            ok &= res.converged
        else:
            fit, _ = pipeline.pendulum_bound(cfg, pipeline.pendulum_dataset(cfg))
            rows.append([value, fit["beta0_best"], fit.sigma("beta0_best"),
                         fit["beta0_upper"], fit.converged])
            ok &= fit.converged
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([param] + header[1:])
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    print(f"swept {param} over {len(values)} value(s) -> {out / 'sweep.csv'}")
    return EXIT_OK if ok else EXIT_NONCONVERGED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment config (YAML)")
    common.add_argument("--preset", metavar="NAME", choices=PRESETS,
                        help=f"shipped config: {', '.join(PRESETS)}")
    common.add_argument("--seed", type=int, help="override the noise / synthetic-data seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--full-scale", action="store_true",
                        help="use the full-scale run duration (decay-time-class runs)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gupmech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a seeded ringdown")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", parents=[common], help="track, fit and bound a ringdown")
    p.add_argument("input", help="timeseries CSV")
    p.add_argument("--lineshape", metavar="CSV",
                   help="swept lineshape (default: lineshape.csv beside the input, if present)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pendulum", parents=[common], help="fit beta0 to period-vs-amplitude data")
    p.add_argument("--data", metavar="CSV", help="theta0_rad,period_s,sigma_s table")
    p.set_defaults(func=cmd_pendulum)

    p = sub.add_parser("summary", parents=[common], help="beta0-versus-mass table and plot")
    p.add_argument("reports", nargs="+", help="bound report files or glob patterns")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("sweep", parents=[common], help="repeat a run over one parameter")
    p.add_argument("--param", metavar="KEY", help="dotted config key, e.g. run.amplitude")
    p.add_argument("--values", metavar="V1,V2,...", help="comma-separated values")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)
    with warnings.catch_warnings():
        warnings.showwarning = lambda message, *_a, **_k: log.warning("%s", message)
        return _dispatch(args)


def _dispatch(args) -> int:
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
