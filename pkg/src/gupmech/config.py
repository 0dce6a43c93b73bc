"""Experiment configuration: a nested YAML file, validated into typed specs.

Errors carry the dotted field path and, where the file has one, the line
number, e.g. ``sapphire.yaml:3: oscillator.m_eff: required field missing``.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .dynamics import DampingModel
from .noise import NoiseSpec
from .pendulum import PendulumSpec
from .physics import GupModel, OscillatorSpec
from .transducer import TransducerSpec

PRESETS = ("sapphire-sb", "quartz-baw", "atkinson-pendulum", "desk-gup", "literature")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunSettings:
    amplitude: float
    duration: float
    full_scale_duration: float | None = None
    sample_rate: float | None = None
    oversampling: float = 16.0
    bin_duration: float = 0.2
    resolution_bandwidth: float = 5.0
    tracker: str = "spectral"
    window_cycles: int = 20
    rtol: float = 1e-10


@dataclass(frozen=True)
class AnalysisSettings:
    max_amplitude: float | None = None
    shift_resolution: float | None = None
    intrinsic_coefficient: float = 0.0
    duffing_fit: bool = False
    duffing_amplitude_only: bool = False


@dataclass(frozen=True)
class LineshapeSettings:
    center: float
    linewidth: float
    mixing_angle_deg: float
    scale: float = 1.0
    span_linewidths: float = 20.0
    points: int = 201
    noise_rel: float = 0.0


@dataclass(frozen=True)
class PendulumSettings:
    spec: PendulumSpec
    label: str = "pendulum"
    data: str | None = None
    synthetic: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    source: str
    output: Path
    oscillator: OscillatorSpec | None = None
    gup: GupModel = GupModel()
    damping: DampingModel | None = None
    transducer: TransducerSpec | None = None
    noise: NoiseSpec = NoiseSpec()
    run: RunSettings | None = None
    analysis: AnalysisSettings = AnalysisSettings()
    lineshape: LineshapeSettings | None = None
    pendulum: PendulumSettings | None = None
    annotations: tuple = ()
    sweep: dict | None = None

    def resolved_duration(self, full_scale: bool = False) -> float:
        if full_scale and self.run.full_scale_duration:
            return self.run.full_scale_duration
        return self.run.duration

    def resolved_sample_rate(self) -> float:
        return self.run.sample_rate or self.run.oversampling * self.oscillator.f0


class _Reader:
    """Typed access to a nested mapping with path/line-aware errors."""

    def __init__(self, data, source, node=None):
        self.data = data
        self.source = source
        self.node = node

    def _line(self, path):
        node = self.node
        line = None
        for key in path:
            if not isinstance(node, yaml.MappingNode):
                break
            for k, v in node.value:
                if k.value == key:
                    line = k.start_mark.line + 1
                    node = v
                    break
            else:
                break
        return line

    def error(self, path, msg):
        line = self._line(path)
        where = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{where}: {'.'.join(path)}: {msg}")

    def section(self, name, required=False):
        val = self.data.get(name)
        if val is None:
            if required:
                raise self.error((name,), "required section missing")
            return None
        if not isinstance(val, dict):
            raise self.error((name,), "must be a mapping")
        return val

    def get(self, path, kind=float, required=True, default=None):
        node = self.data
        for key in path[:-1]:
            node = node.get(key) or {}
        if path[-1] not in node or node[path[-1]] is None:
            if required:
                raise self.error(path, "required field missing")
            return default
        val = node[path[-1]]
        try:
            if kind is float:
                if isinstance(val, bool):
                    raise TypeError
                out = float(val)
                if not math.isfinite(out):
                    raise ValueError
                return out
            if kind is int:
                if isinstance(val, bool) or float(val) != int(val):
                    raise TypeError
                return int(val)
            if kind is bool:
                if not isinstance(val, bool):
                    raise TypeError
                return val
            return kind(val)
        except (TypeError, ValueError):
            raise self.error(path, f"expected {kind.__name__}, got {val!r}") from None

    def build(self, path, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except ValueError as exc:
            # "m_eff must be > 0" -> point at oscillator.m_eff
            msg = str(exc)
            head = msg.split(" ", 1)[0]
            node = self.data
            for key in path:
                node = node.get(key) if isinstance(node, dict) else None
            if isinstance(node, dict) and head in node:
                path = tuple(path) + (head,)
                msg = msg.split(" ", 1)[1]
            raise self.error(path, msg) from None


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("gupmech.presets").joinpath(f"{name}.yaml").read_text()


def load_config(path=None, preset=None, overrides: dict | None = None,
                seed: int | None = None) -> ExperimentConfig:
    """Read a config file or a shipped preset; a file may itself name a ``preset`` base.

    ``overrides`` maps dotted keys to values.  ``seed`` replaces the noise
    seed and, when a pendulum section exists, the synthetic-data seed.
    """
    if path is None and preset is None:
        raise ConfigError("either a config path or a preset name is required")
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        source = str(path)
    else:
        text, source = preset_text(preset), f"preset:{preset}"
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark else source
        raise ConfigError(f"{where}: YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    base = data.pop("preset", None)
    if path is not None and base is not None:
        data = _merge(yaml.safe_load(preset_text(base)), data)
        node = None  # line numbers refer to the user file only when no merge happens
    for dotted, value in (overrides or {}).items():
        _set_dotted(data, dotted, value)
    if seed is not None:
        _set_dotted(data, "noise.seed", seed)
        if isinstance(data.get("pendulum"), dict):
            _set_dotted(data, "pendulum.synthetic.seed", seed)
    return parse_config(data, source, node)


def _merge(base, top):
    out = copy.deepcopy(base)
    for k, v in top.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _set_dotted(data, dotted, value):
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {dotted}: {k} is not a section")
    node[keys[-1]] = value


def _parse_oscillator(r: _Reader, sec):
    p = ("oscillator",)
    label = str(sec.get("label", "oscillator"))
    m_eff = r.get(p + ("m_eff",))
    if "omega0" in sec:
        omega0 = r.get(p + ("omega0",))
    else:
        omega0 = 2 * math.pi * r.get(p + ("f0",))
    if "quality_factor" in sec:
        q = r.get(p + ("quality_factor",))
    elif "amplitude_decay_time" in sec:
        q = 0.5 * omega0 * r.get(p + ("amplitude_decay_time",))
    elif "linewidth_hz" in sec:
        q = omega0 / (2 * math.pi * r.get(p + ("linewidth_hz",)))
    else:
        raise r.error(p, "one of quality_factor, amplitude_decay_time, linewidth_hz is required")
    return r.build(p, OscillatorSpec, label, m_eff, omega0, q)


TOP_LEVEL_KEYS = ("preset", "oscillator", "gup", "damping", "transducer", "noise", "run",
                  "analysis", "lineshape", "pendulum", "summary", "sweep", "output")


def parse_config(data: dict, source: str = "<config>", node=None) -> ExperimentConfig:
    r = _Reader(data, source, node)
    for key in data:
        if key not in TOP_LEVEL_KEYS:
            raise r.error((str(key),), f"unknown section; expected one of {', '.join(TOP_LEVEL_KEYS)}")
    kw = {}
    sec = r.section("oscillator")
    if sec is not None:
        kw["oscillator"] = osc = _parse_oscillator(r, sec)
        kw["damping"] = DampingModel.from_oscillator(osc)
    if r.section("gup") is not None:
        kw["gup"] = r.build(("gup", "beta0"), GupModel, r.get(("gup", "beta0")))
    sec = r.section("damping")
    if sec is not None:
        if "amplitude_decay_time" in sec:
            kw["damping"] = r.build(("damping",), DampingModel.from_decay_time,
                                    r.get(("damping", "amplitude_decay_time")))
        else:
            kw["damping"] = r.build(("damping",), DampingModel, r.get(("damping", "gamma")))
    sec = r.section("transducer")
    if sec is not None:
        t = ("transducer",)
        kw["transducer"] = r.build(t, TransducerSpec,
                                   r.get(t + ("transduction_constant",)),
                                   r.get(t + ("discriminator_slope",), required=False, default=1.0),
                                   r.get(t + ("mixing_angle_deg",), required=False, default=0.0),
                                   r.get(t + ("drive_coupling",), required=False, default=1.0))
    sec = r.section("noise")
    if sec is not None:
        n = ("noise",)
        kw["noise"] = r.build(n, NoiseSpec,
                              r.get(n + ("additive_white_rms",), required=False, default=0.0),
                              r.get(n + ("fractional_frequency_white",), required=False, default=0.0),
                              r.get(n + ("fractional_frequency_random_walk",), required=False,
                                    default=0.0),
                              r.get(n + ("seed",), int, required=False, default=0))
    sec = r.section("run")
    if sec is not None:
        p = ("run",)
        tracker = str(sec.get("tracker", "spectral"))
        if tracker not in ("spectral", "zero_crossing"):
            raise r.error(p + ("tracker",), "must be 'spectral' or 'zero_crossing'")
        run = RunSettings(
            amplitude=r.get(p + ("amplitude",)),
            duration=r.get(p + ("duration",)),
            full_scale_duration=r.get(p + ("full_scale_duration",), required=False),
            sample_rate=r.get(p + ("sample_rate",), required=False),
            oversampling=r.get(p + ("oversampling",), required=False, default=16.0),
            bin_duration=r.get(p + ("bin_duration",), required=False, default=0.2),
            resolution_bandwidth=r.get(p + ("resolution_bandwidth",), required=False, default=5.0),
            tracker=tracker,
            window_cycles=r.get(p + ("window_cycles",), int, required=False, default=20),
            rtol=r.get(p + ("rtol",), required=False, default=1e-10))
        for name in ("amplitude", "duration", "bin_duration", "resolution_bandwidth"):
            if getattr(run, name) <= 0:
                raise r.error(p + (name,), "must be > 0")
        kw["run"] = run
    sec = r.section("analysis")
    if sec is not None:
        p = ("analysis",)
        kw["analysis"] = AnalysisSettings(
            max_amplitude=r.get(p + ("max_amplitude",), required=False),
            shift_resolution=r.get(p + ("shift_resolution",), required=False),
            intrinsic_coefficient=r.get(p + ("intrinsic_coefficient",), required=False, default=0.0),
            duffing_fit=r.get(p + ("duffing_fit",), bool, required=False, default=False),
            duffing_amplitude_only=r.get(p + ("duffing_amplitude_only",), bool, required=False,
                                         default=False))
    sec = r.section("lineshape")
    if sec is not None:
        p = ("lineshape",)
        kw["lineshape"] = LineshapeSettings(
            center=r.get(p + ("center",)), linewidth=r.get(p + ("linewidth",)),
            mixing_angle_deg=r.get(p + ("mixing_angle_deg",)),
            scale=r.get(p + ("scale",), required=False, default=1.0),
            span_linewidths=r.get(p + ("span_linewidths",), required=False, default=20.0),
            points=r.get(p + ("points",), int, required=False, default=201),
            noise_rel=r.get(p + ("noise_rel",), required=False, default=0.0))
    sec = r.section("pendulum")
    if sec is not None:
        p = ("pendulum",)
        spec = r.build(p, PendulumSpec, r.get(p + ("mass",)), r.get(p + ("length",)),
                       r.get(p + ("gravity",), required=False, default=9.81))
        synthetic = sec.get("synthetic") or {}
        if not isinstance(synthetic, dict):
            raise r.error(p + ("synthetic",), "must be a mapping")
        kw["pendulum"] = PendulumSettings(spec, str(sec.get("label", "pendulum")),
                                          sec.get("data"), dict(synthetic))
    ann = (data.get("summary") or {}).get("annotations") or []
    for i, a in enumerate(ann):
        if not isinstance(a, dict) or not {"mass", "beta0_upper", "label"} <= a.keys():
            raise r.error(("summary", "annotations"),
                          f"entry {i} needs mass, beta0_upper and label")
    kw["annotations"] = tuple(ann)
    if data.get("sweep") is not None:
        sw = r.section("sweep")
        if "parameter" not in sw or not isinstance(sw.get("values"), list):
            raise r.error(("sweep",), "needs 'parameter' and a list of 'values'")
        kw["sweep"] = sw
    out = data.get("output", "out")
    return ExperimentConfig(raw=data, source=source, output=Path(str(out)), **kw)


def require(cfg: ExperimentConfig, *sections: str) -> None:
    for name in sections:
        if getattr(cfg, name) is None:
            raise ConfigError(f"{cfg.source}: {name}: required section missing")
