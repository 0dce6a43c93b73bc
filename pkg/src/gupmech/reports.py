"""Versioned YAML form of FitResult and BoundReport.

Field names are a stable interface; bump ``FORMAT_VERSION`` on any change.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .bounds import BoundReport
from .fits import FitResult

FORMAT_VERSION = 1


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def fit_to_dict(fit: FitResult, name: str = "") -> dict:
    return _plain({
        "kind": "fit_result", "version": FORMAT_VERSION, "name": name,
        "converged": fit.converged, "message": fit.message,
        "parameters": fit.parameters, "uncertainties": fit.uncertainties,
        "residual_rms": fit.residual_rms, "info": fit.info,
    })


def fit_from_dict(d: dict) -> FitResult:
    _check(d, "fit_result")
    return FitResult(d["parameters"], d["uncertainties"], d["residual_rms"],
                     d["converged"], d.get("message", ""), d.get("info") or {})


def bound_to_dict(report: BoundReport) -> dict:
    return _plain({
        "kind": "bound_report", "version": FORMAT_VERSION, "method": report.method,
        "label": report.label, "mass": report.mass, "beta0_upper": report.beta0_upper,
        "confidence_note": report.confidence_note, "inputs": report.inputs,
    })


def bound_from_dict(d: dict) -> BoundReport:
    _check(d, "bound_report")
    return BoundReport(d["method"], d["beta0_upper"], d["label"], d["mass"],
                       d.get("confidence_note", ""), d.get("inputs") or {})


def _check(d, kind):
    if not isinstance(d, dict) or d.get("kind") != kind:
        raise ValueError(f"not a {kind} document")
    if d.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported {kind} version {d.get('version')!r}")


def dump(doc: dict, path=None) -> str:
    text = yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)
    if path is not None:
        Path(path).write_text(text)
    return text


def load(path) -> FitResult | BoundReport:
    d = yaml.safe_load(Path(path).read_text())
    kind = d.get("kind") if isinstance(d, dict) else None
    if kind == "fit_result":
        return fit_from_dict(d)
    if kind == "bound_report":
        return bound_from_dict(d)
    raise ValueError(f"{path}: unknown document kind {kind!r}")
