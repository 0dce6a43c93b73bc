"""Uniformly sampled single-channel series and their CSV form.

CSV layout: ``#``-prefixed ``key: value`` header lines (channel, sample_rate,
start_time, seed), a ``value`` column header, then one sample per row.  Floats
are written with ``repr`` so a write/read cycle is bit-exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CHANNELS = ("displacement", "voltage", "fractional_frequency")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    sample_rate: float
    values: np.ndarray
    start_time: float = 0.0
    channel: str = "displacement"
    seed: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate!r}")
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}; expected one of {CHANNELS}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("values must be a non-empty 1-d sequence")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def duration(self) -> float:
        return self.values.size / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.values.size) / self.sample_rate

    def with_values(self, values, channel: str | None = None) -> "TimeSeries":
        return TimeSeries(self.sample_rate, values, self.start_time,
                          channel or self.channel, self.seed)


def write_csv(series: TimeSeries, path) -> None:
    seed = "" if series.seed is None else str(series.seed)
    lines = [
        f"# channel: {series.channel}",
        f"# sample_rate: {series.sample_rate!r}",
        f"# start_time: {series.start_time!r}",
        f"# seed: {seed}",
        "value",
    ]
    lines.extend(map(repr, series.values.tolist()))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> TimeSeries:
    header = {}
    values = []
    seen_column = False
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                header[key.strip()] = val.strip()
            elif not seen_column:
                if line != "value":
                    raise ValueError(f"{path}:{lineno}: expected 'value' column header")
                seen_column = True
            else:
                try:
                    values.append(float(line))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad sample {line!r}") from None
    missing = {"channel", "sample_rate", "start_time"} - header.keys()
    if missing:
        raise ValueError(f"{path}: missing header field(s) {sorted(missing)}")
    if not values:
        raise ValueError(f"{path}: no samples")
    seed = header.get("seed") or None
    return TimeSeries(
        sample_rate=float(header["sample_rate"]),
        values=np.array(values),
        start_time=float(header["start_time"]),
        channel=header["channel"],
        seed=None if seed is None else int(seed),
    )
