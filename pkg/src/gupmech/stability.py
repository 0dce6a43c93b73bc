"""Overlapping Allan deviation of fractional-frequency data."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .timeseries import TimeSeries


class AllanPoint(NamedTuple):
    tau: float
    adev: float
    n_terms: int
    error: str | None = None


def allan_deviation(y: TimeSeries, taus) -> list[AllanPoint]:
    """Overlapping ADEV at each requested averaging time.

    Each tau is rounded to a whole number m of samples; the reported tau is
    m / rate.  Taus outside [2 / rate, duration / 4] produce an entry with
    ``adev = nan`` and an error string instead of raising.
    """
    if y.channel != "fractional_frequency":
        raise ValueError(f"expected a fractional_frequency series, got {y.channel!r}")
    rate = y.sample_rate
    # a constant offset is a linear phase ramp and cancels in the second difference
    phase = np.concatenate([[0.0], np.cumsum(y.values - y.values.mean())]) / rate
    out = []
    for tau in np.atleast_1d(np.asarray(taus, dtype=float)):
        m = int(round(tau * rate))
        if tau < 2.0 / rate * (1 - 1e-12) or m < 2:
            out.append(AllanPoint(float(tau), math.nan, 0, f"tau {tau:g} s below 2/rate"))
            continue
        if tau > y.duration / 4 * (1 + 1e-12):
            out.append(AllanPoint(float(tau), math.nan, 0,
                                  f"tau {tau:g} s above duration/4 = {y.duration / 4:g} s"))
            continue
        d2 = phase[2 * m:] - 2 * phase[m:-m] + phase[: -2 * m]
        tau_m = m / rate
        avar = np.mean(d2 * d2) / (2 * tau_m**2)
        out.append(AllanPoint(tau_m, math.sqrt(avar), d2.size))
    return out
