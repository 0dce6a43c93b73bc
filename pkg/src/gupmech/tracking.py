"""Turn a sampled ringdown into a (time, frequency, amplitude) record.

Two trackers are provided:

* ``track_spectral_peak`` mimics an FFT analyser with a marker on the
  spectral maximum, one reading per time bin.
* ``track_zero_crossings`` regresses zero-crossing times against half-cycle
  index in short windows; it is much more precise and is what the
  simulation cross-checks use.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .timeseries import TimeSeries

GAUSS_WINDOW_WIDTH = 0.1  # window std as a fraction of the segment length; edge at 5 std


@dataclass(frozen=True, eq=False)
class RingdownRecord:
    times: np.ndarray
    frequencies: np.ndarray
    amplitudes: np.ndarray
    bin_duration: float
    resolution_bandwidth: float
    skipped_bins: tuple = field(default=())

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        f = np.asarray(self.frequencies, dtype=float)
        a = np.asarray(self.amplitudes, dtype=float)
        if not (t.shape == f.shape == a.shape) or t.ndim != 1:
            raise ValueError("times, frequencies and amplitudes must be 1-d and equally long")
        if t.size and np.any(np.diff(t) <= 0):
            raise ValueError("record times must be strictly increasing")
        if np.any(a < 0):
            raise ValueError("amplitudes must be >= 0")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "amplitudes", a)

    def __len__(self):
        return self.times.size

    def scaled(self, amplitude_factor: float) -> "RingdownRecord":
        """Same record with amplitudes converted to other units."""
        return RingdownRecord(self.times, self.frequencies, self.amplitudes * amplitude_factor,
                              self.bin_duration, self.resolution_bandwidth, self.skipped_bins)


def _gaussian_window(n):
    i = np.arange(n)
    mid = (n - 1) / 2
    return np.exp(-0.5 * ((i - mid) / (GAUSS_WINDOW_WIDTH * n)) ** 2)


def _parabolic_vertex(ym1, y0, yp1):
    """Offset (in bins) and height of the parabola through three points."""
    denom = ym1 - 2 * y0 + yp1
    if denom == 0:
        return 0.0, y0
    delta = 0.5 * (ym1 - yp1) / denom
    return delta, y0 - 0.25 * (ym1 - yp1) * delta


def track_spectral_peak(signal: TimeSeries, bin_duration: float = 0.2,
                        resolution_bandwidth: float = 5.0, band=None,
                        refine: bool = True) -> RingdownRecord:
    """Locate the spectral maximum in consecutive, non-overlapping time bins.

    Each bin is split into segments of length 1/RBW whose Gaussian-windowed
    power spectra are averaged.  The peak is refined by a parabola through
    the log-magnitudes of the three bins around the maximum (exact for a
    Gaussian window), and the amplitude is calibrated so that a pure
    sinusoid of amplitude A reads A.  Record times are bin centres.
    """
    rate = signal.sample_rate
    n_bin = int(round(bin_duration * rate))
    if n_bin < 16:
        raise ValueError(f"bin of {bin_duration} s holds {n_bin} samples; need >= 16")
    if resolution_bandwidth * bin_duration < 1 - 1e-9:
        raise ValueError("resolution_bandwidth must be >= 1 / bin_duration")
    n_seg = min(n_bin, int(round(rate / resolution_bandwidth)))
    n_bins = signal.values.size // n_bin
    if n_bins == 0:
        raise ValueError(f"signal of {signal.duration:g} s is shorter than one {bin_duration} s bin")
    window = _gaussian_window(n_seg)
    gain = window.sum() / 2.0
    df = rate / n_seg
    freqs = np.fft.rfftfreq(n_seg, 1.0 / rate)
    lo, hi = 1, freqs.size - 2
    if band is not None:
        lo = max(lo, int(np.ceil(band[0] / df)))
        hi = min(hi, int(np.floor(band[1] / df)))
    times, fs, amps, skipped = [], [], [], []
    for b in range(n_bins):
        chunk = signal.values[b * n_bin:(b + 1) * n_bin]
        segs = chunk[: (n_bin // n_seg) * n_seg].reshape(-1, n_seg)
        power = np.mean(np.abs(np.fft.rfft(segs * window, axis=1)) ** 2, axis=0)
        mag = np.sqrt(power)
        k = lo + int(np.argmax(mag[lo:hi + 1]))
        if mag[k] == 0:
            skipped.append(b)
            continue
        if refine and mag[k - 1] > 0 and mag[k + 1] > 0:
            delta, logpeak = _parabolic_vertex(*np.log(mag[k - 1:k + 2]))
            f, peak = (k + delta) * df, math.exp(logpeak)
        else:
            f, peak = k * df, mag[k]
        times.append(signal.start_time + (b + 0.5) * n_bin / rate)
        fs.append(f)
        amps.append(peak / gain)
    if skipped:
        warnings.warn(f"skipped {len(skipped)} all-zero bin(s): {skipped}")
    return RingdownRecord(np.array(times), np.array(fs), np.array(amps),
                          bin_duration, resolution_bandwidth, tuple(skipped))


def _refine_crossing(x, i, s):
    """Newton on the 4-point Lagrange cubic through samples i-1..i+2.

    ``s`` is the linear-interpolation estimate as a fraction of a sample.
    """
    y0, y1, y2, y3 = x[i - 1], x[i], x[i + 1], x[i + 2]
    for _ in range(4):
        val = (-s * (s - 1) * (s - 2) / 6 * y0 + (s + 1) * (s - 1) * (s - 2) / 2 * y1
               - (s + 1) * s * (s - 2) / 2 * y2 + (s + 1) * s * (s - 1) / 6 * y3)
        der = (-(3 * s * s - 6 * s + 2) / 6 * y0 + (3 * s * s - 4 * s - 1) / 2 * y1
               - (3 * s * s - 2 * s - 2) / 2 * y2 + (3 * s * s - 1) / 6 * y3)
        s = s - val / der
    return s


def zero_crossings(signal: TimeSeries, refine: bool = True):
    """Crossing times and their half-cycle indices.

    Crossings are found by linear interpolation between samples, then refined
    on a local cubic.  Noise-induced clusters (spacing below half the median)
    are collapsed to their mean; the half-cycle index is counted from the
    spacing so that a dropped crossing does not slip the phase.
    """
    x = signal.values
    i = np.nonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))[0]
    s = x[i] / (x[i] - x[i + 1])
    if refine:
        inner = (i >= 1) & (i + 2 < x.size)
        s = s.copy()
        s[inner] = _refine_crossing(x, i[inner], s[inner])
    tc = signal.start_time + (i + s) / signal.sample_rate
    if tc.size < 3:
        return tc, np.arange(tc.size)
    spacing = np.median(np.diff(tc))
    groups = np.concatenate([[0], np.cumsum(np.diff(tc) > 0.5 * spacing)])
    if groups[-1] + 1 != tc.size:
        tc = np.bincount(groups, weights=tc) / np.bincount(groups)
    steps = np.rint(np.diff(tc) / spacing).astype(int)
    index = np.concatenate([[0], np.cumsum(steps)])
    return tc, index


def track_zero_crossings(signal: TimeSeries, window_cycles: int = 20,
                         refine: bool = True) -> RingdownRecord:
    """Frequency and amplitude per window of ``window_cycles`` cycles.

    Frequency is from a straight-line fit of crossing time against
    half-cycle index; amplitude from a least-squares sinusoid at that
    frequency over the window.  Record times are window midpoints.
    """
    tc, index = zero_crossings(signal, refine)
    per_window = 2 * window_cycles
    n_win = int(index[-1] // per_window) if index.size else 0
    if n_win < 1:
        raise ValueError("signal holds fewer zero crossings than one window")
    t_all = signal.times
    x_all = signal.values
    times, fs, amps = [], [], []
    for w in range(n_win):
        sel = (index >= w * per_window) & (index <= (w + 1) * per_window)
        if sel.sum() < 4:
            continue
        k, t = index[sel], tc[sel]
        slope, intercept = np.polyfit(k, t, 1)
        f = 1.0 / (2.0 * slope)
        lo, hi = np.searchsorted(t_all, [t[0], t[-1]])
        tt, xx = t_all[lo:hi], x_all[lo:hi]
        mid = 0.5 * (t[0] + t[-1])
        phase = 2 * math.pi * f * (tt - mid)
        basis = np.column_stack([np.cos(phase), np.sin(phase)])
        coef, *_ = np.linalg.lstsq(basis, xx, rcond=None)
        times.append(mid)
        fs.append(f)
        amps.append(math.hypot(*coef))
    bin_duration = window_cycles / np.median(fs)
    return RingdownRecord(np.array(times), np.array(fs), np.array(amps),
                          bin_duration, 1.0 / bin_duration)


def write_record_csv(record: RingdownRecord, path) -> None:
    lines = [
        f"# bin_duration: {record.bin_duration!r}",
        f"# resolution_bandwidth: {record.resolution_bandwidth!r}",
        f"# skipped_bins: {','.join(map(str, record.skipped_bins))}",
        "time_s,frequency_hz,amplitude",
    ]
    for t, f, a in zip(record.times.tolist(), record.frequencies.tolist(),
                       record.amplitudes.tolist()):
        lines.append(f"{t!r},{f!r},{a!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_record_csv(path) -> RingdownRecord:
    header, rows = {}, []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                header[key.strip()] = val.strip()
            elif line.startswith("time_s"):
                continue
            else:
                try:
                    rows.append([float(v) for v in line.split(",")])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    skipped = tuple(int(v) for v in header.get("skipped_bins", "").split(",") if v)
    return RingdownRecord(arr[:, 0], arr[:, 1], arr[:, 2], float(header["bin_duration"]),
                          float(header["resolution_bandwidth"]), skipped)
