"""Seeded noise sources used to emulate instrument and oscillator imperfections."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .timeseries import TimeSeries


@dataclass(frozen=True)
class NoiseSpec:
    """Noise magnitudes; frequency terms are Allan deviations at 1 s.

    ``additive_white_rms`` is in the units of whatever signal it is added to.
    """

    additive_white_rms: float = 0.0
    fractional_frequency_white: float = 0.0
    fractional_frequency_random_walk: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("additive_white_rms", "fractional_frequency_white",
                     "fractional_frequency_random_walk"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def has_frequency_noise(self) -> bool:
        return self.fractional_frequency_white > 0 or self.fractional_frequency_random_walk > 0

    def generators(self) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
        """Independent streams for (additive, white FM, random-walk FM).

        Separate streams keep e.g. the additive noise unchanged when a
        frequency-noise level is switched on.
        """
        seqs = np.random.SeedSequence(self.seed).spawn(3)
        return tuple(np.random.default_rng(s) for s in seqs)


def fractional_frequency_samples(spec: NoiseSpec, n: int, rate: float) -> np.ndarray:
    """White FM plus random-walk FM, sampled at ``rate``.

    White FM samples have std ``a sqrt(rate)`` so that ADEV(1 s) = a.  The
    random walk has increment std ``b sqrt(3 / rate)``: a walk with diffusion
    constant D has AVAR(tau) = D tau / 3.
    """
    _, g_white, g_walk = spec.generators()
    y = np.zeros(n)
    if spec.fractional_frequency_white > 0:
        y += spec.fractional_frequency_white * math.sqrt(rate) * g_white.standard_normal(n)
    if spec.fractional_frequency_random_walk > 0:
        steps = spec.fractional_frequency_random_walk * math.sqrt(3.0 / rate) * g_walk.standard_normal(n)
        y += np.cumsum(steps)
    return y


def synthesize_frequency_noise(spec: NoiseSpec, duration: float, rate: float) -> TimeSeries:
    if not spec.has_frequency_noise:
        raise ValueError("noise spec has no frequency-noise component to synthesize")
    if duration <= 0 or rate <= 0:
        raise ValueError("duration and rate must be positive")
    n = int(round(duration * rate))
    return TimeSeries(rate, fractional_frequency_samples(spec, n, rate),
                      channel="fractional_frequency", seed=spec.seed)
