import math

import pytest
from hypothesis import HealthCheck, settings

from gupmech.physics import OscillatorSpec

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def sapphire():
    return OscillatorSpec.from_frequency("sapphire", 0.3, 127071.0, 0.5 * 2 * math.pi * 127071.0 * 173)


@pytest.fixture
def quartz():
    return OscillatorSpec.from_frequency("quartz", 5e-6, 10e6, 1e10)


@pytest.fixture
def desk():
    """kHz-scale stand-in whose ringdown takes seconds to simulate."""
    return OscillatorSpec.from_frequency("desk", 0.3, 1000.0, 4000.0)
