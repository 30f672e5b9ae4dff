import math

import numpy as np
import pytest

from cavphase import geometry


@pytest.fixture(scope="session")
def circle():
    return geometry.circle()


@pytest.fixture(scope="session")
def quadrupole():
    return geometry.quadrupole(0.05)


@pytest.fixture(scope="session")
def onigiri():
    return geometry.onigiri(0.08)


@pytest.fixture(scope="session")
def limacon():
    return geometry.limacon(0.43)


def circular_mean(s_norm):
    """Mean of a periodic [0,1) coordinate, robust across the wrap."""
    z = np.exp(2j * math.pi * np.asarray(s_norm)).mean()
    return (np.angle(z) / (2 * math.pi)) % 1.0


def circular_spread(s_norm):
    """Circular standard deviation of a periodic [0,1) coordinate."""
    z = np.exp(2j * math.pi * np.asarray(s_norm)).mean()
    r = min(max(abs(z), 1e-300), 1.0)
    return math.sqrt(-2.0 * math.log(r)) / (2 * math.pi)


def circular_distance(a, b, period=1.0):
    d = (a - b) % period
    return min(d, period - d)
