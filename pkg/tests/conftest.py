import numpy as np
import pytest

from statarb.synthetic import cointegrated_pair, pulse_pair, sinusoid_pair


@pytest.fixture(scope="session")
def sinusoid_series():
    return sinusoid_pair(periods=12, period=64)


@pytest.fixture(scope="session")
def planted_series():
    return pulse_pair()


@pytest.fixture(scope="session")
def ou_series():
    # calibrated so every zone appears and the rule strategy is profitable
    return cointegrated_pair(4000, seed=11, theta=0.02, noise_sigma=0.05,
                             walk_std=0.05)


def sinusoid_z_formula(series, window=64):
    """Closed-form z of the sinusoid fixture at decision indices."""
    t = np.arange(window - 1, len(series))
    return t, np.sqrt(2.0) * np.sin(2.0 * np.pi * t / window)
