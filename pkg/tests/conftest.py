import numpy as np
import pytest

from fasmrc.channel import DerivedParams


@pytest.fixture
def params_unit():
    """Synthetic parameter set with omega = 1, mu = 0.5 (phi = 2)."""
    return DerivedParams(mu=0.5, omega=1.0, z=31.0, T=3)


@pytest.fixture
def rng():
    return np.random.default_rng(314159)
