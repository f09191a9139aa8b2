import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dgsem.mesh import build_box_mesh  # noqa: E402
from dgsem.physics import GasParams, conservative_from_primitive  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Taylor-Green runs and sweeps, deselect with -m 'not slow'")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def gas():
    return GasParams()


def random_states(rng, shape, gas, spread=0.3):
    """Valid conservative states with rho, p in [1 - spread, 1 + spread] and |v| < 1."""
    rho = 1.0 + spread * rng.uniform(-1.0, 1.0, size=shape)
    p = 1.0 + spread * rng.uniform(-1.0, 1.0, size=shape)
    v = 0.5 * rng.uniform(-1.0, 1.0, size=shape + (3,))
    return conservative_from_primitive(rho, v, p, gas)


@pytest.fixture
def state_sampler(rng, gas):
    def sample(shape, spread=0.3):
        return random_states(rng, tuple(shape), gas, spread)
    return sample


@pytest.fixture(scope="session")
def warped_mesh():
    """3x3x3 sine-warped unit box, N=3."""
    return build_box_mesh([[0.0, 1.0]] * 3, [3, 3, 3], 3, warp="sine", amplitude=0.05)


@pytest.fixture(scope="session")
def affine_mesh():
    return build_box_mesh([[0.0, 2.0], [0.0, 1.0], [0.0, 3.0]], [2, 2, 2], 3)


def smooth_field(x, rng, gas, amplitude=0.1, length=1.0):
    """Periodic smooth state on nodes x (..., 3)."""
    phases = rng.uniform(0.0, 2.0 * np.pi, size=5)
    k = 2.0 * np.pi / length
    waves = [np.sin(k * (x[..., 0] + 2 * x[..., 1] - x[..., 2]) + phases[m]) * np.cos(k * x[..., m % 3])
             for m in range(5)]
    rho = 1.0 + amplitude * waves[0]
    v = amplitude * np.stack(waves[1:4], axis=-1)
    p = 1.0 + amplitude * waves[4]
    return conservative_from_primitive(rho, v, p, gas)
