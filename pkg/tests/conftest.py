import numpy as np
import pytest

from statvac.spherical.grid import build_grid


@pytest.fixture(scope="session")
def grid8():
    return build_grid(8)


@pytest.fixture(scope="session")
def grid12():
    return build_grid(12)


@pytest.fixture(scope="session")
def grid16():
    return build_grid(16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
