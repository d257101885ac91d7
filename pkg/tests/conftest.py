import numpy as np
import pytest

from eulerlab import Grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid16():
    return Grid(dim=2, n=16, length=2.0 * np.pi)


@pytest.fixture
def grid32():
    return Grid(dim=2, n=32, length=2.0 * np.pi)


@pytest.fixture
def grid3d():
    return Grid(dim=3, n=16, length=2.0 * np.pi)
