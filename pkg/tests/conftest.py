import numpy as np
import pytest

from insdecay.grid import Grid
from insdecay.initial_data import make_rng


@pytest.fixture(scope="session")
def grid64():
    return Grid(64, 2.0 * np.pi)

@pytest.fixture(scope="session")
def grid128():
    return Grid(128, 2.0 * np.pi)

@pytest.fixture(scope="session")
def grid64_box():
    # physical-scale box used by the solver-facing tests
    return Grid(64, 50.0)


@pytest.fixture()
def rng():
    return make_rng(20_230_817)
