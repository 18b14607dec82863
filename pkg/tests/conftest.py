import numpy as np
import pytest

from mixnorm import FULL_LATTICE, SystemSpec, cos1, evolve


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def baker_series():
    return evolve(SystemSpec("baker"), cos1(), 80)


@pytest.fixture(scope="session")
def altered_series():
    return evolve(SystemSpec("altered_baker", a=0.8, b=0.6), cos1(), 100)


@pytest.fixture(scope="session")
def full_lattice_kind():
    return FULL_LATTICE
