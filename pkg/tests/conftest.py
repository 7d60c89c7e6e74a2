import numpy as np
import pytest

from hiersearch import datasets


@pytest.fixture
def vehicle():
    return datasets.vehicle()


@pytest.fixture
def p_equal(vehicle):
    return np.full(vehicle.n, 1.0 / vehicle.n)


@pytest.fixture
def p_real(vehicle):
    return datasets.vehicle_real_weights(vehicle)


@pytest.fixture
def chain4():
    return datasets.chain(4)


@pytest.fixture
def diamond():
    return datasets.diamond()
