import numpy as np
import pytest

from giant_swing import DistributedParams, SimplifiedParams, TESTBED_PARAMS


@pytest.fixture
def simplified():
    return SimplifiedParams(m=1.0, l=1.0, g=9.81)


@pytest.fixture
def distributed():
    return TESTBED_PARAMS


@pytest.fixture(params=["simplified", "distributed"])
def any_model(request, simplified, distributed):
    return simplified if request.param == "simplified" else distributed


@pytest.fixture
def rng():
    return np.random.default_rng(20240117)
