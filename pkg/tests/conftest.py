import numpy as np
import pytest

from linfot.instances import BUILTIN, random_instance


@pytest.fixture(params=sorted(BUILTIN))
def builtin_pair(request):
    return request.param, BUILTIN[request.param]()


def random_pairs(count, start=1000):
    return [random_instance(start + k) for k in range(count)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
