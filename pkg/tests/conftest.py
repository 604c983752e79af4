import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lsk", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lsk")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def lie_basis(dim, i):
    e = np.zeros(dim)
    e[i] = 1.0
    return e
