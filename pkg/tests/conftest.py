import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def skew(rng, d, scale=1.0):
    a = np.triu(rng.normal(scale=scale, size=(d, d)), 1)
    return a - a.T
