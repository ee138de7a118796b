import numpy as np
import pytest


def random_complex(rng, m):
    return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
