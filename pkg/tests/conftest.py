import numpy as np
import pytest

from blochball.sampling import interior_points, suite_rng


@pytest.fixture
def rng():
    return suite_rng(42, "tests")


def random_interior(rng, m, n, rmax=0.95):
    return interior_points(rng, m, n, rmax=rmax)


@pytest.fixture(params=[2, 4, 16])
def dim(request):
    return request.param


def cvec(*vals):
    return np.array(vals, dtype=np.complex128)
