import numpy as np
import pytest

from twinblob.algebra import make_params, twin_rep, xxz_rep
from twinblob.baxter import LaxFactory

MUS = (0.7, 1.1, np.pi / 3)
QS = (2.0, 1.3 * np.exp(0.4j))
TWIN_BOUNDARIES = ("i", "ii", "plus", "iii")


def build(model, boundary, N=2, mu=0.7, Q=2.0, zeta=0.3):
    p = make_params(mu, Q, zeta, model=model, boundary=boundary)
    rep = (xxz_rep if model == "xxz" else twin_rep)(p, N, boundary)
    return p, rep, LaxFactory(rep)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
