import numpy as np
import pytest

from petzgap.states import SamplerConfig, make_density, sample


def ginibre(dim, rank, seed):
    return sample(SamplerConfig(dim=dim, rank=rank, seed=seed, kind="ginibre"))


def diagonal_state(values):
    return make_density(np.diag(np.asarray(values, dtype=float)))


def exact_product_pair(n1, n2, seed):
    """(rho1 x rho2, rho1 x sigma2): recovered exactly through 1 x M_n2."""
    rho1 = ginibre(n1, n1, seed)
    rho2 = ginibre(n2, n2, seed + 1)
    sig2 = ginibre(n2, n2, seed + 2)
    rho = make_density(np.kron(rho1.matrix, rho2.matrix))
    sigma = make_density(np.kron(rho1.matrix, sig2.matrix))
    return rho, sigma


@pytest.fixture
def pair3():
    return ginibre(3, 3, 11), ginibre(3, 3, 12)


@pytest.fixture
def pair4():
    return ginibre(4, 4, 21), ginibre(4, 4, 22)
