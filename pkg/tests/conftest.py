import numpy as np
import pytest


def random_density(rng, n, rank=None):
    d = 2**n
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(rng, d=2):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
