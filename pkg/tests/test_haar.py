import numpy as np

from entprop.haar import aux_grid, batch_delta, haar_advantage
from entprop.protocol import ProtocolSpec, protocol_delta
from entprop.states import haar_random_states


def test_batch_matches_protocol():
    psi = haar_random_states(3, 4)
    rho = np.einsum("si,sj->sij", psi, psi.conj())
    auxes = aux_grid()[:6]
    got = batch_delta(rho, 0.7, auxes)
    ref = np.array([[protocol_delta(ProtocolSpec(n=1, lambda_b=0.7, aux_b=(a,), resource=r)) for a in auxes]
                    for r in rho])
    assert np.abs(got - ref).max() < 1e-12


def test_advantage_deterministic_and_thread_independent():
    lams = np.linspace(0.2, 0.9, 4)
    _, a = haar_advantage(5, 300, [0.3], lams, threads=1)
    _, b = haar_advantage(5, 300, [0.3], lams, threads=2)
    assert np.array_equal(a[0.3][0], b[0.3][0]) and np.array_equal(a[0.3][1], b[0.3][1])


def test_aux_grid_covers_poles():
    g = aux_grid()
    assert g[0].theta == 0.0 and abs(g[-1].theta - np.pi) < 1e-15
    assert len(g) == 2 + 5 * 4
