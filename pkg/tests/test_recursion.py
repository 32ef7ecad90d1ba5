import math

import numpy as np
import pytest

from entprop import qmat
from entprop.channels import prepare_resource
from entprop.protocol import ProtocolSpec, protocol_delta, run_branch
from entprop.recursion import (BELL_PRIME, UnsupportedCase, closed_form_delta, first_round_blocks, reassemble,
                               recurse_round, run_recursion, single_site_blocks)
from entprop.states import AuxiliaryParams, auxiliary_state


def random_case(rng, n):
    z, p, lam = rng.uniform(0, math.pi / 4), rng.uniform(), rng.uniform()
    aux = tuple(AuxiliaryParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(n))
    outs = tuple(int(o) for o in rng.integers(1, 5, n))
    return z, p, lam, aux, outs


def test_blocks_match_direct_decomposition(rng):
    for _ in range(10):
        z, p = rng.uniform(0, math.pi / 2), rng.uniform()
        aux = AuxiliaryParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        t = np.kron(prepare_resource(z, "B", "pdc", p), qmat.projector(auxiliary_state(aux))).reshape(2, 4, 2, 4)
        tab = single_site_blocks(z, p, aux)
        for k in range(16):
            a, b = divmod(k, 4)
            direct = np.einsum("k,akbl,l->ab", BELL_PRIME[a].conj(), t, BELL_PRIME[b])
            assert np.abs(direct - tab[k]).max() < 1e-14


@pytest.mark.parametrize("n,trials", [(1, 30), (2, 10), (3, 10)])
def test_matches_brute_force(n, trials):
    rng = np.random.default_rng(100 + n)
    for _ in range(trials):
        z, p, lam, aux, outs = random_case(rng, n)
        mat, prob = reassemble(run_recursion(z, p, aux, lam, outs))
        br = run_branch(ProtocolSpec(n=n, lambda_b=lam, aux_b=aux, z=z, placement="B", channel="pdc", p=p), outs)
        assert abs(prob - br.probability) < 1e-10
        assert np.linalg.norm(mat / prob - br.state) < 1e-10


def test_block_sparsity():
    rng = np.random.default_rng(5)
    z, p, lam, aux, outs = random_case(rng, 2)
    mat, prob = reassemble(run_recursion(z, p, aux, lam, outs))
    # every entry lives in the 16 blocks: expanding over the last-pair Bell basis loses nothing
    t = mat.reshape(4, 4, 4, 4)
    back = sum(np.kron(np.einsum("k,akbl,l->ab", BELL_PRIME[a].conj(), t, BELL_PRIME[b]),
                       np.outer(BELL_PRIME[a], BELL_PRIME[b].conj())) for a in range(4) for b in range(4))
    assert np.abs(back - mat).max() < 1e-12


def test_pure_projective_case():
    st = first_round_blocks(math.pi / 4, 0.0, AuxiliaryParams(), 1.0, 3)
    mat, prob = reassemble(st)
    rho = mat / prob
    assert np.isclose(np.trace(rho @ rho).real, 1.0)
    assert np.allclose(rho, rho.conj().T)


def test_alpha_one_beta_zero_collapse():
    tab = single_site_blocks(0.4, 0.2, AuxiliaryParams(0.0, 0.0))
    # type 2 and 3 diagonal entries carry a beta factor; type 1 off-diagonals too
    assert np.allclose(np.diag(tab[2]), 0) and np.allclose(np.diag(tab[8]), 0)
    assert np.isclose(tab[0][0, 1], 0) and np.isclose(tab[0][1, 0], 0)


def test_trivial_round_keeps_earlier_spectrum():
    aux = (AuxiliaryParams(0.7, 0.2), AuxiliaryParams(1.9, 4.0))
    one = reassemble(run_recursion(0.5, 0.3, aux[:1], 0.6, (3,)))[0]
    st = recurse_round(first_round_blocks(0.5, 0.3, aux[0], 0.6, 3), aux[1], 0.0, 2)
    two, prob = reassemble(st)
    a_one = qmat.partial_trace(one / np.trace(one), [0])
    a_two = qmat.partial_trace(two / prob, [0])
    assert np.allclose(np.linalg.eigvalsh(a_one), np.linalg.eigvalsh(a_two))


def test_unsupported_channel():
    with pytest.raises(UnsupportedCase):
        first_round_blocks(0.4, 0.2, AuxiliaryParams(), 0.5, 3, kind="adc")


def test_closed_form_matches_simulation():
    for lam in np.linspace(0.6, 0.95, 8):
        for p in (0.1, 0.2, 0.4):
            spec = ProtocolSpec(n=1, lambda_b=float(lam), z=math.pi / 8, placement="B", channel="adc", p=p)
            assert abs(closed_form_delta(math.pi / 8, p, float(lam)) - protocol_delta(spec)) < 1e-8


def test_closed_form_limits():
    assert abs(closed_form_delta(math.pi / 8, 0.0, 1.0)) < 1e-12
    assert abs(closed_form_delta(math.pi / 8, 0.3, 0.0)) < 1e-12
