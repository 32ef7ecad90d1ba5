import math

import numpy as np
import pytest
import scipy.linalg

from entprop import qmat
from entprop.channels import prepare_resource
from entprop.measurement import (BELL_PROJECTORS, UnsharpBellMeasurement, apply_measurement,
                                 canonical_coefficients, measurement_operators, povm_elements)
from entprop.states import bell_state
from conftest import random_density


def test_povm_limits():
    assert np.allclose(povm_elements(1.0), BELL_PROJECTORS)
    assert np.allclose(povm_elements(0.0), np.eye(4) / 4)


def test_povm_spectrum_and_completeness():
    for lam in np.linspace(0, 1, 21):
        els = povm_elements(lam)
        assert np.abs(els.sum(0) - np.eye(4)).max() < 1e-12
        for e in els:
            ev = np.sort(np.linalg.eigvalsh(e))
            assert np.allclose(ev, sorted([(1 + 3 * lam) / 4] + [(1 - lam) / 4] * 3))


def test_operators_are_positive_square_roots():
    for lam in (0.0, 0.3, 0.77, 1.0):
        ops = measurement_operators(lam)
        els = povm_elements(lam)
        for o, e in zip(ops, els):
            assert np.abs(o @ o - e).max() < 1e-12
            assert np.allclose(o, scipy.linalg.sqrtm(e), atol=1e-7)
        assert np.abs(sum(o.conj().T @ o for o in ops) - np.eye(4)).max() < 1e-12
    assert np.allclose(measurement_operators(1.0), BELL_PROJECTORS)
    assert np.allclose(measurement_operators(0.0), np.eye(4) / 2)


def test_lambda_range():
    with pytest.raises(ValueError):
        povm_elements(1.5)
    with pytest.raises(ValueError):
        measurement_operators(-0.1)


def test_coefficients_sum_to_one():
    m = canonical_coefficients(0.4)
    assert np.allclose(m.sum(0), 1) and np.allclose(m.sum(1), 1)
    with pytest.raises(ValueError):
        UnsharpBellMeasurement(0.5, np.ones((4, 4)))


def test_trivial_measurement(rng):
    rho = random_density(rng, 3)
    for op in measurement_operators(0.0):
        out, prob = apply_measurement(rho, op, (1, 2))
        assert np.isclose(prob, 0.25)
        assert np.allclose(out / prob, rho)
    mixed = np.eye(8) / 8
    for op in measurement_operators(0.6):
        assert np.isclose(apply_measurement(mixed, op, (0, 2))[1], 0.25)


def test_probabilities_sum_to_one(rng):
    rho = random_density(rng, 3)
    for lam in np.linspace(0, 1, 21):
        total = sum(apply_measurement(rho, op, (2, 0))[1] for op in measurement_operators(lam))
        assert abs(total - 1) < 1e-10


def test_projective_outcome_three_decouples():
    rho = np.kron(prepare_resource(math.pi / 4), np.diag([1.0, 0.0]))
    out, prob = apply_measurement(rho, measurement_operators(1.0)[2], (1, 2))
    out /= prob
    pair = qmat.partial_trace(out, [1, 2])
    assert np.allclose(pair, qmat.projector(bell_state(3)))
    # only the |11>|0> component overlaps |B3>, so A is left in |1>
    assert np.allclose(out, np.kron(np.diag([0, 1]), pair))


def test_bad_sites():
    with pytest.raises(ValueError):
        apply_measurement(np.eye(8) / 8, np.eye(4), (1, 1))
    with pytest.raises(ValueError):
        apply_measurement(np.eye(8) / 8, np.eye(2), (0, 1))


def test_first_round_lambda_coefficients():
    # Bell-basis blocks of M^3 (rho (x) chi) M^3 carry sqrt(m_i m_r)
    lam = 0.37
    l1, l3 = (1 - lam) / 4, (1 + 3 * lam) / 4
    l2 = math.sqrt(l1 * l3)
    rho = np.kron(prepare_resource(0.5), np.diag([1.0, 0.0]))
    before = rho.reshape(2, 4, 2, 4)
    out, _ = apply_measurement(rho, measurement_operators(lam)[2], (1, 2))
    after = out.reshape(2, 4, 2, 4)
    weights = {(2, 2): l3, (2, 0): l2, (0, 2): l2, (0, 1): l1, (1, 1): l1}
    for (i, r), w in weights.items():
        bi, br = bell_state(i + 1), bell_state(r + 1)
        blk_b = np.einsum("k,akbl,l->ab", bi.conj(), before, br)
        blk_a = np.einsum("k,akbl,l->ab", bi.conj(), after, br)
        assert np.allclose(blk_a, w * blk_b)
