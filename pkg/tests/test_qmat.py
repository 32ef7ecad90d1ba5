import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entprop import qmat
from conftest import random_density


def loop_partial_trace(rho, keep, n):
    # index-summation oracle
    keep = sorted(keep)
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for i in range(2**n):
        for j in range(2**n):
            bi = [(i >> (n - 1 - k)) & 1 for k in range(n)]
            bj = [(j >> (n - 1 - k)) & 1 for k in range(n)]
            if any(bi[k] != bj[k] for k in range(n) if k not in keep):
                continue
            a = int("".join(str(bi[k]) for k in keep), 2)
            b = int("".join(str(bj[k]) for k in keep), 2)
            out[a, b] += rho[i, j]
    return out


def test_tensor_identity_and_projectors():
    assert np.array_equal(qmat.tensor(np.eye(2), np.eye(2)), np.eye(4))
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    assert np.array_equal(qmat.tensor(p0, p1), np.diag([0, 1, 0, 0]))


def test_tensor_trace_multiplies(rng):
    a = rng.standard_normal((2, 2)); a = a + a.T
    b = rng.standard_normal((4, 4)); b = b + b.T
    assert np.isclose(np.trace(qmat.tensor(a, b)), np.trace(a) * np.trace(b))


def test_tensor_associative(rng):
    # exact on integer entries; rounding can differ in the last bit for general floats
    a, b, c = (rng.integers(-3, 4, (2, 2)) + 1j * rng.integers(-3, 4, (2, 2)) for _ in range(3))
    assert np.array_equal(qmat.tensor(qmat.tensor(a, b), c), qmat.tensor(a, qmat.tensor(b, c)))
    a, b, c = (random_density(rng, 1) for _ in range(3))
    assert np.abs(qmat.tensor(qmat.tensor(a, b), c) - qmat.tensor(a, qmat.tensor(b, c))).max() < 1e-15


def test_partial_trace_bell_and_product(rng):
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(bell, bell)
    for k in (0, 1):
        assert np.allclose(qmat.partial_trace(rho, [k]), np.eye(2) / 2)
    ra, rb = random_density(rng, 1), random_density(rng, 2)
    assert np.allclose(qmat.partial_trace(np.kron(ra, rb), [0]), ra)
    assert np.allclose(qmat.partial_trace(np.kron(ra, rb), [1, 2]), rb)
    assert np.allclose(qmat.partial_trace(np.kron(rb, ra), [2]), ra)


def test_partial_trace_ghz():
    ghz = np.zeros(8); ghz[0] = ghz[7] = 1 / np.sqrt(2)
    red = qmat.partial_trace(np.outer(ghz, ghz), [0, 1])
    assert np.allclose(red, np.diag([0.5, 0, 0, 0.5]))


def test_partial_trace_matches_loop_oracle(rng):
    rho = random_density(rng, 3)
    for keep in ([0], [1], [2], [0, 2], [1, 2]):
        assert np.allclose(qmat.partial_trace(rho, keep), loop_partial_trace(rho, keep, 3))


@pytest.mark.parametrize("keep", [[], [3], [0, 0]])
def test_partial_trace_rejects_bad_sites(keep):
    with pytest.raises(ValueError):
        qmat.partial_trace(np.eye(8) / 8, keep)


def test_partial_transpose_bell_spectrum():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    ev = np.linalg.eigvalsh(qmat.partial_transpose(np.outer(bell, bell), [1]))
    assert np.allclose(sorted(ev), [-0.5, 0.5, 0.5, 0.5])


def test_partial_transpose_involution_and_product(rng):
    rho = random_density(rng, 3)
    assert np.array_equal(qmat.partial_transpose(qmat.partial_transpose(rho, [0, 2]), [0, 2]), rho)
    prod = np.kron(random_density(rng, 1), random_density(rng, 1))
    assert np.linalg.eigvalsh(qmat.partial_transpose(prod, [0])).min() > -1e-12


def test_partial_transpose_rejects_bad_sites():
    with pytest.raises(ValueError):
        qmat.partial_transpose(np.eye(4) / 4, [2])


def test_hermitian_eigenvalues_examples(rng):
    assert np.allclose(qmat.hermitian_eigenvalues(np.eye(4)), [1, 1, 1, 1])
    assert np.allclose(qmat.hermitian_eigenvalues(np.diag([3.0, -1.0])), [-1, 3])
    g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = g + g.conj().T
    w, v = np.linalg.eigh(h)
    ev = qmat.hermitian_eigenvalues(h)
    assert np.all(np.diff(ev) >= 0)
    assert np.allclose(v @ np.diag(ev) @ v.conj().T, h, atol=1e-9)
    assert abs(ev.sum() - np.trace(h).real) < 1e-9


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(ValueError):
        qmat.hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))


def test_embed_matches_kron_for_noncontiguous(rng):
    op = rng.standard_normal((4, 4))
    swap = np.eye(4)[[0, 2, 1, 3]]
    # op on (2, 0) of three qubits equals permuted kron
    full = qmat.embed(op, [2, 0], 3)
    ref = np.zeros((8, 8))
    for i in range(8):
        for j in range(8):
            bi = [(i >> (2 - k)) & 1 for k in range(3)]
            bj = [(j >> (2 - k)) & 1 for k in range(3)]
            if bi[1] != bj[1]:
                continue
            ref[i, j] = op[2 * bi[2] + bi[0], 2 * bj[2] + bj[0]]
    assert np.allclose(full, ref)
    assert np.allclose(qmat.embed(op, [0, 1], 2), op)
    assert np.allclose(qmat.embed(op, [1, 0], 2), swap @ op @ swap)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(0, 2), min_size=1, max_size=2, unique=True))
def test_partial_transpose_keeps_trace_and_hermiticity(seed, sites):
    rho = random_density(np.random.default_rng(seed), 3)
    pt = qmat.partial_transpose(rho, sites)
    assert np.isclose(np.trace(pt), np.trace(rho), atol=1e-14)
    assert np.array_equal(pt, pt.conj().T) or np.abs(pt - pt.conj().T).max() < 1e-15


def test_density_checks():
    assert qmat.is_density_matrix(np.eye(4) / 4)
    assert not qmat.is_density_matrix(np.diag([1.5, -0.5]))
