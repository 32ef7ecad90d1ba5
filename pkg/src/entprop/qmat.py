"""Dense linear algebra over multi-qubit Hilbert spaces.

Operators are plain ``numpy`` arrays of shape ``(2**n, 2**n)``. Qubits are
ordered big-endian: basis index ``sum(bit_k * 2**(n - 1 - k))``, so qubit 0
is the most significant bit and ``np.kron(a, b)`` puts ``a`` on the lower
qubit indices.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-8
DENSITY_TOL = 1e-10
PSD_TOL = 1e-9


def num_qubits(op: np.ndarray) -> int:
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if op.ndim != 2 or op.shape[1] != dim or 2**n != dim:
        raise ValueError(f"expected a square operator on qubits, got shape {op.shape}")
    return n


def _check_sites(sites: Iterable[int], n: int, *, allow_empty: bool = False) -> list[int]:
    sites = list(sites)
    if not sites and not allow_empty:
        raise ValueError("subsystem index set must be nonempty")
    if len(set(sites)) != len(sites):
        raise ValueError(f"duplicate subsystem indices in {sites}")
    for s in sites:
        if not 0 <= s < n:
            raise ValueError(f"subsystem index {s} out of range for {n} qubits")
    return sites


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of the operators, left to right."""
    return reduce(np.kron, ops)


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced operator on the qubits in ``keep`` (returned in ascending order)."""
    n = num_qubits(rho)
    keep = sorted(_check_sites(keep, n))
    t = rho.reshape([2] * (2 * n))
    row = list(range(n))
    col = [q + n if q in keep else q for q in range(n)]
    out = keep + [q + n for q in keep]
    t = np.einsum(t, row + col, out)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def partial_transpose(rho: np.ndarray, sites: Iterable[int]) -> np.ndarray:
    """Transpose ``rho`` on the given qubits only."""
    n = num_qubits(rho)
    sites = _check_sites(sites, n)
    perm = list(range(2 * n))
    for s in sites:
        perm[s], perm[s + n] = perm[s + n], perm[s]
    return rho.reshape([2] * (2 * n)).transpose(perm).reshape(rho.shape)


def hermiticity_residual(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def hermitian_eigenvalues(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Roundoff asymmetry up to ``tol`` is removed by symmetrizing first; anything
    larger is treated as a caller error.
    """
    res = hermiticity_residual(h)
    if res > tol:
        raise ValueError(f"matrix is not Hermitian (residual {res:.3e} > {tol:.1e})")
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))


def embed(op: np.ndarray, sites: Sequence[int], n: int) -> np.ndarray:
    """Lift ``op`` acting on ``sites`` (in that order) to the full n-qubit space."""
    k = num_qubits(op)
    sites = _check_sites(sites, n)
    if len(sites) != k:
        raise ValueError(f"operator acts on {k} qubits but {len(sites)} sites given")
    if sites == list(range(sites[0], sites[0] + k)):
        left = np.eye(2 ** sites[0])
        right = np.eye(2 ** (n - sites[0] - k))
        return np.kron(np.kron(left, op), right)
    # general placement: act on leading axes then permute into position
    rest = [q for q in range(n) if q not in sites]
    full = np.kron(op, np.eye(2 ** (n - k))).reshape([2] * (2 * n))
    order = list(sites) + rest
    inv = np.argsort(order)
    perm = list(inv) + [q + n for q in inv]
    return full.transpose(perm).reshape(2**n, 2**n)


def conjugate(rho: np.ndarray, op: np.ndarray) -> np.ndarray:
    return op @ rho @ op.conj().T


def density_violations(rho: np.ndarray, tol: float = DENSITY_TOL, psd_tol: float = PSD_TOL) -> list[str]:
    """Reasons ``rho`` fails to be a density matrix; empty when it is one."""
    problems = []
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        problems.append(f"trace {tr.real:.3e}{tr.imag:+.1e}j != 1")
    res = hermiticity_residual(rho)
    if res > tol:
        problems.append(f"hermiticity residual {res:.3e}")
    else:
        lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if lo < -psd_tol:
            problems.append(f"minimum eigenvalue {lo:.3e}")
    return problems


def is_density_matrix(rho: np.ndarray, tol: float = DENSITY_TOL, psd_tol: float = PSD_TOL) -> bool:
    return not density_violations(rho, tol, psd_tol)


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())
