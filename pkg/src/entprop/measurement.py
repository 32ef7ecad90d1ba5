"""Unsharp two-qubit measurements diagonal in the Bell basis.

The POVM elements are ``lam * P_j + (1 - lam) * I/4``; the state-update
operators are their positive square roots, ``sqrt(m_jj) P_j + sqrt(m_jk) (I - P_j)``.
Only the square-root choice reproduces cross terms of weight
``sqrt((1+3lam)/4 * (1-lam)/4)`` between the outcome projector and the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import qmat
from .states import BELL_VECTORS

BELL_PROJECTORS = np.array([np.outer(b, b.conj()) for b in BELL_VECTORS])


def _check_lambda(lam: float) -> float:
    if not 0 <= lam <= 1:
        raise ValueError(f"unsharpness lambda={lam} outside [0, 1]")
    return float(lam)


def canonical_coefficients(lam: float) -> np.ndarray:
    """m[j, k]: weight of Bell projector k in outcome j."""
    lam = _check_lambda(lam)
    m = np.full((4, 4), (1 - lam) / 4)
    np.fill_diagonal(m, (1 + 3 * lam) / 4)
    return m


@dataclass(frozen=True)
class UnsharpBellMeasurement:
    lam: float
    m: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        _check_lambda(self.lam)
        if self.m is None:
            object.__setattr__(self, "m", canonical_coefficients(self.lam))
        m = np.asarray(self.m, dtype=float)
        if m.shape != (4, 4) or np.any(m < 0):
            raise ValueError("coefficient matrix must be 4x4 and nonnegative")
        if not np.allclose(m.sum(axis=0), 1.0, atol=1e-12):
            raise ValueError("coefficients must sum to one over outcomes for each Bell projector")
        object.__setattr__(self, "m", m)

    def povm_elements(self) -> np.ndarray:
        return np.einsum("jk,kab->jab", self.m, BELL_PROJECTORS).astype(complex)

    def operators(self) -> np.ndarray:
        return np.einsum("jk,kab->jab", np.sqrt(self.m), BELL_PROJECTORS).astype(complex)


def povm_elements(lam: float) -> np.ndarray:
    """Array of shape (4, 4, 4): element j is ``lam P_j + (1-lam) I/4``."""
    return UnsharpBellMeasurement(lam).povm_elements()


@lru_cache(maxsize=512)
def _operators_cached(lam: float) -> np.ndarray:
    ops = UnsharpBellMeasurement(lam).operators()
    ops.setflags(write=False)
    return ops


def measurement_operators(lam: float) -> np.ndarray:
    """Positive square roots of the POVM elements, shape (4, 4, 4)."""
    return _operators_cached(_check_lambda(lam))


def apply_measurement(rho: np.ndarray, op: np.ndarray, sites: tuple[int, int]) -> tuple[np.ndarray, float]:
    """Return ``(M rho M^dag, trace)`` with ``op`` acting on the ordered pair ``sites``."""
    n = qmat.num_qubits(rho)
    if len(sites) != 2 or sites[0] == sites[1]:
        raise ValueError(f"measurement needs two distinct sites, got {sites}")
    if op.shape != (4, 4):
        raise ValueError("measurement operator must be 4x4")
    full = qmat.embed(op, list(sites), n)
    out = full @ rho @ full.conj().T
    return out, float(np.trace(out).real)
