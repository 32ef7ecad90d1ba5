"""Negativity and the squared-negativity monogamy score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import qmat

if TYPE_CHECKING:
    from .protocol import BranchResult

CLAMP = 1e-12


def _resolve(site: int | str, labels: Sequence[str] | None, n: int) -> int:
    if isinstance(site, str):
        if labels is None:
            raise ValueError(f"site label {site!r} given but no labels available")
        try:
            return list(labels).index(site)
        except ValueError:
            raise ValueError(f"unknown site label {site!r}; have {list(labels)}") from None
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} qubits")
    return int(site)


def negativity(rho: np.ndarray, part: Iterable[int | str], labels: Sequence[str] | None = None) -> float:
    """Sum of |negative eigenvalues| of the partial transpose on ``part``."""
    n = qmat.num_qubits(rho)
    idx = sorted({_resolve(s, labels, n) for s in part})
    if not idx or len(idx) >= n:
        raise ValueError(f"bipartition {idx} must be a nonempty proper subset of {n} qubits")
    ev = qmat.hermitian_eigenvalues(qmat.partial_transpose(rho, idx))
    value = float(-ev[ev < 0].sum())
    return 0.0 if value < CLAMP else value


@dataclass(frozen=True)
class MonogamyResult:
    nodal: str
    delta: float
    whole_negativity: float
    pair_negativities: dict[str, float]


def monogamy_score(rho: np.ndarray, nodal: int | str, labels: Sequence[str] | None = None) -> MonogamyResult:
    """N^2(nodal : rest) minus the sum of N^2 over two-qubit reductions containing the nodal site."""
    n = qmat.num_qubits(rho)
    if n < 3:
        raise ValueError("monogamy score needs at least three sites")
    labels = list(labels) if labels is not None else [str(i) for i in range(n)]
    k = _resolve(nodal, labels, n)
    whole = negativity(rho, [k])
    pairs = {}
    for i in range(n):
        if i == k:
            continue
        reduced = qmat.partial_trace(rho, [k, i])
        # reduced qubits come back in ascending order; transpose the nodal one
        pairs[labels[i]] = negativity(reduced, [0 if k < i else 1])
    delta = whole**2 - sum(v**2 for v in pairs.values())
    return MonogamyResult(labels[k], delta, whole, pairs)


def monogamy_delta(rho: np.ndarray, nodal: int | str, labels: Sequence[str] | None = None) -> float:
    return monogamy_score(rho, nodal, labels).delta


def average_monogamy(branches: "Sequence[BranchResult]", nodal: int | str = "B") -> float:
    """Probability-weighted monogamy score over a full outcome ensemble."""
    if not branches:
        raise ValueError("no branches to average over")
    total = sum(b.probability for b in branches)
    if abs(total - 1) > 1e-9:
        raise ValueError(f"branch probabilities sum to {total}, not 1")
    acc = 0.0
    for b in branches:
        if b.degenerate:
            continue
        acc += b.probability * monogamy_delta(b.state, nodal, b.labels)
    return acc
