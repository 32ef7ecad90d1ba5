"""Vectorized one-round scores for batches of random resource states."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .channels import make_channel
from .measurement import measurement_operators
from .states import AuxiliaryParams, as_generator, auxiliary_state, haar_random_states

CHUNK = 256


def aux_grid(n_theta: int = 7, n_phi: int = 4) -> list[AuxiliaryParams]:
    """Uniform grid over the auxiliary Bloch angles; theta = 0 and pi appear once."""
    out = [AuxiliaryParams(0.0, 0.0)]
    for t in np.linspace(0, math.pi, n_theta)[1:-1]:
        for f in np.linspace(0, 2 * math.pi, n_phi, endpoint=False):
            out.append(AuxiliaryParams(float(t), float(f)))
    out.append(AuxiliaryParams(math.pi, 0.0))
    return out


def _noisy_on_b(rho: np.ndarray, kind: str, p: float) -> np.ndarray:
    if kind == "none" or p == 0:
        return rho
    out = np.zeros_like(rho)
    for k in make_channel(kind, p).ops:
        full = np.kron(np.eye(2), k)
        out += full @ rho @ full.conj().T
    return out


def _neg(pt: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvalsh(pt)
    return -np.where(ev < 0, ev, 0.0).sum(axis=-1)


def batch_delta(rho_ab: np.ndarray, lam: float, auxes: list[AuxiliaryParams], outcome: int = 3) -> np.ndarray:
    """Post-selected one-round score with nodal site B, shape (samples, len(auxes)).

    ``rho_ab`` has shape (samples, 4, 4) on (A, B); the measured pair is (B, B1).
    """
    chi = np.array([auxiliary_state(a) for a in auxes])
    proj = np.einsum("ai,aj->aij", chi, chi.conj())
    rho = np.einsum("sij,akl->saikjl", rho_ab, proj).reshape(len(rho_ab), len(auxes), 8, 8)
    m = np.kron(np.eye(2), measurement_operators(lam)[outcome - 1])
    rho = m @ rho @ m.conj().T
    tr = np.einsum("...ii->...", rho).real
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = rho / tr[..., None, None]
    t = rho.reshape(rho.shape[:2] + (2,) * 6)  # (s, a, A, B, B1, A', B', B1')
    whole = _neg(t.transpose(0, 1, 2, 6, 4, 5, 3, 7).reshape(rho.shape))
    ab = np.einsum("...abcdec->...abde", t)
    bb1 = np.einsum("...abcaef->...bcef", t)
    n_ab = _neg(ab.transpose(0, 1, 2, 5, 4, 3).reshape(rho.shape[:2] + (4, 4)))
    n_bb1 = _neg(bb1.transpose(0, 1, 4, 3, 2, 5).reshape(rho.shape[:2] + (4, 4)))
    delta = whole**2 - n_ab**2 - n_bb1**2
    return np.where(tr > 1e-14, delta, 0.0)


def best_over_aux(rho_ab: np.ndarray, lambdas, auxes, outcome: int = 3) -> np.ndarray:
    """Aux-grid maximum of the score, shape (samples, len(lambdas))."""
    return np.stack([batch_delta(rho_ab, float(l), auxes, outcome).max(axis=1) for l in lambdas], axis=1)


def haar_advantage(seed: int, samples: int, ps, lambdas, kind: str = "adc", auxes=None, outcome: int = 3,
                   threads: int = 1, margin: float = 1e-10) -> tuple[np.ndarray, dict]:
    """Per-sample advantage flags of noise on B over the noiseless run.

    Returns ``(states, flags)`` with ``flags[p] = (any_lambda, max_over_lambda)``
    as boolean arrays over samples. All samples are drawn up front from
    ``seed`` so chunking and thread count do not change results.
    """
    auxes = aux_grid() if auxes is None else auxes
    lambdas = np.asarray(lambdas, dtype=float)
    psi = haar_random_states(as_generator(seed), samples)
    pure = np.einsum("si,sj->sij", psi, psi.conj())
    chunks = [slice(i, min(i + CHUNK, samples)) for i in range(0, samples, CHUNK)]

    def run(sl):
        base = best_over_aux(pure[sl], lambdas, auxes, outcome)
        res = {}
        for p in ps:
            noisy = best_over_aux(_noisy_on_b(pure[sl], kind, p), lambdas, auxes, outcome)
            gain = noisy - base
            res[p] = ((gain > margin).any(axis=1), noisy.max(axis=1) > base.max(axis=1) + margin)
        return res

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    flags = {p: tuple(np.concatenate([part[p][i] for part in parts]) for i in range(2)) for p in ps}
    return psi, flags
