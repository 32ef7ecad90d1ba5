"""Bell-block recursion for the phase-damped unidirectional chain.

After round ``n`` the unnormalized post-selected state is

    sum_{a,b} w[a,b] * blocks[a,b] (x) |B'a><B'b|

on the last measured pair, with ``w[a,b] = sqrt(m_a m_b)`` taken from the
outcome of that round and ``blocks`` acting on every earlier site. The tables
below use ``B'4 = (|01> - |10>)/sqrt2``, i.e. the fourth Bell vector with its
overall sign flipped; projectors (and therefore measurement results) do not
depend on this choice, but the block signs do.

Only the phase-damping case is tabulated. Other channels go through the
brute-force simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measurement import canonical_coefficients
from .states import BELL_VECTORS, AuxiliaryParams, auxiliary_state

BELL_PRIME = BELL_VECTORS.copy()
BELL_PRIME[3] *= -1


class UnsupportedCase(NotImplementedError):
    """The tabulated recursion does not cover this noise model."""


@dataclass(frozen=True)
class BellBlockState:
    blocks: np.ndarray  # (16, d, d); index 4*a + b for Bell pair (a, b), 0-based
    weights: np.ndarray  # (16,) sqrt(m_a m_b) for the latest outcome
    rounds: int

    @property
    def num_qubits(self) -> int:
        return int(round(math.log2(self.blocks.shape[1]))) + 2


def pair_weights(lam: float, outcome: int) -> np.ndarray:
    """sqrt(m_a m_b) for outcome ``outcome`` (1..4), flattened over (a, b)."""
    if outcome not in (1, 2, 3, 4):
        raise ValueError(f"outcome must be 1..4, got {outcome}")
    row = np.sqrt(canonical_coefficients(lam)[outcome - 1])
    return np.outer(row, row).ravel()


# Sign patterns act on (|1><1|, |0><1|, |1><0|); the |0><0| entry is always +.
# Fixed against the direct Bell-block decomposition in the tests.
_PPP, _PMM, _MPM, _MMP = (1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)
# (block type, signs) for the sixteen blocks in (a, b) order
_LAYOUT = [
    (1, _PPP), (1, _MMP), (2, _PPP), (2, _MMP),
    (1, _MPM), (1, _PMM), (2, _MPM), (2, _PMM),
    (3, _PPP), (3, _MMP), (4, _PPP), (4, _MMP),
    (3, _MPM), (3, _PMM), (4, _MPM), (4, _PMM),
]


def single_site_blocks(z: float, p: float, aux: AuxiliaryParams) -> np.ndarray:
    """Bell blocks of PDC-damped cos z|00> + sin z|11> with an auxiliary qubit attached.

    Returns an array (16, 2, 2) of operators on the first qubit.
    """
    al, be = auxiliary_state(aux)
    c, s = math.cos(z), math.sin(z)
    sc = s * c
    coh = 1 - p  # coherence factor of the two-operator PDC
    ac = np.conj
    entries = {
        1: (abs(al) ** 2, abs(be) ** 2, ac(be) * al, be * ac(al)),
        2: (ac(be) * al, be * ac(al), abs(al) ** 2, abs(be) ** 2),
        3: (ac(al) * be, al * ac(be), abs(be) ** 2, abs(al) ** 2),
        4: (abs(be) ** 2, abs(al) ** 2, ac(al) * be, al * ac(be)),
    }
    out = np.empty((16, 2, 2), dtype=complex)
    for k, (kind, (s1, s2, s3)) in enumerate(_LAYOUT):
        d0, d1, o01, o10 = entries[kind]
        out[k] = 0.5 * np.array(
            [[d0 * c * c, s2 * coh * o01 * sc], [s3 * coh * o10 * sc, s1 * d1 * s * s]]
        )
    return out


def _swap_rules() -> tuple[np.ndarray, np.ndarray]:
    """Index map and signs giving every block of a later round from block 0.

    Block j of round n is sum_k w_k blocks_{n-1}[k] (x) sign[j,k] * fresh[perm[j,k]]
    where ``fresh`` are the single-site blocks of a maximally entangled,
    noiseless link. Rules are applied as pairwise swaps of the fresh factor
    between term positions (1-based pairs below), each with a sign that
    multiplies both positions.
    """
    perm = np.zeros((16, 16), dtype=int)
    sign = np.zeros((16, 16), dtype=int)
    perm[0] = np.arange(16)
    sign[0] = 1

    def derive(src, dst, pairs):
        perm[dst], sign[dst] = perm[src], sign[src]
        pm, sg = perm[dst].copy(), sign[dst].copy()
        for (r, t), s in pairs:
            r, t = r - 1, t - 1
            pm[r], pm[t] = perm[dst][t], perm[dst][r]
            sg[r], sg[t] = s * sign[dst][t], s * sign[dst][r]
        perm[dst], sign[dst] = pm, sg

    neighbours = [((l, l + 1), 1 if l % 4 == 1 else -1) for l in range(1, 16, 2)]
    skip_two = [((l, l + 2), 1) for l in (1, 2, 5, 6, 9, 10, 13, 14)]
    skip_four = [((l, l + 4), 1) for l in (1, 2, 3, 4)] + [((l, l + 4), -1) for l in (9, 10, 11, 12)]
    skip_eight = [((l, l + 8), 1) for l in range(1, 9)]

    # derivation order covers all sixteen blocks (1-based): 1 -> 9 -> 5, 13, ...
    derive(0, 8, skip_eight)
    for src in (0, 8):
        derive(src, src + 4, skip_four)
    for src in (0, 4, 8, 12):
        derive(src, src + 2, skip_two)
    for src in range(0, 16, 2):
        derive(src, src + 1, neighbours)
    return perm, sign


_PERM, _SIGN = _swap_rules()


def _check_kind(kind: str, p: float) -> float:
    kind = kind.lower()
    if kind == "none":
        return 0.0
    if kind != "pdc":
        raise UnsupportedCase(f"block recursion is tabulated for phase damping only, not {kind!r}")
    return p


def first_round_blocks(z: float, p: float, aux: AuxiliaryParams, lam: float, outcome: int = 3,
                       kind: str = "pdc") -> BellBlockState:
    p = _check_kind(kind, p)
    return BellBlockState(single_site_blocks(z, p, aux), pair_weights(lam, outcome), 1)


def recurse_round(state: BellBlockState, aux: AuxiliaryParams, lam: float, outcome: int = 3) -> BellBlockState:
    fresh = single_site_blocks(math.pi / 4, 0.0, aux)
    weighted = state.weights[:, None, None] * state.blocks
    d = state.blocks.shape[1]
    new = np.zeros((16, 2 * d, 2 * d), dtype=complex)
    for j in range(16):
        for k in range(16):
            new[j] += _SIGN[j, k] * np.kron(weighted[k], fresh[_PERM[j, k]])
    return BellBlockState(new, pair_weights(lam, outcome), state.rounds + 1)


def run_recursion(z: float, p: float, auxes, lam: float, outcomes=None, kind: str = "pdc") -> BellBlockState:
    auxes = list(auxes)
    outcomes = list(outcomes) if outcomes is not None else [3] * len(auxes)
    if not auxes or len(outcomes) != len(auxes):
        raise ValueError("need one auxiliary state and one outcome per round")
    st = first_round_blocks(z, p, auxes[0], lam, outcomes[0], kind)
    for a, o in zip(auxes[1:], outcomes[1:]):
        st = recurse_round(st, a, lam, o)
    return st


def reassemble(state: BellBlockState) -> tuple[np.ndarray, float]:
    """Unnormalized full matrix (last pair rightmost) and its trace, the branch probability."""
    d = state.blocks.shape[1]
    out = np.zeros((4 * d, 4 * d), dtype=complex)
    for k in range(16):
        a, b = divmod(k, 4)
        out += state.weights[k] * np.kron(state.blocks[k], np.outer(BELL_PRIME[a], BELL_PRIME[b].conj()))
    return out, float(np.trace(out).real)


def closed_form_delta(z: float, p: float, lam: float) -> float:
    """Monogamy score of the outcome-3 branch, ADC on B, auxiliary |0>, one round."""
    s, c = math.sin(z), math.cos(z)
    s2, s4 = s * s, s**4
    cos2z = math.cos(2 * z)
    l1 = (1 - lam) / 4
    l2 = math.sqrt((1 + 3 * lam) * (1 - lam)) / 4

    term1 = -(
        4 * l1 * (p + 1)
        - 0.5 * math.sqrt(64 * lam**2 * (p - 1) ** 2 * s4 + 4 * (4 * l1) ** 2 * (-(p - 1) * cos2z + p + 1) ** 2)
        + 4 * l1 * (1 - p) * cos2z
    ) ** 2
    term2 = 4 * (
        math.sqrt(
            (-2 * lam * p**2 + p**2 + lam**2 * (p * (5 * p - 8) + 4)) * s4
            + 8 * l1 * (1 - p) * (lam + 4 * l2 + 1) * s2 * c * c
        )
        - 4 * l1 * p * s2
    ) ** 2
    a1 = s2 * (lam - 4 * l2 - 3 * lam * p + 4 * l2 * p + p + 1)
    a2 = (
        -lam * (lam + 4 * l2 - 2)
        - 4 * l2
        + p**2 * (lam * (3 * lam - 12 * l2 - 2) + 4 * l2 + 1)
        + 4 * lam * (4 * l2 - 1) * p
        + 1
    )
    inner = s4 * a2 + (lam - 1) * (p - 1) * (lam + 4 * l2 + 1) * math.sin(2 * z) ** 2
    term3 = -(a1 - math.sqrt(2) * math.sqrt(max(inner, 0.0))) ** 2
    denom = (-4 * lam * p + 4 * lam * (p - 1) * cos2z + 4) ** 2
    return (term1 + term2 + term3) / denom
