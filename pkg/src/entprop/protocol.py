"""Unidirectional and bidirectional entanglement-propagation protocols.

Global qubit order is ``(A, A1..Am, B, B1..Bn)``. Round ``i`` on the B side
measures ``(B_{i-1}, B_i)`` with ``B_0 = B``; round ``j`` on the A side measures
``(A_{j-1}, A_j)`` with ``A_0 = A``. B-side rounds run first.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import qmat
from .channels import NoisePlacement, noisy_state, prepare_resource
from .entanglement import average_monogamy, monogamy_delta
from .measurement import measurement_operators
from .states import AuxiliaryParams, ResourceParams, auxiliary_state

MAX_ROUNDS = 4
MAX_QUBITS = 6
DEGENERATE_TRACE = 1e-14


class CapacityError(ValueError):
    """Requested protocol exceeds the dense-simulation limits."""


class Scheme(str, Enum):
    UNIDIRECTIONAL = "unidirectional"
    BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class ProtocolSpec:
    scheme: Scheme = Scheme.UNIDIRECTIONAL
    n: int = 1
    m: int = 0
    lambda_b: float = 0.5
    lambda_a: float | None = None  # defaults to lambda_b
    aux_b: tuple[AuxiliaryParams, ...] = ()
    aux_a: tuple[AuxiliaryParams, ...] = ()
    z: float = math.pi / 8
    placement: NoisePlacement = NoisePlacement.NONE
    channel: str = "none"
    p: float = 0.0
    p_other: float | None = None
    # explicit two-qubit state (A, B); replaces z/placement/channel/p when given
    resource: np.ndarray | None = field(default=None, repr=False, compare=False)
    max_qubits: int = MAX_QUBITS

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "placement", NoisePlacement.parse(self.placement))
        if self.n < 0 or self.m < 0:
            raise ValueError("round counts must be nonnegative")
        if self.scheme is Scheme.UNIDIRECTIONAL and self.m != 0:
            raise ValueError("unidirectional protocol has no A-side rounds (m must be 0)")
        for name, count in (("aux_b", self.n), ("aux_a", self.m)):
            aux = tuple(getattr(self, name))
            if not aux:
                aux = tuple(AuxiliaryParams() for _ in range(count))
            if len(aux) != count:
                raise ValueError(f"{name} has {len(aux)} entries for {count} rounds")
            object.__setattr__(self, name, aux)
        if self.lambda_a is None:
            object.__setattr__(self, "lambda_a", self.lambda_b)
        for lam in (self.lambda_a, self.lambda_b):
            if not 0 <= lam <= 1:
                raise ValueError(f"unsharpness {lam} outside [0, 1]")
        if self.resource is not None and self.resource.shape != (4, 4):
            raise ValueError("explicit resource must be a 4x4 density matrix")
        if self.num_qubits > self.max_qubits:
            raise CapacityError(
                f"{self.num_qubits} qubits exceed the limit of {self.max_qubits} "
                f"(dense state needs {16 * 4**self.num_qubits} bytes)"
            )

    @property
    def num_qubits(self) -> int:
        return 2 + self.n + self.m

    @property
    def rounds(self) -> int:
        return self.n + self.m

    @property
    def labels(self) -> tuple[str, ...]:
        return ("A",) + tuple(f"A{j}" for j in range(1, self.m + 1)) + ("B",) + tuple(
            f"B{i}" for i in range(1, self.n + 1)
        )

    def default_outcomes(self) -> tuple[int, ...]:
        return (3,) * self.rounds


@dataclass(frozen=True)
class BranchResult:
    outcomes: tuple[int, ...]
    probability: float
    state: np.ndarray | None = field(repr=False)
    labels: tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        return self.state is None


@lru_cache(maxsize=4096)
def _cached_resource(z, placement, channel, p, p_other):
    rho = prepare_resource(ResourceParams(z), placement, channel, p, p_other)
    rho.setflags(write=False)
    return rho


def resource_density(spec: ProtocolSpec) -> np.ndarray:
    if spec.resource is not None:
        return noisy_state(np.asarray(spec.resource, dtype=complex), spec.placement, spec.channel, spec.p, spec.p_other)
    return _cached_resource(spec.z, spec.placement, spec.channel, spec.p, spec.p_other)


def initial_state(spec: ProtocolSpec) -> np.ndarray:
    """rho_AB with all auxiliary qubits attached, in global site order."""
    factors = [resource_density(spec)]
    factors += [qmat.projector(auxiliary_state(a)) for a in spec.aux_a]
    factors += [qmat.projector(auxiliary_state(a)) for a in spec.aux_b]
    rho = qmat.tensor(*factors)
    # built as (A, B, A1..Am, B1..Bn); move B after the A auxiliaries
    q = spec.num_qubits
    order = [0] + list(range(2, 2 + spec.m)) + [1] + list(range(2 + spec.m, q))
    perm = order + [o + q for o in order]
    return rho.reshape([2] * (2 * q)).transpose(perm).reshape(2**q, 2**q)


def measurement_schedule(spec: ProtocolSpec, a_first: bool = False) -> list[tuple[tuple[int, int], float]]:
    """(sites, lambda) for each round in execution order, B side first by default."""
    b0 = spec.m + 1
    b_side = [((b0 + i - 1, b0 + i), spec.lambda_b) for i in range(1, spec.n + 1)]
    a_side = [((j - 1, j), spec.lambda_a) for j in range(1, spec.m + 1)]
    return a_side + b_side if a_first else b_side + a_side


@lru_cache(maxsize=1024)
def _embedded(lam: float, sites: tuple[int, int], q: int) -> np.ndarray:
    full = np.array([qmat.embed(op, list(sites), q) for op in measurement_operators(lam)])
    full.setflags(write=False)
    return full


def _embedded_ops(spec: ProtocolSpec, a_first: bool = False) -> list[np.ndarray]:
    return [_embedded(float(lam), sites, spec.num_qubits) for sites, lam in measurement_schedule(spec, a_first)]


def _check_outcomes(spec: ProtocolSpec, outcomes: Sequence[int]) -> tuple[int, ...]:
    outcomes = tuple(int(o) for o in outcomes)
    if len(outcomes) != spec.rounds:
        raise ValueError(f"outcome string has length {len(outcomes)}, protocol has {spec.rounds} rounds")
    if any(o not in (1, 2, 3, 4) for o in outcomes):
        raise ValueError(f"outcomes must be in 1..4, got {outcomes}")
    return outcomes


def run_branch(spec: ProtocolSpec, outcomes: Sequence[int] | None = None, a_first: bool = False) -> BranchResult:
    """Post-measurement state and probability for one outcome string.

    ``outcomes`` lists the B-side string followed by the A-side string.
    """
    outcomes = spec.default_outcomes() if outcomes is None else _check_outcomes(spec, outcomes)
    ops = _embedded_ops(spec, a_first)
    order = list(outcomes)
    if a_first:
        order = order[spec.n:] + order[: spec.n]
    rho = initial_state(spec)
    for full, o in zip(ops, order):
        op = full[o - 1]
        rho = op @ rho @ op.conj().T
    prob = float(np.trace(rho).real)
    if prob < DEGENERATE_TRACE:
        return BranchResult(outcomes, 0.0, None, spec.labels)
    return BranchResult(outcomes, prob, rho / prob, spec.labels)


def post_select(spec: ProtocolSpec, outcomes: Sequence[int] | None = None) -> np.ndarray:
    result = run_branch(spec, outcomes)
    if result.degenerate:
        raise ValueError(f"outcome string {result.outcomes} has zero probability")
    return result.state


def enumerate_branches(spec: ProtocolSpec, max_rounds: int = MAX_ROUNDS) -> list[BranchResult]:
    """All 4**(n+m) branches in lexicographic order of the outcome string."""
    if spec.rounds > max_rounds:
        raise CapacityError(f"{spec.rounds} rounds exceed the enumeration limit of {max_rounds} (4**{max_rounds} branches)")
    ops = _embedded_ops(spec)
    results = []

    def descend(rho, depth, prefix):
        if depth == len(ops):
            prob = float(np.trace(rho).real)
            if prob < DEGENERATE_TRACE:
                results.append(BranchResult(prefix, max(prob, 0.0), None, spec.labels))
            else:
                results.append(BranchResult(prefix, prob, rho / prob, spec.labels))
            return
        for o in range(4):
            op = ops[depth][o]
            descend(op @ rho @ op.conj().T, depth + 1, prefix + (o + 1,))

    descend(initial_state(spec), 0, ())
    return results


def all_outcome_strings(rounds: int) -> list[tuple[int, ...]]:
    return list(itertools.product((1, 2, 3, 4), repeat=rounds))


def protocol_delta(spec: ProtocolSpec, policy: str = "post-select", outcomes: Sequence[int] | None = None,
                   nodal: str = "B") -> float:
    """Monogamy score of a post-selected branch, or its outcome average."""
    if policy == "average":
        return average_monogamy(enumerate_branches(spec), nodal)
    if policy != "post-select":
        raise ValueError(f"unknown outcome policy {policy!r}")
    branch = run_branch(spec, outcomes)
    if branch.degenerate:
        return 0.0
    return monogamy_delta(branch.state, nodal, branch.labels)


def with_params(spec: ProtocolSpec, **changes) -> ProtocolSpec:
    return replace(spec, **changes)
