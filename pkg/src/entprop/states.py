"""Resource states, auxiliary qubits, the Bell basis and Haar-random pure states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# z beyond pi/4 is accepted (the structure of the state matters for ADC,
# not only its entanglement), up to the full pi/2 period.
Z_MAX = math.pi / 2

_S = 1 / math.sqrt(2)
# |B1>,|B2> = (|00> +- |11>)/sqrt2 ; |B3>,|B4> = (|10> +- |01>)/sqrt2
BELL_VECTORS = np.array(
    [
        [_S, 0, 0, _S],
        [_S, 0, 0, -_S],
        [0, _S, _S, 0],
        [0, -_S, _S, 0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class ResourceParams:
    z: float

    def __post_init__(self):
        if not 0 <= self.z <= Z_MAX + 1e-15:
            raise ValueError(f"resource angle z={self.z} outside [0, pi/2]")

    @classmethod
    def from_negativity(cls, negativity: float) -> "ResourceParams":
        """Smallest z whose pure resource state has the given negativity."""
        if not 0 <= negativity <= 0.5:
            raise ValueError(f"pure two-qubit negativity must lie in [0, 0.5], got {negativity}")
        return cls(0.5 * math.asin(min(1.0, 2 * negativity)))

    @property
    def negativity(self) -> float:
        return abs(math.sin(self.z) * math.cos(self.z))


@dataclass(frozen=True)
class AuxiliaryParams:
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.theta <= math.pi + 1e-12:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not -1e-12 <= self.phi <= 2 * math.pi + 1e-12:
            raise ValueError(f"phi={self.phi} outside [0, 2pi]")


def resource_state(rp: ResourceParams | float) -> np.ndarray:
    """Amplitudes of cos z |00> + sin z |11>."""
    z = rp.z if isinstance(rp, ResourceParams) else ResourceParams(rp).z
    return np.array([math.cos(z), 0, 0, math.sin(z)], dtype=complex)


def auxiliary_state(ap: AuxiliaryParams) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array(
        [math.cos(ap.theta / 2), np.exp(1j * ap.phi) * math.sin(ap.theta / 2)],
        dtype=complex,
    )


def bell_state(j: int) -> np.ndarray:
    """Bell vector ``j`` in 1..4."""
    if j not in (1, 2, 3, 4):
        raise ValueError(f"Bell index must be 1..4, got {j}")
    return BELL_VECTORS[j - 1].copy()


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(rng))


def haar_random_states(rng: np.random.Generator | int, size: int, dim: int = 4) -> np.ndarray:
    """``size`` Haar-random pure states of dimension ``dim``, one per row.

    Real and imaginary parts are i.i.d. standard normal, then each row is
    normalized. Draws are taken row by row so a prefix of a larger batch equals
    a smaller batch from the same seed.
    """
    gen = as_generator(rng)
    g = gen.standard_normal((size, 2 * dim))
    a = g[:, :dim] + 1j * g[:, dim:]
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def haar_random_two_qubit(rng: np.random.Generator | int) -> np.ndarray:
    return haar_random_states(rng, 1)[0]
