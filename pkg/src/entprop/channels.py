"""Local Kraus noise channels (amplitude damping, phase damping, depolarizing)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import qmat
from .states import ResourceParams, resource_state

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

CHANNEL_KINDS = ("adc", "pdc", "dpc", "none")


class NoisePlacement(str, Enum):
    NONE = "none"
    A = "A"
    B = "B"
    BOTH = "AB"

    @classmethod
    def parse(cls, value: "str | NoisePlacement") -> "NoisePlacement":
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        aliases = {"none": cls.NONE, "a": cls.A, "ona": cls.A, "b": cls.B, "onb": cls.B,
                   "ab": cls.BOTH, "both": cls.BOTH, "onboth": cls.BOTH}
        try:
            return aliases[key.lower()]
        except KeyError:
            raise ValueError(f"unknown noise placement {value!r}") from None

    @property
    def sites(self) -> tuple[int, ...]:
        return {"none": (), "A": (0,), "B": (1,), "AB": (0, 1)}[self.value]


@dataclass(frozen=True)
class KrausChannel:
    kind: str
    p: float
    ops: tuple[np.ndarray, ...]

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.ops)
        return float(np.max(np.abs(total - I2)))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.ops)


def make_channel(kind: str, p: float = 0.0) -> KrausChannel:
    kind = kind.lower()
    if not 0 <= p <= 1:
        raise ValueError(f"noise strength p={p} outside [0, 1]")
    if kind == "adc":
        ops = (
            np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=complex),
            np.array([[0, math.sqrt(p)], [0, 0]], dtype=complex),
        )
    elif kind == "pdc":
        ops = (math.sqrt(1 - p / 2) * I2, math.sqrt(p / 2) * SZ)
    elif kind == "dpc":
        ops = (math.sqrt(1 - 3 * p / 4) * I2,) + tuple(math.sqrt(p / 4) * s for s in (SX, SY, SZ))
    elif kind in ("none", "identity"):
        kind, ops = "none", (I2.copy(),)
    else:
        raise ValueError(f"unknown channel kind {kind!r}; expected one of {CHANNEL_KINDS}")
    return KrausChannel(kind, float(p), ops)


def apply_local(rho: np.ndarray, ch: KrausChannel, site: int) -> np.ndarray:
    """Apply ``ch`` to qubit ``site`` of ``rho``."""
    n = qmat.num_qubits(rho)
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} qubits")
    if ch.kind == "none":
        return rho.copy()
    out = np.zeros_like(rho, dtype=complex)
    for k in ch.ops:
        full = qmat.embed(k, [site], n)
        out += full @ rho @ full.conj().T
    return out


def noisy_state(rho: np.ndarray, placement: NoisePlacement | str, kind: str, p: float,
                p_other: float | None = None) -> np.ndarray:
    """Apply the channel on a two-qubit state per ``placement`` (A first, then B).

    ``p_other`` sets a separate strength for site B when both sites are noisy.
    """
    placement = NoisePlacement.parse(placement)
    for site in placement.sites:
        strength = p_other if (site == 1 and p_other is not None and placement is NoisePlacement.BOTH) else p
        rho = apply_local(rho, make_channel(kind, strength), site)
    return rho


def prepare_resource(rp: ResourceParams | float, placement: NoisePlacement | str = "none",
                     kind: str = "none", p: float = 0.0, p_other: float | None = None) -> np.ndarray:
    """Noisy shared state: local channels applied to |psi(z)><psi(z)|."""
    rho = qmat.projector(resource_state(rp))
    return noisy_state(rho, placement, kind, p, p_other)
