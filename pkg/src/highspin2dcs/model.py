"""Driven high-spin chain in qubit form and magnetic-field pulse protocols.

Units: ``J = 1``, ``hbar = 1``; times in ``1/J``.  The Zeeman coupling is kept
factored, ``H(t) = H0 - B(t) * Hz`` with ``Hz = sum_i S^z_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np

from .encoding import Encoding, as_spin, encoded_spin, qubits_per_site
from .pauli import PauliOperatorSum

__all__ = ["ModelSpec", "PulseSpec", "DriveProtocol", "build_hamiltonian", "field_at", "spin_operators"]


@dataclass(frozen=True)
class ModelSpec:
    n_sites: int = 2
    s: Fraction = Fraction(1)
    J: float = 1.0
    D: float = 0.0
    K_a: float = 0.0
    K_c: float = 0.0
    encoding: Encoding = Encoding.GRAY

    def __post_init__(self):
        object.__setattr__(self, "s", as_spin(self.s))
        object.__setattr__(self, "encoding", Encoding.parse(self.encoding))
        if self.n_sites < 2:
            raise ValueError("the chain needs at least two sites")

    @property
    def d(self) -> int:
        return int(2 * self.s + 1)

    @property
    def qubits_per_site(self) -> int:
        return qubits_per_site(self.s)

    @property
    def n_qubits(self) -> int:
        return self.n_sites * self.qubits_per_site

    def with_(self, **changes) -> "ModelSpec":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "s": str(self.s),
            "J": self.J,
            "D": self.D,
            "K_a": self.K_a,
            "K_c": self.K_c,
            "encoding": self.encoding.value,
        }

    @cached_property
    def operators(self) -> "ModelOperators":
        return build_hamiltonian(self)


@dataclass(frozen=True)
class ModelOperators:
    H0: PauliOperatorSum
    Hz: PauliOperatorSum
    spins: tuple[dict[str, PauliOperatorSum], ...]

    @cached_property
    def H0_sparse(self):
        return self.H0.to_sparse()

    @cached_property
    def Hz_diag(self) -> np.ndarray:
        # Hz is a sum of Z strings, hence diagonal in the computational basis
        return np.real(self.Hz.to_sparse().diagonal())

    def spin_squared(self, site: int) -> PauliOperatorSum:
        sp = self.spins[site]
        return (sp["x"] @ sp["x"] + sp["y"] @ sp["y"] + sp["z"] @ sp["z"]).real()

    def full(self, B: float) -> PauliOperatorSum:
        return self.H0 - B * self.Hz


def spin_operators(spec: ModelSpec) -> tuple[dict[str, PauliOperatorSum], ...]:
    return tuple(encoded_spin(spec.s, spec.encoding, i, spec.n_sites) for i in range(spec.n_sites))


def build_hamiltonian(spec: ModelSpec) -> ModelOperators:
    """Static part ``H0`` and Zeeman generator ``Hz`` of the chain (open boundary).

    ``H0 = J sum S_i.S_{i+1} - D sum (S_i x S_{i+1})_y - K_a sum (S^x_i)^2 - K_c sum (S^z_i)^2``
    with ``(a x b)_y = a^z b^x - a^x b^z`` for the DM vector along ``y``.
    """
    spins = spin_operators(spec)
    nq = spec.n_qubits
    H0 = PauliOperatorSum.zero(nq)
    for i in range(spec.n_sites - 1):
        a, b = spins[i], spins[i + 1]
        if spec.J:
            H0 = H0 + spec.J * (a["x"] @ b["x"] + a["y"] @ b["y"] + a["z"] @ b["z"])
        if spec.D:
            H0 = H0 - spec.D * (a["z"] @ b["x"] - a["x"] @ b["z"])
    for sp in spins:
        if spec.K_a:
            H0 = H0 - spec.K_a * (sp["x"] @ sp["x"])
        if spec.K_c:
            H0 = H0 - spec.K_c * (sp["z"] @ sp["z"])
    Hz = PauliOperatorSum.zero(nq)
    for sp in spins:
        Hz = Hz + sp["z"]
    return ModelOperators(H0.real(), Hz.real(), spins)


@dataclass(frozen=True)
class PulseSpec:
    """``B(t) = B0 sin(w0 (t - t0)) exp(-(t - t0)^2 / dt^2)``."""

    B0: float = 0.5
    omega0: float = 1.0
    t0: float = 5.0
    duration: float = 2.0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("pulse duration must be positive")

    def __call__(self, t):
        x = np.asarray(t, dtype=float) - self.t0
        return self.B0 * np.sin(self.omega0 * x) * np.exp(-(x**2) / self.duration**2)

    def support(self, cutoff: float = 1e-12) -> tuple[float, float]:
        """Interval outside which ``|B| < cutoff * |B0|`` (Gaussian envelope bound)."""
        if self.B0 == 0:
            return (self.t0, self.t0)
        half = self.duration * math.sqrt(max(0.0, -math.log(cutoff)))
        return (self.t0 - half, self.t0 + half)


@dataclass(frozen=True)
class DriveProtocol:
    """Sum of pulses, each shifted by its delay; an empty protocol is free evolution."""

    pulses: tuple[tuple[PulseSpec, float], ...] = field(default=())

    @classmethod
    def single(cls, pulse: PulseSpec) -> "DriveProtocol":
        return cls(((pulse, 0.0),))

    @classmethod
    def pair(cls, pulse1: PulseSpec, pulse2: PulseSpec, tau: float) -> "DriveProtocol":
        return cls(((pulse1, 0.0), (pulse2, float(tau))))

    def __post_init__(self):
        for _, delay in self.pulses:
            if not math.isfinite(delay):
                raise ValueError("pulse delays must be finite")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for pulse, delay in self.pulses:
            out = out + pulse(t - delay)
        return out if out.ndim else float(out)

    def support_end(self, cutoff: float = 1e-12) -> float:
        """Time after which the field is negligible."""
        if not self.pulses:
            return -math.inf
        return max(p.support(cutoff)[1] + d for p, d in self.pulses)

    @property
    def is_free(self) -> bool:
        return all(p.B0 == 0 for p, _ in self.pulses)


def field_at(protocol: DriveProtocol, t: float) -> float:
    return float(protocol(t))
