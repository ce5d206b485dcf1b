"""Operator pools for adaptive ansatz growth."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product

import numpy as np

from .pauli import PauliOperatorSum, PauliString

__all__ = ["PoolKind", "PoolSpec", "all_one_two_qubit", "yz_chain", "hamiltonian_terms"]


class PoolKind(str, enum.Enum):
    ALL_ONE_TWO = "all12"
    YZ_CHAIN = "yzchain"
    HAMILTONIAN = "hamiltonian"


def all_one_two_qubit(n_qubits: int) -> list[PauliString]:
    """Every weight-1 and weight-2 string: singles by qubit, then pairs lexicographically."""
    out = []
    for q in range(n_qubits):
        for p in "XYZ":
            out.append(PauliString.from_sparse(n_qubits, {q: p}))
    for i, j in combinations(range(n_qubits), 2):
        for a, b in product("XYZ", repeat=2):
            out.append(PauliString.from_sparse(n_qubits, {i: a, j: b}))
    return out


def yz_chain(n_qubits: int) -> list[PauliString]:
    """``Y_i``, ``Y_i Z_{i+1}``, ``Z_i Y_{i+1}`` on neighbouring qubits (size ``3 n - 2``).

    Every generator has an odd number of ``Y`` factors, so with a real
    Hamiltonian and reference the ansatz stays real.
    """
    out = [PauliString.from_sparse(n_qubits, {q: "Y"}) for q in range(n_qubits)]
    for i in range(n_qubits - 1):
        out.append(PauliString.from_sparse(n_qubits, {i: "Y", i + 1: "Z"}))
        out.append(PauliString.from_sparse(n_qubits, {i: "Z", i + 1: "Y"}))
    return out


def hamiltonian_terms(*operators: PauliOperatorSum) -> list[PauliString]:
    """Non-identity strings appearing in any of ``operators``, in canonical order."""
    seen = {t.string for H in operators for t in H.terms if t.string.weight > 0}
    return sorted(seen, key=lambda s: s.sort_key())


@dataclass(frozen=True)
class PoolSpec:
    kind: PoolKind
    strings: tuple[PauliString, ...]

    @classmethod
    def build(cls, kind, n_qubits: int, H=None) -> "PoolSpec":
        """``H`` (an operator sum or a sequence of them) feeds the Hamiltonian pool."""
        kind = PoolKind(kind)
        if kind is PoolKind.ALL_ONE_TWO:
            strings = all_one_two_qubit(n_qubits)
        elif kind is PoolKind.YZ_CHAIN:
            strings = yz_chain(n_qubits)
        else:
            if H is None:
                raise ValueError("a Hamiltonian pool needs the Hamiltonian")
            strings = hamiltonian_terms(*(H if isinstance(H, (list, tuple)) else (H,)))
        if not strings:
            raise ValueError("empty operator pool")
        return cls(kind, tuple(strings))

    def __len__(self) -> int:
        return len(self.strings)

    @property
    def n_qubits(self) -> int:
        return self.strings[0].n_qubits

    @cached_property
    def actions(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked ``(perm, phase)`` arrays of shape ``(pool, dim)``."""
        perms = np.stack([s.action[0] for s in self.strings])
        phases = np.stack([s.action[1] for s in self.strings])
        return perms, phases

    @cached_property
    def _tangent_phases(self) -> np.ndarray:
        qs = [s.tangent_action[1] for s in self.strings]
        if all(not np.iscomplexobj(q) for q in qs):
            return np.stack(qs)
        return np.stack([q.astype(complex) for q in qs])

    def apply_all(self, psi: np.ndarray) -> np.ndarray:
        """Rows ``A_nu psi`` for every pool member."""
        perms, phases = self.actions
        return phases * psi[perms]

    def tangent_rows(self, psi: np.ndarray) -> np.ndarray:
        """Rows ``-i A_nu psi``; real for a real state and an all-odd-``Y`` pool."""
        perms, _ = self.actions
        return self._tangent_phases * psi[perms]
