"""Pauli strings, weighted Pauli sums and the CNOT cost model.

Qubit 0 is the least significant qubit everywhere: a computational basis
index ``b`` has qubit ``q`` in bit ``q``.  Strings are phase free; every
phase lives in the coefficient of a :class:`PauliTerm`.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "PauliString",
    "PauliTerm",
    "PauliOperatorSum",
    "DimensionError",
    "CapacityError",
    "multiply",
    "commutator",
    "cnot_cost",
    "to_dense",
    "DENSE_QUBIT_LIMIT",
    "PRUNE_TOL",
]

DENSE_QUBIT_LIMIT = 14
PRUNE_TOL = 1e-12

_ORDER = {"I": 0, "X": 1, "Y": 2, "Z": 3}

# single-qubit products: (a, b) -> (phase, c) with a.b = phase * c
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


class DimensionError(ValueError):
    """Operands act on registers of different size."""


class CapacityError(ValueError):
    """Requested dense representation exceeds the configured qubit limit."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis.

    ``labels[q]`` is the Pauli acting on qubit ``q``.
    """

    labels: str

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a Pauli string needs at least one qubit")
        bad = set(self.labels) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli labels {sorted(bad)}")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls("I" * n_qubits)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: Mapping[int, str]) -> "PauliString":
        """Build from ``{qubit: label}``; unspecified qubits carry identity."""
        labels = ["I"] * n_qubits
        for q, p in ops.items():
            if not 0 <= q < n_qubits:
                raise DimensionError(f"qubit {q} outside register of {n_qubits}")
            labels[q] = p
        return cls("".join(labels))

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "PauliString":
        """Parse the sparse text form, e.g. ``"X1 Z0"`` or ``"I"``."""
        text = text.strip()
        if text in ("", "I"):
            return cls.identity(n_qubits)
        ops = {}
        for tok in text.split():
            m = re.fullmatch(r"([XYZ])(\d+)", tok)
            if m is None:
                raise ValueError(f"cannot parse Pauli token {tok!r}")
            ops[int(m.group(2))] = m.group(1)
        return cls.from_sparse(n_qubits, ops)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def weight(self) -> int:
        return sum(1 for p in self.labels if p != "I")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, p in enumerate(self.labels) if p != "I")

    @cached_property
    def x_mask(self) -> int:
        return sum(1 << q for q, p in enumerate(self.labels) if p in "XY")

    @cached_property
    def z_mask(self) -> int:
        return sum(1 << q for q, p in enumerate(self.labels) if p in "ZY")

    @property
    def n_y(self) -> int:
        return self.labels.count("Y")

    def sort_key(self) -> tuple[int, ...]:
        # highest qubit is the most significant position
        return tuple(_ORDER[p] for p in reversed(self.labels))

    def __lt__(self, other: "PauliString") -> bool:
        return self.sort_key() < other.sort_key()

    def text(self) -> str:
        ops = [f"{p}{q}" for q, p in reversed(list(enumerate(self.labels))) if p != "I"]
        return " ".join(ops) if ops else "I"

    def __str__(self) -> str:
        return self.text()

    def commutes_with(self, other: "PauliString") -> bool:
        _check_dims(self, other)
        anti = sum(
            1 for a, b in zip(self.labels, other.labels) if a != "I" and b != "I" and a != b
        )
        return anti % 2 == 0

    @cached_property
    def action(self) -> tuple[np.ndarray, np.ndarray]:
        """``(perm, phase)`` with ``(P psi)[c] = phase[c] * psi[perm[c]]``."""
        if self.n_qubits > 24:
            raise CapacityError("statevector action limited to 24 qubits")
        idx = np.arange(1 << self.n_qubits, dtype=np.int64)
        perm = idx ^ self.x_mask
        parity = np.zeros(idx.shape, dtype=np.int64)
        zsrc = perm & self.z_mask
        for q in range(self.n_qubits):
            parity ^= (zsrc >> q) & 1
        phase = (1j ** self.n_y) * (1 - 2 * parity)
        return perm, phase.astype(complex)

    @cached_property
    def tangent_action(self) -> tuple[np.ndarray, np.ndarray]:
        """``(perm, q)`` with ``(-i P psi)[c] = q[c] * psi[perm[c]]``.

        ``q`` is real when the string has an odd number of ``Y`` factors, so
        rotations generated by such strings keep real states real.
        """
        perm, phase = self.action
        q = -1j * phase
        if self.n_y % 2:
            q = np.ascontiguousarray(q.real)
        return perm, q

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Apply the string to a state vector or to every column of a matrix."""
        perm, phase = self.action
        if psi.ndim == 1:
            return phase * psi[perm]
        return phase[:, None] * psi[perm]

    def matrix(self) -> np.ndarray:
        perm, phase = self.action
        dim = perm.size
        m = np.zeros((dim, dim), dtype=complex)
        m[np.arange(dim), perm] = phase
        return m


def _check_dims(a, b):
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return ``(phase, c)`` with ``a @ b == phase * c``."""
    _check_dims(a, b)
    phase = 1 + 0j
    out = []
    for pa, pb in zip(a.labels, b.labels):
        ph, c = _PRODUCT[pa, pb]
        phase *= ph
        out.append(c)
    return phase, PauliString("".join(out))


def cnot_cost(p: PauliString) -> int:
    """CNOTs for ``exp(-i theta P)`` with all-to-all connectivity: ``2(p-1)``."""
    return max(0, 2 * (p.weight - 1))


@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    string: PauliString

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError("non-finite Pauli coefficient")


def _canonical(items: Iterable[tuple[PauliString, complex]], tol: float) -> tuple[PauliTerm, ...]:
    acc: dict[PauliString, complex] = {}
    for s, c in items:
        acc[s] = acc.get(s, 0.0) + complex(c)
    if not acc:
        return ()
    scale = max(abs(c) for c in acc.values())
    cut = tol * max(scale, 1.0) if scale > 0 else 0.0
    kept = [(s, c) for s, c in acc.items() if abs(c) > cut]
    kept.sort(key=lambda sc: sc[0].sort_key())
    return tuple(PauliTerm(c, s) for s, c in kept)


@dataclass(frozen=True)
class PauliOperatorSum:
    """Canonical weighted sum of Pauli strings on a fixed register.

    Terms have unique strings, are sorted by :meth:`PauliString.sort_key`
    and terms below ``PRUNE_TOL`` (relative to the largest coefficient,
    floored at 1) are dropped.
    """

    n_qubits: int
    terms: tuple[PauliTerm, ...] = field(default=())

    def __post_init__(self):
        for t in self.terms:
            if t.string.n_qubits != self.n_qubits:
                raise DimensionError("term acts on a different register")
        object.__setattr__(self, "terms", _canonical(((t.string, t.coefficient) for t in self.terms), PRUNE_TOL))

    @classmethod
    def from_terms(cls, n_qubits: int, items: Iterable[tuple[complex, PauliString | str]]):
        terms = []
        for c, s in items:
            if isinstance(s, str):
                s = PauliString.parse(s, n_qubits)
            terms.append(PauliTerm(complex(c), s))
        return cls(n_qubits, tuple(terms))

    @classmethod
    def single(cls, string: PauliString, coefficient: complex = 1.0) -> "PauliOperatorSum":
        return cls(string.n_qubits, (PauliTerm(complex(coefficient), string),))

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliOperatorSum":
        return cls(n_qubits, ())

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliOperatorSum":
        return cls.single(PauliString.identity(n_qubits), coefficient)

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "PauliOperatorSum":
        """Inverse of :meth:`text`; one ``c * P`` term per line or ``+``-joined."""
        terms = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coeff, _, ps = line.partition("*")
            terms.append(PauliTerm(complex(coeff.strip().replace(" ", "")), PauliString.parse(ps, n_qubits)))
        return cls(n_qubits, tuple(terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def as_dict(self) -> dict[PauliString, complex]:
        return {t.string: t.coefficient for t in self.terms}

    def coefficient(self, string: PauliString | str) -> complex:
        if isinstance(string, str):
            string = PauliString.parse(string, self.n_qubits)
        return self.as_dict().get(string, 0.0)

    def canonicalize(self) -> "PauliOperatorSum":
        return PauliOperatorSum(self.n_qubits, self.terms)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "PauliOperatorSum") -> "PauliOperatorSum":
        if not isinstance(other, PauliOperatorSum):
            return NotImplemented
        _check_dims(self, other)
        return PauliOperatorSum(self.n_qubits, self.terms + other.terms)

    def __neg__(self) -> "PauliOperatorSum":
        return self * -1

    def __sub__(self, other: "PauliOperatorSum") -> "PauliOperatorSum":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PauliOperatorSum):
            return self @ other
        c = complex(other)
        return PauliOperatorSum(self.n_qubits, tuple(PauliTerm(t.coefficient * c, t.string) for t in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "PauliOperatorSum":
        return self * (1.0 / scalar)

    def __matmul__(self, other: "PauliOperatorSum") -> "PauliOperatorSum":
        _check_dims(self, other)
        items = []
        for ta in self.terms:
            for tb in other.terms:
                ph, s = multiply(ta.string, tb.string)
                items.append(PauliTerm(ph * ta.coefficient * tb.coefficient, s))
        return PauliOperatorSum(self.n_qubits, tuple(items))

    def adjoint(self) -> "PauliOperatorSum":
        return PauliOperatorSum(self.n_qubits, tuple(PauliTerm(np.conj(t.coefficient), t.string) for t in self.terms))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(t.coefficient.imag) <= tol * max(1.0, abs(t.coefficient)) for t in self.terms)

    def real(self) -> "PauliOperatorSum":
        """Drop imaginary parts (for sums known to be Hermitian up to round-off)."""
        return PauliOperatorSum(self.n_qubits, tuple(PauliTerm(t.coefficient.real, t.string) for t in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def embed(self, n_qubits: int, offset: int) -> "PauliOperatorSum":
        """Place this operator on qubits ``[offset, offset + self.n_qubits)`` of a larger register."""
        if offset < 0 or offset + self.n_qubits > n_qubits:
            raise DimensionError("embedding does not fit in the target register")
        items = []
        for t in self.terms:
            labels = "I" * offset + t.string.labels + "I" * (n_qubits - offset - self.n_qubits)
            items.append(PauliTerm(t.coefficient, PauliString(labels)))
        return PauliOperatorSum(n_qubits, tuple(items))

    # inspection -----------------------------------------------------------
    def strings(self) -> list[PauliString]:
        return [t.string for t in self.terms]

    def weight_histogram(self) -> dict[int, int]:
        counts = Counter(t.string.weight for t in self.terms)
        return dict(sorted(counts.items()))

    def max_weight(self) -> int:
        return max((t.string.weight for t in self.terms), default=0)

    def trotter_cnots(self) -> int:
        """CNOTs for one first-order Trotter step over all terms."""
        return sum(cnot_cost(t.string) for t in self.terms)

    def text(self, precision: int = 12) -> str:
        """Debug form, one ``c * X1 Z0`` term per line."""
        lines = []
        for t in self.terms:
            c = t.coefficient
            cs = f"{c.real:.{precision}g}" if c.imag == 0 else f"({c.real:.{precision}g}{c.imag:+.{precision}g}j)"
            lines.append(f"{cs} * {t.string.text()}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.text(6) or "0"

    def allclose(self, other: "PauliOperatorSum", atol: float = 1e-12) -> bool:
        _check_dims(self, other)
        a, b = self.as_dict(), other.as_dict()
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= atol for k in set(a) | set(b))

    # numerics -------------------------------------------------------------
    def apply(self, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi, dtype=complex)
        for t in self.terms:
            out += t.coefficient * t.string.apply(psi)
        return out

    def to_sparse(self):
        """CSR matrix of the sum (used for repeated statevector products)."""
        import scipy.sparse as sp

        dim = 1 << self.n_qubits
        if not self.terms:
            return sp.csr_matrix((dim, dim), dtype=complex)
        rows = np.tile(np.arange(dim), len(self.terms))
        cols = np.concatenate([t.string.action[0] for t in self.terms])
        vals = np.concatenate([t.coefficient * t.string.action[1] for t in self.terms])
        if not np.any(vals.imag):
            vals = vals.real
        return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))

    def diagonal_part(self) -> "PauliOperatorSum":
        return PauliOperatorSum(self.n_qubits, tuple(t for t in self.terms if t.string.x_mask == 0))


def commutator(a: PauliOperatorSum, b: PauliOperatorSum) -> PauliOperatorSum:
    """``[a, b] = ab - ba``; only anticommuting string pairs survive."""
    _check_dims(a, b)
    items = []
    for ta in a.terms:
        for tb in b.terms:
            if ta.string.commutes_with(tb.string):
                continue
            ph, s = multiply(ta.string, tb.string)
            items.append(PauliTerm(2 * ph * ta.coefficient * tb.coefficient, s))
    return PauliOperatorSum(a.n_qubits, tuple(items))


def to_dense(op: PauliOperatorSum, limit: int = DENSE_QUBIT_LIMIT) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of ``op``."""
    if op.n_qubits > limit:
        raise CapacityError(f"{op.n_qubits} qubits exceeds dense limit {limit}")
    dim = 1 << op.n_qubits
    m = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(dim)
    for t in op.terms:
        perm, phase = t.string.action
        m[rows, perm] += t.coefficient * phase
    return m


def kron_dense(string: PauliString) -> np.ndarray:
    """Reference Kronecker-product matrix (qubit 0 rightmost factor)."""
    single = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    m = np.ones((1, 1), dtype=complex)
    for p in reversed(string.labels):
        m = np.kron(m, single[p])
    return m
