"""Statevector simulation of Pauli-rotation circuits.

Rotations are ``U(theta) = exp(-i theta P)`` with no factor of one half, so
``d/dtheta U = -i P U``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .pauli import CapacityError, DimensionError, PauliOperatorSum, PauliString, cnot_cost

__all__ = [
    "AnsatzState",
    "basis_state",
    "apply_rotation",
    "prepare",
    "tangents",
    "tangent_vector",
    "trotter_evolve",
    "expectation",
    "variance",
    "trotter_step",
]

STATEVECTOR_QUBIT_LIMIT = 20


def basis_state(n_qubits: int, index: int = 0) -> np.ndarray:
    if n_qubits > STATEVECTOR_QUBIT_LIMIT:
        raise CapacityError(f"statevector limited to {STATEVECTOR_QUBIT_LIMIT} qubits")
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def apply_rotation(psi: np.ndarray, string: PauliString, theta: float) -> np.ndarray:
    """``exp(-i theta P) psi`` for a vector or the columns of a matrix."""
    perm, q = string.tangent_action
    if psi.shape[0] != perm.size:
        raise DimensionError("state and rotation dimensions differ")
    c, s = np.cos(theta), np.sin(theta)
    if psi.ndim == 1:
        return c * psi + s * q * psi[perm]
    return c * psi + s * q[:, None] * psi[perm]


def is_real_circuit(reference: np.ndarray, generators) -> bool:
    """True when every generator has an odd ``Y`` count and the reference is real."""
    return not np.iscomplexobj(reference) and all(g.n_y % 2 for g in generators)


@dataclass
class AnsatzState:
    """``prod_mu exp(-i theta_mu A_mu) |reference>`` with the first generator applied first.

    ``reference`` is a computational-basis index or an explicit vector.
    """

    n_qubits: int
    reference: int | np.ndarray = 0
    generators: list[PauliString] = field(default_factory=list)
    angles: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.n_qubits > STATEVECTOR_QUBIT_LIMIT:
            raise CapacityError(f"statevector limited to {STATEVECTOR_QUBIT_LIMIT} qubits")
        self.generators = list(self.generators)
        self.angles = np.asarray(self.angles, dtype=float).copy()
        if self.angles.size != len(self.generators):
            raise ValueError("one angle per generator")
        for g in self.generators:
            if g.n_qubits != self.n_qubits:
                raise DimensionError("generator acts on a different register")
        if not isinstance(self.reference, (int, np.integer)):
            ref = np.asarray(self.reference, dtype=complex)
            if ref.shape != (1 << self.n_qubits,):
                raise DimensionError("reference vector has the wrong dimension")
            self.reference = ref / np.linalg.norm(ref)

    @property
    def n_params(self) -> int:
        return len(self.generators)

    @property
    def reference_vector(self) -> np.ndarray:
        """Real for basis-state references so real circuits can stay real."""
        if isinstance(self.reference, (int, np.integer)):
            psi = np.zeros(1 << self.n_qubits)
            psi[int(self.reference)] = 1.0
            return psi
        return np.array(self.reference, dtype=complex)

    def append(self, string: PauliString, theta: float = 0.0) -> None:
        if string.n_qubits != self.n_qubits:
            raise DimensionError("generator acts on a different register")
        self.generators.append(string)
        self.angles = np.append(self.angles, theta)

    def copy(self) -> "AnsatzState":
        return AnsatzState(self.n_qubits, self.reference, list(self.generators), self.angles.copy())

    def prepare(self, angles: np.ndarray | None = None) -> np.ndarray:
        return prepare(self.reference_vector, self.generators, self.angles if angles is None else angles)

    def cnot_count(self) -> int:
        return sum(cnot_cost(g) for g in self.generators)


def prepare(reference: np.ndarray, generators, angles) -> np.ndarray:
    psi = np.array(reference, dtype=float if is_real_circuit(reference, generators) else complex)
    for g, th in zip(generators, angles):
        psi = apply_rotation(psi, g, th)
    return psi


def tangents(reference: np.ndarray, generators, angles, strategy: str = "auto"):
    """State and tangent matrix ``T[:, mu] = d psi / d theta_mu``.

    ``forward`` carries the already-built columns through every later layer
    (cost ~ dim * N^2).  ``backward`` accumulates the dense suffix unitary
    from the last layer down (cost ~ dim^2 * N) and wins once ``N`` exceeds
    a few times the dimension.  Real circuits are handled in real arithmetic.
    """
    n = len(generators)
    dim = reference.shape[0]
    dtype = float if is_real_circuit(reference, generators) else complex
    if strategy == "auto":
        strategy = "backward" if n > 2 * dim else "forward"
    if strategy == "forward":
        return _tangents_forward(reference, generators, angles, n, dim, dtype)
    if strategy == "backward":
        return _tangents_backward(reference, generators, angles, n, dim, dtype)
    raise ValueError(f"unknown tangent strategy {strategy!r}")


@numba.njit(cache=True)
def _rotate_columns(T, k, x_mask, q, c, s):
    """In-place ``exp(-i theta P)`` on ``T[:, :k]``, pairing rows ``r`` and ``r ^ x_mask``."""
    if x_mask == 0:
        for r in range(T.shape[0]):
            f = c + s * q[r]
            for j in range(k):
                T[r, j] *= f
        return
    low = x_mask & -x_mask
    for r in range(T.shape[0]):
        if r & low:
            continue
        r2 = r ^ x_mask
        q1 = s * q[r]
        q2 = s * q[r2]
        for j in range(k):
            a = T[r, j]
            b = T[r2, j]
            T[r, j] = c * a + q1 * b
            T[r2, j] = c * b + q2 * a


def _tangents_forward(reference, generators, angles, n, dim, dtype):
    T = np.empty((dim, n), dtype=dtype)
    psi = np.array(reference, dtype=dtype)
    for k, (g, th) in enumerate(zip(generators, angles)):
        perm, q = g.tangent_action
        c, s = np.cos(th), np.sin(th)
        if k:
            _rotate_columns(T, k, g.x_mask, q.astype(dtype, copy=False), c, s)
        psi = c * psi + s * q * psi[perm]
        # A_k commutes with its own rotation
        T[:, k] = q * psi[perm]
    return psi, T


def _tangents_backward(reference, generators, angles, n, dim, dtype):
    layers = np.empty((n, dim), dtype=dtype)
    psi = np.array(reference, dtype=dtype)
    for k, (g, th) in enumerate(zip(generators, angles)):
        perm, q = g.tangent_action
        c, s = np.cos(th), np.sin(th)
        psi = c * psi + s * q * psi[perm]
        layers[k] = q * psi[perm]
    T = np.empty((dim, n), dtype=dtype)
    suffix = np.eye(dim, dtype=dtype)
    for k in range(n - 1, -1, -1):
        T[:, k] = suffix @ layers[k]
        perm, q = generators[k].tangent_action
        c, s = np.cos(angles[k]), np.sin(angles[k])
        # (S Q)[:, j] = S[:, perm[j]] * q[perm[j]] for the matrix Q of -iA
        suffix = c * suffix + s * suffix[:, perm] * q[perm][None, :]
    return psi, T


def tangent_vector(ansatz: "AnsatzState", mu: int) -> np.ndarray:
    """``d psi / d theta_mu``: ``-i A_mu`` inserted after the ``mu``-th rotation."""
    if not 0 <= mu < ansatz.n_params:
        raise IndexError(f"parameter {mu} outside ansatz of {ansatz.n_params}")
    gens, th = ansatz.generators, ansatz.angles
    psi = prepare(ansatz.reference_vector, gens[: mu + 1], th[: mu + 1]).astype(complex)
    psi = -1j * gens[mu].apply(psi)
    for g, a in zip(gens[mu + 1 :], th[mu + 1 :]):
        psi = apply_rotation(psi, g, a)
    return psi


def _as_operator(op):
    if isinstance(op, PauliOperatorSum):
        if not op.is_hermitian():
            raise ValueError("observable must be Hermitian")
        return op.to_sparse()
    return op


def expectation(op, psi: np.ndarray) -> float:
    m = _as_operator(op)
    if m.shape[0] != psi.shape[0]:
        raise DimensionError("state and operator dimensions differ")
    return float(np.vdot(psi, m @ psi).real)


def variance(op, psi: np.ndarray) -> float:
    m = _as_operator(op)
    hp = m @ psi
    e = np.vdot(psi, hp).real
    return float(max(0.0, np.vdot(hp, hp).real - e * e))


def trotter_step(psi: np.ndarray, H: PauliOperatorSum, dt: float) -> tuple[np.ndarray, int]:
    """First-order product ``prod_j exp(-i dt c_j P_j)`` in canonical term order.

    Returns the new state and the CNOT count of the step.
    """
    cnots = 0
    for term in H.terms:
        if term.string.weight == 0:
            continue
        psi = apply_rotation(psi, term.string, dt * float(np.real(term.coefficient)))
        cnots += cnot_cost(term.string)
    return psi, cnots


trotter_evolve = trotter_step
