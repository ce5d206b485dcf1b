"""Dense exact-diagonalization reference: spectra, propagation, fidelities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse.linalg as spla

from .encoding import physical_projector
from .model import DriveProtocol, ModelOperators, ModelSpec
from .pauli import DENSE_QUBIT_LIMIT, CapacityError, DimensionError, PauliOperatorSum, to_dense

__all__ = [
    "EigenDecomposition",
    "eigendecompose",
    "model_eigen",
    "ground_state",
    "propagate_exact",
    "fidelity",
    "matrix_element",
    "ExactPropagator",
    "DEFAULT_DT",
]

DEFAULT_DT = 0.005
_EIGH_DIM_LIMIT = 256


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenpairs; ``physical[k]`` marks states inside the encoded spin sector."""

    energies: np.ndarray
    vectors: np.ndarray
    physical: np.ndarray

    @cached_property
    def physical_indices(self) -> np.ndarray:
        return np.flatnonzero(self.physical)

    @property
    def physical_energies(self) -> np.ndarray:
        return self.energies[self.physical_indices]

    @property
    def physical_vectors(self) -> np.ndarray:
        return self.vectors[:, self.physical_indices]

    @property
    def n_physical(self) -> int:
        return int(self.physical.sum())

    @property
    def ground_state(self) -> np.ndarray:
        return self.physical_vectors[:, 0]

    @property
    def ground_energy(self) -> float:
        return float(self.physical_energies[0])

    def gap(self, k: int = 1) -> float:
        e = self.physical_energies
        return float(e[k] - e[0])

    @property
    def omega_af(self) -> float:
        """Magnon frequency ``(E1 - E0) / 2pi`` in cycles per unit time."""
        return self.gap(1) / (2 * math.pi)

    def dipoles(self, op) -> np.ndarray:
        """``<Psi_j|op|Psi_k>`` over physical eigenstates."""
        v = self.physical_vectors
        opv = _apply(op, v)
        return v.conj().T @ opv


def _apply(op, psi):
    if isinstance(op, PauliOperatorSum):
        return op.to_sparse() @ psi
    return op @ psi


def _dense(H) -> np.ndarray:
    if isinstance(H, PauliOperatorSum):
        return to_dense(H)
    if hasattr(H, "toarray"):
        return H.toarray()
    return np.asarray(H, dtype=complex)


def eigendecompose(H, physical_mask: np.ndarray | None = None) -> EigenDecomposition:
    """Dense Hermitian eigensolver.

    With ``physical_mask`` (diagonal projector onto encoded codewords) the
    physical block is diagonalized on its own; redundant basis states are
    returned as zero-energy eigenvectors.  This is exact because encoded spin
    operators have vanishing rows and columns on redundant codewords.
    """
    if isinstance(H, PauliOperatorSum):
        if H.n_qubits > DENSE_QUBIT_LIMIT:
            raise CapacityError("Hamiltonian exceeds the dense limit")
        if not H.is_hermitian():
            raise ValueError("eigendecompose needs a Hermitian operator")
    m = _dense(H)
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    if not np.allclose(m, m.conj().T, atol=1e-12 * max(1.0, np.abs(m).max(initial=0))):
        raise ValueError("eigendecompose needs a Hermitian operator")
    dim = m.shape[0]
    if physical_mask is None:
        w, v = np.linalg.eigh(m)
        return EigenDecomposition(w, v, np.ones(dim, dtype=bool))
    mask = np.asarray(physical_mask, dtype=bool)
    phys = np.flatnonzero(mask)
    red = np.flatnonzero(~mask)
    block = m[np.ix_(phys, phys)]
    w, u = np.linalg.eigh(block)
    energies = np.concatenate([w, np.zeros(red.size)])
    vectors = np.zeros((dim, dim), dtype=u.dtype)
    vectors[phys, : phys.size] = u
    vectors[red, phys.size + np.arange(red.size)] = 1.0
    flags = np.concatenate([np.ones(phys.size, bool), np.zeros(red.size, bool)])
    order = np.argsort(energies, kind="stable")
    return EigenDecomposition(energies[order], vectors[:, order], flags[order])


def model_eigen(spec: ModelSpec) -> EigenDecomposition:
    mask = physical_projector(spec.s, spec.encoding, spec.n_sites) > 0
    return eigendecompose(spec.operators.H0, mask)


def ground_state(spec: ModelSpec, dense_limit: int = _EIGH_DIM_LIMIT) -> tuple[float, np.ndarray]:
    """Lowest physical eigenpair of ``H0``.

    Small systems use the dense solver; larger ones use Lanczos from a fixed
    start vector on the physical sector.  Redundant codewords sit at zero
    energy and are excluded by restricting to the physical block.
    """
    mask = physical_projector(spec.s, spec.encoding, spec.n_sites) > 0
    if mask.size <= dense_limit:
        eig = model_eigen(spec)
        return eig.ground_energy, eig.ground_state
    H = spec.operators.H0_sparse.tocsr()
    if not np.any(H.data.imag):
        H = H.real
    phys = np.flatnonzero(mask)
    block = H[phys][:, phys]
    v0 = np.ones(phys.size) / math.sqrt(phys.size)
    w, v = spla.eigsh(block, k=1, which="SA", v0=v0, tol=1e-13)
    psi = np.zeros(mask.size, dtype=v.dtype)
    psi[phys] = v[:, 0]
    # fix the global phase so the largest component is real and positive
    k = int(np.argmax(np.abs(psi)))
    psi = psi * (abs(psi[k]) / psi[k])
    return float(w[0]), psi


def propagate_exact(state: np.ndarray, H_t, dt: float) -> np.ndarray:
    """``exp(-i dt H) |state>`` for a frozen Hamiltonian."""
    if dt == 0:
        return np.array(state, dtype=complex)
    if dt < 0:
        raise ValueError("dt must be non-negative")
    m = _dense(H_t)
    if m.shape[0] != state.shape[0]:
        raise DimensionError("state and Hamiltonian dimensions differ")
    w, v = np.linalg.eigh(m)
    return v @ (np.exp(-1j * dt * w) * (v.conj().T @ state))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DimensionError("state dimensions differ")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def matrix_element(op, bra: np.ndarray, ket: np.ndarray) -> complex:
    if bra.shape != ket.shape:
        raise DimensionError("state dimensions differ")
    return complex(np.vdot(bra, _apply(op, ket)))


class ExactPropagator:
    """Time-dependent exact propagation of ``H(t) = H0 - B(t) Hz``.

    Within a step of length ``<= dt`` the Hamiltonian is frozen at the
    midpoint field.  Once the drive has decayed the evolution uses the
    eigendecomposition of ``H0`` and is exact for any step length.
    """

    def __init__(self, ops: ModelOperators, protocol: DriveProtocol, dt: float = DEFAULT_DT):
        self.ops = ops
        self.protocol = protocol
        self.dt = dt
        self.t_quiet = protocol.support_end(1e-16)
        self.H0 = ops.H0_sparse
        self.hz = ops.Hz_diag
        self.dim = self.hz.size

    @cached_property
    def _h0_eig(self):
        w, v = np.linalg.eigh(self.H0.toarray())
        return w, v

    @cached_property
    def _h0_dense(self):
        return self.H0.toarray()

    def _step(self, psi, t, h):
        B = float(self.protocol(t + 0.5 * h))
        if self.dim <= _EIGH_DIM_LIMIT:
            m = self._h0_dense - B * np.diag(self.hz)
            w, v = np.linalg.eigh(m)
            return v @ (np.exp(-1j * h * w) * (v.conj().T @ psi))
        op = self.H0 - B * _diag_sparse(self.hz)
        return spla.expm_multiply(-1j * h * op, psi)

    def advance(self, psi: np.ndarray, t: float, t_end: float) -> np.ndarray:
        """Propagate ``psi`` from ``t`` to ``t_end``."""
        if t_end < t:
            raise ValueError("cannot propagate backwards")
        if t < self.t_quiet:
            t_mid = min(t_end, self.t_quiet)
            n = max(1, math.ceil((t_mid - t) / self.dt - 1e-9))
            h = (t_mid - t) / n
            for k in range(n):
                psi = self._step(psi, t + k * h, h)
            t = t_mid
        if t_end > t:
            w, v = self._h0_eig
            psi = v @ (np.exp(-1j * (t_end - t) * w) * (v.conj().T @ psi))
        return psi

    def run(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """States at each of the increasing ``times`` (starting from ``times[0]``)."""
        out = np.empty((len(times), psi0.size), dtype=complex)
        psi = np.array(psi0, dtype=complex)
        out[0] = psi
        for k in range(1, len(times)):
            psi = self.advance(psi, times[k - 1], times[k])
            out[k] = psi
        return out

    def magnetization(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        states = self.run(psi0, times)
        return np.einsum("ti,i,ti->t", states.conj(), self.hz, states).real


def _diag_sparse(d):
    import scipy.sparse as sp

    return sp.diags(d, format="csr")
