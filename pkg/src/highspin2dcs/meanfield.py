"""Mean-field decoupling of the spin chain and its self-consistent dynamics.

Each site carries its own ``(2s+1)``-level state and feels the instantaneous
moments of its neighbours.  Anisotropy enters linearized, ``-2 K m S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize as so

from .encoding import spin_matrices
from .model import DriveProtocol, ModelSpec

__all__ = [
    "canting_angle",
    "classical_energy",
    "minimize_classical_energy",
    "MeanFieldState",
    "mf_hamiltonians",
    "mf_ground_state",
    "mf_evolve",
    "mf_magnetization",
]


def canting_angle(J: float, D: float, K_a: float = 0.0, K_c: float = 0.0) -> float:
    """``phi`` with ``tan 2 phi = D / (J + K_a - K_c)``, taken on ``(-pi/4, pi/4]`` for ``J + K_a - K_c > 0``."""
    den = J + K_a - K_c
    if D == 0 and den == 0:
        raise ValueError("canting angle undefined when D and J + K_a - K_c both vanish")
    return 0.5 * math.atan2(D, den)


def classical_energy(phi, s, J: float, D: float, K_a: float = 0.0, K_c: float = 0.0):
    """Two-sublattice energy for moments ``m_i = s((-1)^i sin phi, 0, cos phi)``."""
    s2 = float(s) ** 2
    phi = np.asarray(phi, dtype=float)
    return (
        2 * J * s2 * np.cos(2 * phi)
        + 2 * D * s2 * np.sin(2 * phi)
        - 4 * K_a * s2 * np.sin(phi) ** 2
        - 4 * K_c * s2 * np.cos(phi) ** 2
    )


def minimize_classical_energy(s, J, D, K_a=0.0, K_c=0.0, bracket=(0.0, math.pi)) -> float:
    """Numerical minimizer of :func:`classical_energy` on ``bracket``."""
    res = so.minimize_scalar(
        lambda p: float(classical_energy(p, s, J, D, K_a, K_c)),
        bounds=bracket,
        method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.x)


@dataclass
class MeanFieldState:
    """Per-site local states ``psi[i]`` (length ``2s+1``) with ``S^z|l> = (s - l)|l>``."""

    spec: ModelSpec
    psi: np.ndarray

    @property
    def moments(self) -> np.ndarray:
        return _moments(self.psi, _spin_ops(self.spec))

    @property
    def magnetization(self) -> float:
        return float(self.moments[:, 2].sum())


def _spin_ops(spec: ModelSpec) -> np.ndarray:
    m = spin_matrices(spec.s)
    return np.stack([m["x"].entries, m["y"].entries, m["z"].entries])


def _moments(psi: np.ndarray, ops: np.ndarray) -> np.ndarray:
    # m[i, a] = <psi_i|S^a|psi_i>
    return np.einsum("ik,akl,il->ia", psi.conj(), ops, psi).real


def _local_fields(spec: ModelSpec, m: np.ndarray, B: float) -> np.ndarray:
    """Coefficient vectors ``h[i]`` with ``H_i = h[i] . S_i``."""
    h = np.zeros_like(m)
    a, b = m[:-1], m[1:]
    h[:-1] += spec.J * b
    h[1:] += spec.J * a
    # -D (S_i^z m_{i+1}^x - S_i^x m_{i+1}^z) and -D (m_i^z S_{i+1}^x - m_i^x S_{i+1}^z)
    h[:-1, 2] -= spec.D * b[:, 0]
    h[:-1, 0] += spec.D * b[:, 2]
    h[1:, 0] -= spec.D * a[:, 2]
    h[1:, 2] += spec.D * a[:, 0]
    h[:, 0] += -2 * spec.K_a * m[:, 0]
    h[:, 2] += -2 * spec.K_c * m[:, 2] - B
    return h


def mf_hamiltonians(spec: ModelSpec, m: np.ndarray, B: float = 0.0) -> np.ndarray:
    ops = _spin_ops(spec)
    return np.einsum("ia,akl->ikl", _local_fields(spec, m, B), ops)


def mf_ground_state(spec: ModelSpec, tol: float = 1e-10, max_iter: int = 10000, mixing: float = 0.5) -> MeanFieldState:
    """Self-consistent product ground state seeded at the classical energy minimum."""
    ops = _spin_ops(spec)
    phi = math.pi / 2 + canting_angle(spec.J, spec.D, spec.K_a, spec.K_c)
    s = float(spec.s)
    m = np.array([[s * (-1) ** i * math.sin(phi), 0.0, s * math.cos(phi)] for i in range(spec.n_sites)])
    psi = None
    for _ in range(max_iter):
        H = mf_hamiltonians(spec, m)
        _, v = np.linalg.eigh(H)
        psi = v[:, :, 0]
        new = _moments(psi, ops)
        if np.max(np.abs(new - m)) < tol:
            return MeanFieldState(spec, psi)
        m = mixing * new + (1 - mixing) * m
    raise RuntimeError("mean-field self-consistency did not converge")


def _rhs(spec, ops, psi, B):
    m = _moments(psi, ops)
    H = np.einsum("ia,akl->ikl", _local_fields(spec, m, B), ops)
    return -1j * np.einsum("ikl,il->ik", H, psi)


def mf_evolve(
    state: MeanFieldState,
    protocol: DriveProtocol,
    times: np.ndarray,
    dt: float = 0.005,
    norm_tol: float = 1e-8,
) -> np.ndarray:
    """``M^z`` at ``times`` under RK4 with moments refreshed at every stage.

    A step that changes any local norm by more than ``norm_tol`` is retried
    with half the step size.
    """
    spec = state.spec
    ops = _spin_ops(spec)
    psi = state.psi.astype(complex)
    out = np.empty(len(times))
    out[0] = _moments(psi, ops)[:, 2].sum()
    t = float(times[0])
    for k in range(1, len(times)):
        t_end = float(times[k])
        while t < t_end - 1e-12:
            h = min(dt, t_end - t)
            while True:
                new = _rk4(spec, ops, psi, t, h, protocol)
                drift = np.max(np.abs(np.linalg.norm(new, axis=1) - np.linalg.norm(psi, axis=1)))
                if drift <= norm_tol or h < 1e-6:
                    break
                h /= 2
            psi = new
            t += h
        out[k] = _moments(psi, ops)[:, 2].sum()
    return out


def _rk4(spec, ops, psi, t, h, protocol):
    b0, b1, b2 = float(protocol(t)), float(protocol(t + h / 2)), float(protocol(t + h))
    k1 = _rhs(spec, ops, psi, b0)
    k2 = _rhs(spec, ops, psi + 0.5 * h * k1, b1)
    k3 = _rhs(spec, ops, psi + 0.5 * h * k2, b1)
    k4 = _rhs(spec, ops, psi + h * k3, b2)
    return psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def mf_magnetization(spec: ModelSpec, protocol: DriveProtocol, times: np.ndarray, dt: float = 0.005) -> np.ndarray:
    return mf_evolve(mf_ground_state(spec), protocol, times, dt)
