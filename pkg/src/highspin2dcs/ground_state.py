"""Ground-state preparation as pseudo-Trotter ansatz states.

Three routes: qubit-ADAPT VQE (greedy largest-gradient growth with full
re-optimization), adaptive variational imaginary-time evolution, and direct
injection of the exact ground state as the reference vector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.optimize as so

from .avqds import EvolutionConfig, adapt_ansatz
from .exact import ground_state
from .model import ModelSpec
from .pauli import PauliOperatorSum
from .pools import PoolSpec
from .statevector import AnsatzState, expectation, tangents

__all__ = [
    "OptimizerError",
    "GroundStateResult",
    "adapt_vqe",
    "avqite",
    "ed_ansatz",
    "verify_spin",
    "prepare_ground_state",
]

log = logging.getLogger(__name__)


class OptimizerError(RuntimeError):
    def __init__(self, message: str, best_energy: float):
        super().__init__(f"{message} (best energy {best_energy:.12g})")
        self.best_energy = best_energy


@dataclass
class GroundStateResult:
    ansatz: AnsatzState
    energy: float
    iterations: int
    history: list[float]


def _sparse(H):
    return H.to_sparse() if isinstance(H, PauliOperatorSum) else H


def _energy_and_grad(Hs, ref, gens, theta):
    psi, T = tangents(ref, gens, theta)
    hpsi = Hs @ psi
    e = float(np.vdot(psi, hpsi).real)
    return e, 2 * np.real(T.conj().T @ hpsi)


def adapt_vqe(
    H0: PauliOperatorSum,
    pool: PoolSpec,
    grad_tol: float = 1e-6,
    energy_tol: float = 1e-10,
    max_operators: int = 200,
    reference: int = 0,
) -> GroundStateResult:
    """Qubit-ADAPT VQE from the basis state ``reference`` (default all zeros).

    Each round appends the pool string with the largest energy gradient at
    zero angle, then re-optimizes all angles with BFGS and analytic gradients.
    """
    Hs = _sparse(H0)
    ansatz = AnsatzState(H0.n_qubits, reference)
    ref = ansatz.reference_vector
    psi = ref
    energy = expectation(Hs, psi)
    history = [energy]
    for it in range(max_operators):
        hpsi = Hs @ psi
        # dE/dtheta at theta_nu = 0 for exp(-i theta A) appended last
        grads = -2 * np.imag(pool.apply_all(psi).conj() @ hpsi)
        if ansatz.generators:
            last = ansatz.generators[-1]
            grads = np.where([s == last for s in pool.strings], 0.0, grads)
        best = int(np.argmax(np.abs(grads)))
        if abs(grads[best]) < grad_tol:
            return GroundStateResult(ansatz, energy, it, history)
        ansatz.append(pool.strings[best], 0.0)
        gens = ansatz.generators
        res = so.minimize(
            lambda th: _energy_and_grad(Hs, ref, gens, th),
            ansatz.angles,
            jac=True,
            method="BFGS",
            options={"gtol": 1e-10, "maxiter": 10000},
        )
        if not res.success and np.max(np.abs(res.jac)) > 1e-5:
            raise OptimizerError(f"re-optimization failed: {res.message}", min(energy, float(res.fun)))
        ansatz.angles = np.asarray(res.x, dtype=float)
        psi = ansatz.prepare()
        new_energy = float(res.fun)
        history.append(new_energy)
        converged = abs(energy - new_energy) < energy_tol
        energy = new_energy
        if converged:
            return GroundStateResult(ansatz, energy, it + 1, history)
    log.warning("ADAPT-VQE reached %d operators without converging", max_operators)
    return GroundStateResult(ansatz, energy, max_operators, history)


def avqite(
    H0: PauliOperatorSum,
    pool: PoolSpec,
    config: EvolutionConfig | None = None,
    slope_tol: float = 1e-8,
    dbeta_max: float = 0.5,
    max_steps: int = 5000,
    reference: int = 0,
    energy_tol: float = 1e-6,
    window: int = 50,
) -> GroundStateResult:
    """Adaptive variational imaginary-time evolution with an explicit Euler flow.

    Stops once ``|dE/dbeta| = C.(M + delta)^-1.C`` drops below ``slope_tol``,
    or once the energy fell by less than ``energy_tol`` over the last
    ``window`` steps.  The second test catches the Euler flow rattling in a
    stiff direction, where the predicted slope stays finite while the energy
    no longer moves.
    """
    if config is None:
        config = EvolutionConfig(l2_cut=1e-3, dtheta_max=0.05, dt_max=dbeta_max, stall_rtol=1e-3)
    Hs = _sparse(H0)
    ansatz = AnsatzState(H0.n_qubits, reference)

    def apply_h(psi):
        return Hs @ psi

    warnings: list[str] = []
    history = []
    for step in range(max_steps):
        system = adapt_ansatz(ansatz, apply_h, pool, config, warnings, float(step), imaginary=True)
        history.append(system.energy)
        rate = system.theta_dot
        slope = float(system.V @ rate) if rate.size else 0.0
        if abs(slope) < slope_tol:
            return GroundStateResult(ansatz, system.energy, step, history)
        if step >= window and history[step - window] - system.energy < energy_tol:
            return GroundStateResult(ansatz, system.energy, step, history)
        peak = float(np.max(np.abs(rate)))
        dbeta = min(config.dt_max, config.dtheta_max / peak)
        ansatz.angles = ansatz.angles + dbeta * rate
    log.warning("AVQITE reached %d steps; |dE/dbeta| still above %g", max_steps, slope_tol)
    return GroundStateResult(ansatz, expectation(Hs, ansatz.prepare()), max_steps, history)


def ed_ansatz(spec: ModelSpec) -> AnsatzState:
    """Zero-parameter ansatz whose reference is the exact ground state."""
    return AnsatzState(spec.n_qubits, ground_state(spec)[1])


def verify_spin(psi: np.ndarray, spec: ModelSpec, bound: float = 1e-3) -> dict:
    """Per-site ``<S_j^2>`` against ``s(s+1)``; ``flagged`` lists sites beyond ``bound``."""
    target = float(spec.s * (spec.s + 1))
    values, errors, flagged = [], [], []
    for j in range(spec.n_sites):
        v = expectation(spec.operators.spin_squared(j), psi)
        err = abs(v - target) / target
        values.append(v)
        errors.append(err)
        if err > bound:
            flagged.append(j)
    return {"target": target, "values": values, "relative_errors": errors, "flagged": flagged}


def prepare_ground_state(spec: ModelSpec, method: str = "adapt-vqe", pool_kind: str | None = None) -> GroundStateResult:
    ops = spec.operators
    if method == "ed":
        ans = ed_ansatz(spec)
        return GroundStateResult(ans, expectation(ops.H0, ans.prepare()), 0, [])
    if method == "adapt-vqe":
        pool = PoolSpec.build(pool_kind or "all12", spec.n_qubits, ops.H0)
        return adapt_vqe(ops.H0, pool)
    if method == "avqite":
        pool = PoolSpec.build(pool_kind or "yzchain", spec.n_qubits, ops.H0)
        return avqite(ops.H0, pool)
    raise ValueError(f"unknown ground-state method {method!r}")
