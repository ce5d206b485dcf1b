"""Adaptive variational real-time dynamics (McLachlan principle, pseudo-Trotter ansatz).

The parameter flow solves ``(M + delta I) theta_dot = V`` with

``M_{mu nu} = 2 Re[<d_mu psi|d_nu psi> + <d_mu psi|psi><d_nu psi|psi>]``
``V_mu = 2 Im[<d_mu psi|H|psi> - <d_mu psi|psi><H>]``

and the residual McLachlan distance ``L2 = 2 var(H) - V.theta_dot``.  Before
every step the ansatz is grown greedily from an operator pool until ``L2``
falls below ``l2_cut``.
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla

from .exact import ExactPropagator, fidelity
from .model import DriveProtocol, ModelOperators
from .pauli import cnot_cost
from .pools import PoolSpec
from .statevector import AnsatzState, tangents

__all__ = [
    "Integrator",
    "EvolutionConfig",
    "EvolutionRecord",
    "McLachlanSystem",
    "assemble_MV",
    "mclachlan_distance",
    "adapt_ansatz",
    "rk4_combine",
    "evolve",
]

log = logging.getLogger(__name__)


class Integrator(str, enum.Enum):
    RK4 = "rk4"
    EULER = "euler"


@dataclass(frozen=True)
class EvolutionConfig:
    l2_cut: float = 1e-5
    dtheta_max: float | None = None
    tikhonov: float = 1e-6
    integrator: Integrator = Integrator.RK4
    pool: str = "all12"
    dt_min: float = 1e-6
    dt_max: float = 0.1
    stall_rtol: float = 1e-3
    max_adapt: int = 200
    # seconds; a run that exceeds it stops early and is marked truncated
    wall_limit: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "integrator", Integrator(self.integrator))
        if self.dtheta_max is None:
            default = 5e-3 if self.integrator is Integrator.RK4 else 2.5e-4
            object.__setattr__(self, "dtheta_max", default)
        for name in ("l2_cut", "dtheta_max", "tikhonov", "dt_min", "dt_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.dt_min < self.dt_max:
            raise ValueError("dt_min must be below dt_max")
        if self.wall_limit is not None and not self.wall_limit > 0:
            raise ValueError("wall_limit must be positive")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["integrator"] = self.integrator.value
        return d


@dataclass
class EvolutionRecord:
    """Per-step trace of an adaptive run; row 0 is the initial state."""

    time: list[float] = field(default_factory=list)
    dt: list[float] = field(default_factory=list)
    n_theta: list[int] = field(default_factory=list)
    cnots: list[int] = field(default_factory=list)
    l2: list[float] = field(default_factory=list)
    mz: list[float] = field(default_factory=list)
    infidelity: list[float] = field(default_factory=list)
    mz_exact: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    truncated: bool = False

    @property
    def n_steps(self) -> int:
        return max(0, len(self.time) - 1)

    def arrays(self) -> dict[str, np.ndarray]:
        out = {k: np.asarray(getattr(self, k)) for k in ("time", "dt", "n_theta", "cnots", "l2", "mz")}
        if self.infidelity:
            out["infidelity"] = np.asarray(self.infidelity)
            out["mz_exact"] = np.asarray(self.mz_exact)
        return out

    def summary(self) -> dict:
        s = {
            "n_steps": self.n_steps,
            "final_time": self.time[-1] if self.time else 0.0,
            "initial_cnots": self.cnots[0] if self.cnots else 0,
            "final_cnots": self.cnots[-1] if self.cnots else 0,
            "final_n_theta": self.n_theta[-1] if self.n_theta else 0,
            "max_l2": max(self.l2) if self.l2 else 0.0,
            "n_warnings": len(self.warnings),
            "truncated": self.truncated,
        }
        if self.infidelity:
            s["max_infidelity"] = max(self.infidelity)
            s["max_mz_deviation"] = float(np.max(np.abs(np.subtract(self.mz, self.mz_exact))))
        return s


def mclachlan_distance(M: np.ndarray, V: np.ndarray, var_h: float, tikhonov: float = 1e-6) -> float:
    """``2 var(H) - V (M + delta I)^-1 V`` clipped at zero."""
    if V.size == 0:
        return max(0.0, 2 * var_h)
    x = _solve(M, V, tikhonov)
    return max(0.0, float(2 * var_h - V @ x))


def _solve(M, rhs, tikhonov):
    A = M + tikhonov * np.eye(M.shape[0])
    try:
        return sla.cho_solve(sla.cho_factor(A, check_finite=False), rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"McLachlan solve failed for {M.shape[0]} parameters: {exc}") from exc


class McLachlanSystem:
    """Dense data of one ``(theta, t)`` point: state, tangents, ``M``, ``V``, ``var(H)``.

    ``apply_h`` returns ``H psi``.  In imaginary-time mode the force vector
    is the energy gradient ``C_mu = 2 Re<d_mu psi|H|psi>`` and the flow is
    ``theta_dot = -(M + delta I)^-1 C``; the McLachlan distance keeps the
    same ``2 var(H) - C.M^-1.C`` form.
    """

    def __init__(self, reference, generators, angles, apply_h, tikhonov=1e-6, strategy="auto", imaginary=False):
        self.tikhonov = tikhonov
        self.imaginary = imaginary
        psi, T = tangents(reference, generators, angles, strategy)
        self.psi, self.T = psi, T
        hpsi = apply_h(psi)
        self.hpsi = hpsi
        self.energy = float(np.vdot(psi, hpsi).real)
        self.var = float(max(0.0, np.vdot(hpsi, hpsi).real - self.energy**2))
        self.g = T.conj().T @ psi
        if np.iscomplexobj(T):
            R = np.concatenate([T.real, T.imag], axis=0)
            self.M = 2 * (R.T @ R + np.real(np.outer(self.g, self.g)))
        else:
            self.M = 2 * (T.T @ T + np.outer(self.g, self.g))
        self.V = self._force(T.conj().T @ hpsi, self.g)
        self._x = None
        self._candidates = None

    def _force(self, overlap_h, overlap_psi):
        """``V`` (real time) or ``C`` (imaginary time) from ``<t|H|psi>`` and ``<t|psi>``."""
        if self.imaginary:
            return 2 * np.real(overlap_h)
        return 2 * np.imag(overlap_h + np.conj(overlap_psi) * self.energy)

    @property
    def n(self) -> int:
        return self.V.size

    @property
    def _solution(self) -> np.ndarray:
        if self._x is None:
            self._x = _solve(self.M, self.V, self.tikhonov) if self.n else np.zeros(0)
        return self._x

    @property
    def theta_dot(self) -> np.ndarray:
        return -self._solution if self.imaginary else self._solution

    @property
    def l2(self) -> float:
        if not self.n:
            return max(0.0, 2 * self.var)
        return max(0.0, float(2 * self.var - self.V @ self._solution))

    def screen(self, pool: PoolSpec) -> np.ndarray:
        """``L2`` of every candidate appended at angle zero (bordered-matrix update)."""
        tc = pool.tangent_rows(self.psi)  # rows -i A_nu psi
        g_c = tc.conj() @ self.psi  # <t_nu|psi> = i<A_nu>
        c = 2 * (np.einsum("ij,ij->i", tc.conj(), tc).real + np.real(g_c**2))
        v = self._force(tc.conj() @ self.hpsi, g_c)
        base = 2 * self.var
        if not self.n:
            b = np.zeros((len(pool), 0))
            self._candidates = (tc, g_c, b, c, v)
            return np.maximum(0.0, base - v**2 / (c + self.tikhonov))
        # b[nu, mu] = 2 Re[<t_nu|d_mu psi> + <t_nu|psi><d_mu psi|psi>]
        b = 2 * (np.real(tc.conj() @ self.T) + np.real(np.outer(g_c, self.g)))
        self._candidates = (tc, g_c, b, c, v)
        A = self.M + self.tikhonov * np.eye(self.n)
        cf = sla.cho_factor(A, check_finite=False)
        x = self._solution
        Y = sla.cho_solve(cf, b.T, check_finite=False)
        schur = c + self.tikhonov - np.einsum("ij,ji->i", b, Y)
        schur = np.maximum(schur, self.tikhonov)
        gain = self.V @ x + (v - b @ x) ** 2 / schur
        return np.maximum(0.0, base - gain)

    def extend(self, k: int) -> None:
        """Append screened candidate ``k`` at angle zero (the state is unchanged)."""
        tc, g_c, b, c, v = self._candidates
        col = tc[k]
        if np.iscomplexobj(col) and not np.iscomplexobj(self.T):
            self.T = self.T.astype(complex)
        self.T = np.concatenate([self.T, col[:, None]], axis=1)
        n = self.n
        M = np.empty((n + 1, n + 1))
        M[:n, :n] = self.M
        M[n, :n] = M[:n, n] = b[k]
        M[n, n] = c[k]
        self.M = M
        self.V = np.append(self.V, v[k])
        self.g = np.append(self.g, g_c[k])
        self._x = None
        self._candidates = None


def assemble_MV(ansatz: AnsatzState, H) -> tuple[np.ndarray, np.ndarray]:
    sys_ = McLachlanSystem(ansatz.reference_vector, ansatz.generators, ansatz.angles, _applier(H))
    return sys_.M, sys_.V


def _applier(H):
    if callable(H):
        return H
    if hasattr(H, "to_sparse"):
        H = H.to_sparse()
    return lambda psi: H @ psi


def adapt_ansatz(
    ansatz: AnsatzState,
    apply_h,
    pool: PoolSpec,
    config: EvolutionConfig,
    warnings: list[str] | None = None,
    t: float = 0.0,
    imaginary: bool = False,
) -> McLachlanSystem:
    """Grow ``ansatz`` in place until ``L2 < l2_cut``; return the final system."""
    ref = ansatz.reference_vector

    def build():
        return McLachlanSystem(ref, ansatz.generators, ansatz.angles, apply_h, config.tikhonov, imaginary=imaginary)

    system = build()
    for _ in range(config.max_adapt):
        current = system.l2
        if current < config.l2_cut:
            return system
        scores = system.screen(pool)
        if ansatz.generators:
            last = ansatz.generators[-1]
            for k, s in enumerate(pool.strings):
                if s == last:
                    scores[k] = np.inf
        best = int(np.argmin(scores))
        if not scores[best] < current * (1 - config.stall_rtol):
            msg = f"t={t:.6g}: adaptation stalled at L2={current:.3e}"
            log.warning(msg)
            if warnings is not None:
                warnings.append(msg)
            return system
        ansatz.append(pool.strings[best], 0.0)
        system.extend(best)
    msg = f"t={t:.6g}: adaptation hit max_adapt with L2={system.l2:.3e}"
    log.warning(msg)
    if warnings is not None:
        warnings.append(msg)
    return system


def rk4_combine(f, theta: np.ndarray, t: float, dt: float, k1: np.ndarray | None = None) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step for ``theta' = f(theta, t)``."""
    if k1 is None:
        k1 = f(theta, t)
    k2 = f(theta + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(theta + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(theta + dt * k3, t + dt)
    return theta + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def choose_dt(k1: np.ndarray, config: EvolutionConfig) -> float:
    peak = float(np.max(np.abs(k1))) if k1.size else 0.0
    if peak == 0.0:
        return config.dt_max
    return min(config.dt_max, max(config.dt_min, config.dtheta_max / peak))


def evolve(
    ansatz: AnsatzState,
    ops: ModelOperators,
    protocol: DriveProtocol,
    config: EvolutionConfig,
    t_final: float,
    pool: PoolSpec | None = None,
    exact_initial: np.ndarray | None = None,
    t_start: float = 0.0,
) -> tuple[EvolutionRecord, AnsatzState]:
    """Adaptive variational evolution of ``H(t) = H0 - B(t) Hz`` from ``t_start`` to ``t_final``.

    With ``exact_initial`` the exact state is carried along the same time
    grid and the infidelity and exact magnetization are recorded.
    """
    ansatz = ansatz.copy()
    if pool is None:
        pool = PoolSpec.build(config.pool, ansatz.n_qubits, (ops.H0, ops.Hz))
    H0 = ops.H0_sparse
    hz = ops.Hz_diag
    ref = ansatz.reference_vector

    def applier(B):
        return lambda psi: H0 @ psi - B * (hz * psi)

    exact = None
    if exact_initial is not None:
        exact = ExactPropagator(ops, protocol)
        psi_exact = np.array(exact_initial, dtype=complex)

    rec = EvolutionRecord()
    t = t_start
    psi0 = ansatz.prepare()

    def record(t, dt, psi, l2):
        rec.time.append(t)
        rec.dt.append(dt)
        rec.n_theta.append(ansatz.n_params)
        rec.cnots.append(ansatz.cnot_count())
        rec.l2.append(l2)
        rec.mz.append(float(np.dot(hz, np.abs(psi) ** 2)))
        if exact is not None:
            rec.infidelity.append(1.0 - fidelity(psi, psi_exact))
            rec.mz_exact.append(float(np.dot(hz, np.abs(psi_exact) ** 2)))

    record(t, 0.0, psi0, 0.0)

    def rhs(theta, tt):
        s = McLachlanSystem(ref, ansatz.generators, theta, applier(float(protocol(tt))), config.tikhonov)
        return s.theta_dot

    started = time.perf_counter()
    while t < t_final - 1e-12:
        if config.wall_limit is not None and time.perf_counter() - started > config.wall_limit:
            rec.truncated = True
            rec.warnings.append(f"t={t:.4g}: wall-clock limit of {config.wall_limit:g} s reached")
            log.warning("evolution stopped at t=%.4g after %.0f s", t, config.wall_limit)
            break
        system = adapt_ansatz(ansatz, applier(float(protocol(t))), pool, config, rec.warnings, t)
        k1 = system.theta_dot
        l2 = system.l2
        dt = min(choose_dt(k1, config), t_final - t)
        theta = ansatz.angles
        if config.integrator is Integrator.RK4:
            theta = rk4_combine(rhs, theta, t, dt, k1)
        else:
            theta = theta + dt * k1
        if not np.all(np.isfinite(theta)):
            raise RuntimeError(f"non-finite parameters at t={t:.6g}")
        ansatz.angles = theta
        if exact is not None:
            psi_exact = exact.advance(psi_exact, t, t + dt)
        t = t + dt
        record(t, dt, ansatz.prepare(), l2)
    return rec, ansatz


def recount_cnots(ansatz: AnsatzState) -> int:
    return sum(cnot_cost(g) for g in ansatz.generators)
