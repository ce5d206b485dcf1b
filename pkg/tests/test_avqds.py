"""McLachlan dynamics, adaptive growth and the integrators."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from highspin2dcs.avqds import (
    EvolutionConfig,
    Integrator,
    McLachlanSystem,
    adapt_ansatz,
    assemble_MV,
    choose_dt,
    evolve,
    mclachlan_distance,
    recount_cnots,
    rk4_combine,
)
from highspin2dcs.exact import ground_state
from highspin2dcs.ground_state import ed_ansatz, prepare_ground_state
from highspin2dcs.model import DriveProtocol, ModelSpec, PulseSpec
from highspin2dcs.pauli import PauliOperatorSum, PauliString, to_dense
from highspin2dcs.pools import PoolSpec
from highspin2dcs.statevector import AnsatzState, tangents

H3 = PauliOperatorSum.from_terms(3, [(0.4, "X0 X1"), (0.3, "Z2"), (-0.5, "Y0 Z1 X2"), (0.2, "Y1")])


def _random_ansatz(rng, n=5):
    gens = [PauliString(x) for x in ["XYI", "ZZX", "IYZ", "YXX", "XIZ", "ZYI", "XXY"][:n]]
    return AnsatzState(3, 3, gens, rng.normal(size=n))


def frobenius_l2(ansatz, H, theta_dot):
    psi, T = tangents(ansatz.reference_vector, ansatz.generators, ansatz.angles)
    Hd = to_dense(H)
    rho = np.outer(psi, psi.conj())
    d = T @ theta_dot
    drho = np.outer(d, psi.conj()) + np.outer(psi, d.conj())
    return np.linalg.norm(drho + 1j * (Hd @ rho - rho @ Hd)) ** 2


class TestMcLachlan:
    def test_single_x_generator(self):
        ans = AnsatzState(1, 0, [PauliString("X")], [0.0])
        M, V = assemble_MV(ans, PauliOperatorSum.from_terms(1, [(1, "Z0")]))
        assert M.shape == (1, 1) and M[0, 0] == pytest.approx(2.0)
        assert V[0] == pytest.approx(0.0)

    def test_metric_matches_finite_differences(self, rng):
        ans = _random_ansatz(rng)
        M, _ = assemble_MV(ans, H3)
        h = 1e-5
        n = ans.n_params
        psi = ans.prepare()
        D = np.empty((8, n), complex)
        for mu in range(n):
            up, dn = ans.angles.copy(), ans.angles.copy()
            up[mu] += h
            dn[mu] -= h
            D[:, mu] = (ans.prepare(up) - ans.prepare(dn)) / (2 * h)
        g = D.conj().T @ psi
        M_fd = 2 * np.real(D.conj().T @ D - np.outer(g.conj(), g))
        assert np.allclose(M, M_fd, atol=1e-7)
        assert np.allclose(M, M.T)
        assert np.linalg.eigvalsh(M).min() > -1e-10

    @pytest.mark.parametrize("seed", range(4))
    def test_distance_equals_frobenius_definition(self, seed):
        rng = np.random.default_rng(seed)
        ans = _random_ansatz(rng, 2 + seed)
        Hd = H3.to_sparse()
        sys_ = McLachlanSystem(ans.reference_vector, ans.generators, ans.angles, lambda p: Hd @ p, tikhonov=1e-13)
        assert sys_.l2 == pytest.approx(frobenius_l2(ans, H3, sys_.theta_dot), rel=1e-8, abs=1e-12)
        # the solved rate minimizes the distance
        for _ in range(3):
            other = sys_.theta_dot + 1e-3 * rng.normal(size=sys_.n)
            assert frobenius_l2(ans, H3, other) >= sys_.l2 - 1e-12

    def test_exact_generator_has_zero_distance(self):
        H = PauliOperatorSum.from_terms(2, [(0.7, "X0 Y1")])
        ans = AnsatzState(2, 1, [PauliString.parse("X0 Y1", 2)], [0.2])
        M, V = assemble_MV(ans, H)
        sys_ = McLachlanSystem(ans.reference_vector, ans.generators, ans.angles, lambda p: H.apply(p))
        assert sys_.l2 < 1e-6
        assert sys_.theta_dot[0] == pytest.approx(0.7, rel=1e-5)

    def test_eigenstate_has_no_force(self):
        spec = ModelSpec(s=1, D=0.2)
        ans = ed_ansatz(spec)
        ans.append(PauliString.parse("X0 Y1", 4), 0.0)
        M, V = assemble_MV(ans, spec.operators.H0)
        assert np.allclose(V, 0, atol=1e-12)
        sys_ = McLachlanSystem(ans.reference_vector, ans.generators, ans.angles, lambda p: spec.operators.H0_sparse @ p)
        assert sys_.l2 < 1e-12

    def test_duplicate_generator_stays_finite(self, rng):
        ans = _random_ansatz(rng, 3)
        ans.append(ans.generators[-1], 0.0)
        sys_ = McLachlanSystem(ans.reference_vector, ans.generators, ans.angles, lambda p: H3.apply(p))
        assert np.all(np.isfinite(sys_.theta_dot))
        assert abs(np.linalg.det(sys_.M)) < 1e-10

    def test_distance_without_parameters(self):
        assert mclachlan_distance(np.zeros((0, 0)), np.zeros(0), 0.3) == pytest.approx(0.6)
        assert mclachlan_distance(np.eye(1), np.array([10.0]), 0.0) == 0.0

    def test_screen_matches_explicit_append(self, rng):
        ans = _random_ansatz(rng, 3)
        pool = PoolSpec.build("all12", 3)
        sys_ = McLachlanSystem(ans.reference_vector, ans.generators, ans.angles, lambda p: H3.apply(p))
        scores = sys_.screen(pool)
        for k in [0, 7, 20, 30]:
            trial = ans.copy()
            trial.append(pool.strings[k], 0.0)
            ref = McLachlanSystem(trial.reference_vector, trial.generators, trial.angles, lambda p: H3.apply(p))
            assert scores[k] == pytest.approx(ref.l2, rel=1e-6, abs=1e-10)


class TestAdaptation:
    def test_reaches_threshold_and_keeps_state(self, rng):
        ans = _random_ansatz(rng, 1)
        before = ans.prepare()
        pool = PoolSpec.build("all12", 3)
        cfg = EvolutionConfig(l2_cut=1e-4)
        sys_ = adapt_ansatz(ans, lambda p: H3.apply(p), pool, cfg)
        assert sys_.l2 < 1e-4
        assert ans.n_params > 1 and np.all(ans.angles[1:] == 0)
        assert np.allclose(ans.prepare(), before)

    def test_never_repeats_last_generator(self, rng):
        ans = _random_ansatz(rng, 2)
        last = ans.generators[-1]
        full = PoolSpec.build("all12", 3)
        sys_ = McLachlanSystem(ans.reference_vector, ans.generators, ans.angles, lambda p: H3.apply(p))
        scores = sys_.screen(full)
        other = min((k for k, p in enumerate(full.strings) if p != last), key=lambda k: scores[k])
        assert scores[other] < sys_.l2
        pool = PoolSpec(full.kind, (last, full.strings[other]))
        cfg = EvolutionConfig(l2_cut=1e-12, max_adapt=1, stall_rtol=1e-12)
        adapt_ansatz(ans, lambda p: H3.apply(p), pool, cfg)
        assert ans.generators[-1] == full.strings[other] and ans.n_params == 3

    def test_stall_records_warning(self):
        ans = AnsatzState(3, 0)
        pool = PoolSpec.build("hamiltonian", 3, PauliOperatorSum.from_terms(3, [(1, "Z0")]))
        warnings = []
        sys_ = adapt_ansatz(ans, lambda p: H3.apply(p), pool, EvolutionConfig(), warnings)
        assert sys_.l2 > 1e-5 and warnings and "stalled" in warnings[0]

    def test_config_validation(self):
        assert EvolutionConfig().dtheta_max == 5e-3
        assert EvolutionConfig(integrator="euler").dtheta_max == 2.5e-4
        assert EvolutionConfig(integrator="euler").integrator is Integrator.EULER
        with pytest.raises(ValueError):
            EvolutionConfig(l2_cut=0)
        with pytest.raises(ValueError):
            EvolutionConfig(dt_min=1.0, dt_max=0.5)


class TestIntegrators:
    def test_rk4_exact_for_constant_rate(self):
        th = np.array([0.1, -0.2])
        out = rk4_combine(lambda t_, tt: np.array([1.0, 3.0]), th, 0.0, 0.25)
        assert np.allclose(out, th + 0.25 * np.array([1.0, 3.0]))

    def test_rk4_fourth_order(self):
        dts = 0.5 ** np.arange(2, 7)
        errs = []
        for dt in dts:
            th = np.array([1.0])
            n = int(round(2.0 / dt))
            for k in range(n):
                th = rk4_combine(lambda x, t: -x, th, k * dt, dt)
            errs.append(abs(th[0] - math.exp(-2.0)))
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert abs(slope - 4) < 0.3

    @given(st.floats(1e-6, 10), st.floats(1e-4, 0.1))
    def test_step_is_clamped(self, peak, dtheta):
        cfg = EvolutionConfig(dtheta_max=dtheta)
        dt = choose_dt(np.array([peak, -0.5 * peak]), cfg)
        assert cfg.dt_min <= dt <= cfg.dt_max
        if cfg.dt_min < dtheta / peak < cfg.dt_max:
            assert dt * peak == pytest.approx(dtheta)

    def test_zero_rate_takes_max_step(self):
        assert choose_dt(np.zeros(3), EvolutionConfig()) == 0.1


class TestEvolve:
    def test_free_evolution_of_eigenstate(self):
        spec = ModelSpec(s=1, D=0.2)
        ans = ed_ansatz(spec)
        rec, final = evolve(ans, spec.operators, DriveProtocol(), EvolutionConfig(), 2.0)
        assert final.n_params == 0
        assert np.allclose(rec.mz, rec.mz[0], atol=1e-12)

    @pytest.fixture(scope="class")
    @staticmethod
    def driven():
        spec = ModelSpec(s=1, D=0.2)
        gs = prepare_ground_state(spec, "adapt-vqe")
        proto = DriveProtocol.single(PulseSpec(B0=0.5))
        rec1, mid = evolve(gs.ansatz, spec.operators, proto, EvolutionConfig(), 16.0, exact_initial=ground_state(spec)[1])
        rec2, end = evolve(mid, spec.operators, proto, EvolutionConfig(), 24.0, t_start=16.0)
        return spec, gs, rec1, mid, rec2, end

    def test_trace_invariants(self, driven):
        spec, gs, rec, mid, _, _ = driven
        t = np.asarray(rec.time)
        assert np.all(np.diff(t) > 0) and t[-1] == pytest.approx(16.0)
        assert np.all(np.diff(rec.cnots) >= 0)
        assert max(rec.l2) <= 1e-5 or rec.warnings
        assert rec.cnots[-1] == recount_cnots(mid) == mid.cnot_count()
        assert max(rec.infidelity) <= 1e-4
        assert abs(np.linalg.norm(mid.prepare()) - 1) < 1e-12
        summary = rec.summary()
        assert summary["n_steps"] == len(t) - 1 and summary["final_cnots"] == rec.cnots[-1]

    def test_energy_conserved_after_pulse(self, driven):
        spec, gs, _, mid, _, end = driven
        H0 = spec.operators.H0_sparse
        e_mid = np.vdot(mid.prepare(), H0 @ mid.prepare()).real
        e_end = np.vdot(end.prepare(), H0 @ end.prepare()).real
        assert abs(e_end - e_mid) <= 1e-3 * abs(gs.energy)

    def test_euler_path(self):
        spec = ModelSpec(s=1, D=0.2)
        ans = prepare_ground_state(spec, "adapt-vqe").ansatz
        proto = DriveProtocol.single(PulseSpec(B0=0.5))
        cfg = EvolutionConfig(integrator="euler", dtheta_max=1e-3)
        rec, _ = evolve(ans, spec.operators, proto, cfg, 4.0, exact_initial=ground_state(spec)[1])
        assert max(rec.infidelity) < 1e-3

    def test_wall_limit_truncates(self):
        spec = ModelSpec(s=1, D=0.2)
        ans = prepare_ground_state(spec, "adapt-vqe").ansatz
        proto = DriveProtocol.single(PulseSpec(B0=0.5))
        rec, _ = evolve(ans, spec.operators, proto, EvolutionConfig(wall_limit=1e-9), 50.0)
        assert rec.truncated and rec.summary()["truncated"]
        assert rec.time[-1] < 50.0 and "wall-clock" in rec.warnings[-1]
        with pytest.raises(ValueError):
            EvolutionConfig(wall_limit=0.0)
