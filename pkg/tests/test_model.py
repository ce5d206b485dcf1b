"""Chain Hamiltonian, drive pulses and exact diagonalization."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from highspin2dcs.encoding import code_map, physical_projector
from highspin2dcs.exact import (
    ExactPropagator,
    eigendecompose,
    fidelity,
    ground_state,
    matrix_element,
    model_eigen,
    propagate_exact,
)
from highspin2dcs.model import DriveProtocol, ModelSpec, PulseSpec
from highspin2dcs.pauli import CapacityError, DimensionError, PauliOperatorSum, to_dense

from .oracles import level_hamiltonian, level_to_qubit_index

S52_WORKLOAD = dict(s="5/2", D=0.2, K_a=0.0012, K_c=0.0006)


def _in_level_basis(spec):
    codes = [int(b, 2) for b in code_map(spec.encoding, spec.d).values()]
    idx = level_to_qubit_index(codes, spec.n_sites, spec.qubits_per_site)
    ops = spec.operators
    return to_dense(ops.H0)[np.ix_(idx, idx)], to_dense(ops.Hz)[np.ix_(idx, idx)]


class TestHamiltonian:
    @pytest.mark.parametrize("enc", ["gray", "std"])
    @pytest.mark.parametrize(
        "s,n,params",
        [
            ("1/2", 3, dict(D=0.3)),
            ("1", 2, dict(D=0.2)),
            ("3/2", 2, dict(D=-0.4, K_a=0.1, K_c=0.05)),
            ("2", 2, dict(D=0.2, K_c=0.3)),
            ("5/2", 2, dict(D=0.2, K_a=0.0012, K_c=0.0006)),
            ("1", 3, dict(J=0.7, D=0.1, K_a=0.2)),
        ],
    )
    def test_matches_level_basis_oracle(self, s, n, params, enc):
        spec = ModelSpec(n_sites=n, s=s, encoding=enc, **params)
        H, Hz = _in_level_basis(spec)
        H_ref, Hz_ref = level_hamiltonian(s, n, **params)
        assert np.allclose(H, H_ref, atol=1e-12)
        assert np.allclose(Hz, Hz_ref, atol=1e-12)

    def test_two_site_spin_one_term_counts(self):
        ops = ModelSpec(s=1, D=0.2).operators
        strings = set(ops.H0.strings()) | set(ops.Hz.strings())
        assert len(ops.H0) == 52
        assert len(strings) == 56
        full = ops.full(1.0)
        assert len(full) == 56
        assert full.trotter_cnots() == 184

    def test_hermitian_real_coefficients(self):
        ops = ModelSpec(**S52_WORKLOAD).operators
        assert all(isinstance(t.coefficient, complex) and t.coefficient.imag == 0 for t in ops.H0)
        assert ops.H0.is_hermitian()

    def test_zeeman_is_diagonal(self):
        ops = ModelSpec(s="3/2").operators
        assert ops.Hz.diagonal_part().allclose(ops.Hz)
        assert np.allclose(np.diag(to_dense(ops.Hz)).real, ops.Hz_diag)

    def test_spin_squared(self):
        spec = ModelSpec(s="5/2", encoding="std")
        # site 1 occupies the upper three qubits
        P = np.kron(physical_projector(spec.s, spec.encoding), np.ones(8))
        S2 = to_dense(spec.operators.spin_squared(1))
        assert np.allclose(S2, 8.75 * np.diag(P))

    def test_rejects_single_site(self):
        with pytest.raises(ValueError):
            ModelSpec(n_sites=1)


class TestPulses:
    def test_shape(self):
        p = PulseSpec(B0=2.0)
        t = np.array([5.0, 5.0 + math.pi / 2, 7.0])
        expected = 2.0 * np.sin(t - 5) * np.exp(-((t - 5) ** 2) / 4)
        assert np.allclose(p(t), expected)
        assert p(5.0) == 0

    def test_support_bounds_field(self):
        p = PulseSpec(B0=3.0)
        lo, hi = p.support(1e-12)
        t = np.concatenate([np.linspace(hi, hi + 20, 50), np.linspace(lo - 20, lo, 50)])
        assert np.all(np.abs(p(t)) <= 1e-12 * 3.0)

    @given(st.floats(0, 30))
    def test_pair_is_sum_of_shifted_pulses(self, tau):
        p1, p2 = PulseSpec(B0=0.5), PulseSpec(B0=0.5)
        proto = DriveProtocol.pair(p1, p2, tau)
        t = np.linspace(0, 60, 31)
        assert np.allclose(proto(t), p1(t) + p2(t - tau))
        assert proto.support_end() == pytest.approx(max(p1.support()[1], p2.support()[1] + tau))

    def test_empty_protocol_is_free(self):
        proto = DriveProtocol()
        assert proto.is_free and proto(3.0) == 0.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            PulseSpec(duration=0)
        with pytest.raises(ValueError):
            DriveProtocol(((PulseSpec(), math.inf),))


class TestExact:
    def test_spin_one_spectrum(self):
        eig = model_eigen(ModelSpec(s=1, D=0.2))
        assert eig.n_physical == 9
        assert eig.gap(1) == pytest.approx(1.00663, abs=1e-5)
        assert eig.omega_af == pytest.approx(eig.gap(1) / (2 * math.pi))

    def test_spin_five_halves_counts(self):
        eig = model_eigen(ModelSpec(**S52_WORKLOAD))
        assert eig.n_physical == 36
        assert np.count_nonzero(~eig.physical) == 64 - 36
        assert np.allclose(eig.energies[~eig.physical], 0)

    @pytest.mark.parametrize("s", ["1", "3/2", "5/2"])
    def test_block_solver_matches_full(self, s):
        spec = ModelSpec(s=s, D=0.2)
        full = np.linalg.eigvalsh(to_dense(spec.operators.H0))
        assert np.allclose(np.sort(model_eigen(spec).energies), full, atol=1e-10)

    def test_ground_energy_matches_oracle(self):
        H, _ = level_hamiltonian("1", 2, D=0.2)
        assert model_eigen(ModelSpec(s=1, D=0.2)).ground_energy == pytest.approx(np.linalg.eigvalsh(H)[0], abs=1e-12)

    @pytest.mark.parametrize("spec", [ModelSpec(n_sites=6, s="1/2", D=0.2), ModelSpec(n_sites=2, s="2", D=0.2)])
    def test_lanczos_ground_state(self, spec):
        e, psi = ground_state(spec, dense_limit=1)
        ref = model_eigen(spec)
        assert e == pytest.approx(ref.ground_energy, abs=1e-10)
        assert 1 - fidelity(psi, ref.ground_state) < 1e-10
        assert np.linalg.norm(psi) == pytest.approx(1)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            eigendecompose(PauliOperatorSum.from_terms(1, [(1j, "X0")]))
        with pytest.raises(ValueError):
            eigendecompose(np.array([[0, 1], [0, 0]]))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            eigendecompose(PauliOperatorSum.identity(20))

    def test_propagate_frozen_hamiltonian(self, rng):
        H = PauliOperatorSum.from_terms(2, [(0.3, "X0"), (0.7, "Z0 Z1"), (-0.2, "Y1")])
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        out = propagate_exact(psi, H, 0.8)
        from scipy.linalg import expm

        assert np.allclose(out, expm(-0.8j * to_dense(H)) @ psi)
        with pytest.raises(ValueError):
            propagate_exact(psi, H, -1.0)
        with pytest.raises(DimensionError):
            propagate_exact(psi[:2], H, 0.1)

    def test_fidelity_and_matrix_element(self):
        a = np.array([1, 0], complex)
        b = np.array([1, 1j]) / math.sqrt(2)
        assert fidelity(a, b) == pytest.approx(0.5)
        assert matrix_element(PauliOperatorSum.from_terms(1, [(1, "X0")]), a, np.array([0, 1])) == 1
        with pytest.raises(DimensionError):
            fidelity(a, np.ones(4))

    def test_free_evolution_is_stationary(self):
        spec = ModelSpec(s=1, D=0.2)
        prop = ExactPropagator(spec.operators, DriveProtocol())
        mz = prop.magnetization(ground_state(spec)[1], np.linspace(0, 20, 11))
        assert np.allclose(mz, mz[0], atol=1e-12)

    def test_driven_matches_fine_expm(self):
        from scipy.integrate import solve_ivp

        spec = ModelSpec(s=1, D=0.2)
        proto = DriveProtocol.single(PulseSpec(B0=1.0))
        H0 = to_dense(spec.operators.H0)
        hz = spec.operators.Hz_diag
        psi0 = ground_state(spec)[1].astype(complex)
        sol = solve_ivp(
            lambda t, y: -1j * (H0 @ y - proto(t) * hz * y), (0, 12), psi0, rtol=1e-11, atol=1e-12, t_eval=[12.0]
        )
        out = ExactPropagator(spec.operators, proto, dt=0.002).run(psi0, np.array([0.0, 12.0]))[-1]
        assert 1 - fidelity(out, sol.y[:, -1]) < 1e-8

    def test_dipoles_hermitian(self):
        spec = ModelSpec(s=1, D=0.2)
        m = model_eigen(spec).dipoles(spec.operators.Hz)
        assert m.shape == (9, 9) and np.allclose(m, m.conj().T)
