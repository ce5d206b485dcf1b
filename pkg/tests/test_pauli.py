"""Pauli string algebra against Kronecker-product matrices."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from highspin2dcs.pauli import (
    CapacityError,
    DimensionError,
    PauliOperatorSum,
    PauliString,
    PauliTerm,
    cnot_cost,
    commutator,
    kron_dense,
    multiply,
    to_dense,
)

from .conftest import operator_sums, pauli_strings

N = 3


def dense(op):
    m = np.zeros((1 << op.n_qubits,) * 2, dtype=complex)
    for t in op.terms:
        m += t.coefficient * kron_dense(t.string)
    return m


class TestPauliString:
    def test_qubit_zero_is_least_significant(self):
        p = PauliString.parse("X0", 2)
        assert p.labels == "XI"
        psi = np.zeros(4)
        psi[0] = 1
        assert np.flatnonzero(p.apply(psi)).tolist() == [1]

    def test_parse_and_text_round_trip(self):
        p = PauliString.parse("Y2 Z0", 3)
        assert p.labels == "ZIY"
        assert p.text() == "Y2 Z0"
        assert PauliString.parse(p.text(), 3) == p
        assert PauliString.parse("I", 3) == PauliString.identity(3)

    @pytest.mark.parametrize("bad", ["A", "", "XQ"])
    def test_invalid_labels(self, bad):
        with pytest.raises(ValueError):
            PauliString(bad)

    def test_parse_rejects_out_of_range(self):
        with pytest.raises(DimensionError):
            PauliString.parse("X3", 3)
        with pytest.raises(ValueError):
            PauliString.parse("W1", 3)

    def test_weight_support_masks(self):
        p = PauliString("XIYZ")
        assert p.weight == 3
        assert p.support == (0, 2, 3)
        assert p.x_mask == 0b0101
        assert p.z_mask == 0b1100

    @given(pauli_strings(N))
    def test_action_matches_kron(self, p):
        assert np.allclose(p.matrix(), kron_dense(p))

    @given(pauli_strings(N), pauli_strings(N))
    def test_multiply_matches_matrices(self, a, b):
        phase, c = multiply(a, b)
        assert np.allclose(kron_dense(a) @ kron_dense(b), phase * kron_dense(c))

    @given(pauli_strings(N), pauli_strings(N))
    def test_commutes_with_matches_matrices(self, a, b):
        A, B = kron_dense(a), kron_dense(b)
        assert a.commutes_with(b) == np.allclose(A @ B, B @ A)

    @given(pauli_strings(N))
    def test_tangent_action_is_minus_i_p(self, p):
        perm, q = p.tangent_action
        psi = np.arange(1, 9) + 0.5j
        assert np.allclose(q * psi[perm], -1j * (kron_dense(p) @ psi))
        assert np.isrealobj(q) == bool(p.n_y % 2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            multiply(PauliString("XX"), PauliString("X"))

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            to_dense(PauliOperatorSum.identity(4), limit=3)


class TestCnotCost:
    @pytest.mark.parametrize("labels,cost", [("III", 0), ("IZI", 0), ("XZI", 2), ("XYZ", 4), ("YYYY", 6)])
    def test_two_per_extra_qubit(self, labels, cost):
        assert cnot_cost(PauliString(labels)) == cost

    def test_trotter_cnots_sums_terms(self):
        op = PauliOperatorSum.from_terms(3, [(1, "X0 X1"), (1, "Z2"), (0.5, "Y0 Y1 Y2")])
        assert op.trotter_cnots() == 2 + 0 + 4


class TestOperatorSum:
    def test_canonical_merge_and_prune(self):
        op = PauliOperatorSum.from_terms(2, [(1, "X0"), (1, "X0"), (1e-14, "Y1"), (-2.5, "X0"), (3, "Z1")])
        assert len(op) == 2
        assert op.coefficient("X0") == pytest.approx(-0.5)
        assert op.coefficient("Y1") == 0
        assert op.coefficient("Z1") == pytest.approx(3)

    def test_pruned_terms_vanish(self):
        op = PauliOperatorSum.from_terms(2, [(1, "X0"), (-1, "X0")])
        assert op.is_zero()

    def test_terms_sorted(self):
        op = PauliOperatorSum.from_terms(2, [(1, "Z1"), (1, "X0"), (1, "Y0 X1"), (1, "I")])
        keys = [t.string.sort_key() for t in op]
        assert keys == sorted(keys)

    def test_text_parse_round_trip(self):
        op = PauliOperatorSum.from_terms(3, [(0.5, "X0 Y2"), (-1.25j, "Z1"), (2, "I")])
        again = PauliOperatorSum.parse(op.text(), 3)
        assert again.allclose(op)

    def test_non_finite_coefficient(self):
        with pytest.raises(ValueError):
            PauliTerm(np.nan, PauliString("X"))

    @given(operator_sums(N), operator_sums(N))
    def test_product_matches_dense(self, a, b):
        assert np.allclose(dense(a @ b), dense(a) @ dense(b), atol=1e-9)

    @given(operator_sums(N), operator_sums(N))
    def test_sum_matches_dense(self, a, b):
        assert np.allclose(dense(a + b), dense(a) + dense(b), atol=1e-9)
        assert np.allclose(dense(a - b), dense(a) - dense(b), atol=1e-9)

    @given(operator_sums(N), operator_sums(N))
    def test_commutator_matches_dense(self, a, b):
        A, B = dense(a), dense(b)
        assert np.allclose(dense(commutator(a, b)), A @ B - B @ A, atol=1e-9)

    @given(operator_sums(N))
    def test_adjoint_and_dense_paths(self, a):
        assert np.allclose(dense(a.adjoint()), dense(a).conj().T)
        assert np.allclose(to_dense(a), dense(a))
        assert np.allclose(a.to_sparse().toarray(), dense(a))

    @given(operator_sums(N), st.integers(0, 7))
    def test_apply_matches_dense(self, a, k):
        psi = np.exp(1j * np.arange(8) * (k + 1))
        assert np.allclose(a.apply(psi), dense(a) @ psi)

    def test_embed(self):
        op = PauliOperatorSum.from_terms(2, [(1, "X0 Z1")])
        big = op.embed(5, 2)
        assert big.strings() == [PauliString.parse("X2 Z3", 5)]
        with pytest.raises(DimensionError):
            op.embed(3, 2)

    def test_hermitian_check(self):
        assert PauliOperatorSum.from_terms(1, [(1, "X0")]).is_hermitian()
        assert not PauliOperatorSum.from_terms(1, [(1j, "X0")]).is_hermitian()

    def test_weight_histogram(self):
        op = PauliOperatorSum.from_terms(3, [(1, "X0"), (1, "Z1"), (1, "X0 Y1 Z2")])
        assert op.weight_histogram() == {1: 2, 3: 1}
        assert op.max_weight() == 3
