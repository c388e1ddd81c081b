import numpy as np
import pytest

from phaselab.linalg import (
    RegisterLayout,
    StateVector,
    UnitaryMatrix,
    apply_to_registers,
    basis_state,
    complete_orthonormal_basis,
    haar_random_unitary,
    inner_product,
    projection_norm_sq,
    zero_state,
)

QUBIT = RegisterLayout((("a", 2),))
TWO_QUBITS = RegisterLayout((("a", 2), ("b", 2)))


def ket(layout, amps):
    return StateVector(layout, np.asarray(amps, dtype=complex))


class TestLayout:
    def test_total_dim_is_product(self):
        layout = RegisterLayout((("O", 4), ("B", 2), ("W", 3)))
        assert layout.total_dim == 24
        assert layout.dims == (4, 2, 3)
        assert layout.axis("W") == 2

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            RegisterLayout((("a", 2), ("a", 3)))

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            RegisterLayout((("a", 0),))

    def test_unknown_label(self):
        with pytest.raises(KeyError):
            QUBIT.axis("nope")


class TestStateVector:
    def test_norm_enforced(self):
        with pytest.raises(ValueError):
            ket(QUBIT, [1.0, 1.0])

    def test_unnormalized_flag(self):
        s = StateVector(QUBIT, np.array([1.0, 1.0]), normalized=False)
        assert s.norm == pytest.approx(np.sqrt(2))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            ket(QUBIT, [np.nan, 0.0])

    def test_amps_are_read_only(self):
        s = zero_state(QUBIT)
        with pytest.raises(ValueError):
            s.amps[0] = 0.5


class TestInnerProduct:
    def test_identity_case(self):
        e0 = basis_state(QUBIT, [0])
        assert inner_product(e0, e0) == pytest.approx(1.0)

    def test_orthogonality(self):
        e0, e1 = basis_state(QUBIT, [0]), basis_state(QUBIT, [1])
        assert inner_product(e0, e1) == pytest.approx(0.0)

    def test_hadamard_basis_orthogonality(self):
        plus = ket(QUBIT, np.array([1, 1]) / np.sqrt(2))
        minus = ket(QUBIT, np.array([1, -1]) / np.sqrt(2))
        assert inner_product(plus, minus) == pytest.approx(0.0)

    def test_conjugation_on_left(self):
        a = ket(QUBIT, np.array([1j, 0]))
        b = ket(QUBIT, np.array([1, 0]))
        assert inner_product(a, b) == pytest.approx(-1j)

    def test_layout_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(zero_state(QUBIT), zero_state(TWO_QUBITS))


X = UnitaryMatrix(np.array([[0, 1], [1, 0]], dtype=complex))


class TestApply:
    def test_swap_on_first_register(self):
        out = apply_to_registers(zero_state(TWO_QUBITS), X, ["a"])
        np.testing.assert_allclose(out.amps, basis_state(TWO_QUBITS, [1, 0]).amps)

    def test_identity_unchanged(self):
        eye = UnitaryMatrix(np.eye(2))
        s = ket(TWO_QUBITS, np.array([0.5, 0.5, 0.5, 0.5]))
        out = apply_to_registers(s, eye, ["b"])
        np.testing.assert_allclose(out.amps, s.amps)

    def test_unitary_then_adjoint_roundtrip(self):
        u = haar_random_unitary(4, seed=3)
        s = ket(TWO_QUBITS, np.array([0.5, 0.5j, -0.5, 0.5j]))
        back = apply_to_registers(apply_to_registers(s, u, ["a", "b"]), u.adjoint, ["a", "b"])
        assert np.max(np.abs(back.amps - s.amps)) < 1e-12

    def test_target_order_matters(self):
        # CX with control listed first vs swapped target order
        cx = UnitaryMatrix(
            np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
        )
        s = basis_state(TWO_QUBITS, [1, 0])
        flipped = apply_to_registers(s, cx, ["a", "b"])
        np.testing.assert_allclose(flipped.amps, basis_state(TWO_QUBITS, [1, 1]).amps)
        untouched = apply_to_registers(basis_state(TWO_QUBITS, [0, 1]), cx, ["b", "a"])
        np.testing.assert_allclose(untouched.amps, basis_state(TWO_QUBITS, [1, 1]).amps)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_to_registers(zero_state(TWO_QUBITS), X, ["a", "b"])

    def test_norm_preserved_for_random_unitaries(self):
        layout = RegisterLayout((("x", 3), ("y", 4)))
        rng = np.random.default_rng(17)
        for trial in range(25):
            amps = rng.standard_normal(12) + 1j * rng.standard_normal(12)
            s = ket(layout, amps / np.linalg.norm(amps))
            u = haar_random_unitary(4, rng)
            out = apply_to_registers(s, u, ["y"])
            assert abs(out.norm - 1.0) < 1e-9


class TestProjection:
    def test_basis_state_weight(self):
        assert projection_norm_sq(zero_state(QUBIT), "a", 0) == pytest.approx(1.0)

    def test_uniform_case(self):
        plus = ket(QUBIT, np.array([1, 1]) / np.sqrt(2))
        assert projection_norm_sq(plus, "a", 1) == pytest.approx(0.5)

    def test_completeness_sums_to_one(self):
        layout = RegisterLayout((("x", 3), ("y", 5)))
        rng = np.random.default_rng(23)
        amps = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        s = ket(layout, amps / np.linalg.norm(amps))
        for reg, dim in (("x", 3), ("y", 5)):
            total = sum(projection_norm_sq(s, reg, v) for v in range(dim))
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_out_of_range_value(self):
        with pytest.raises(IndexError):
            projection_norm_sq(zero_state(QUBIT), "a", 2)


class TestBasisCompletion:
    def test_e0_completes_to_identity(self):
        basis = complete_orthonormal_basis([1, 0], 2)
        np.testing.assert_allclose(basis, np.eye(2), atol=1e-12)

    def test_hadamard_direction_gram_matrix(self):
        u = np.array([1, 1]) / np.sqrt(2)
        basis = complete_orthonormal_basis(u, 2)
        gram = basis @ basis.conj().T
        np.testing.assert_allclose(gram, np.eye(2), atol=1e-10)
        np.testing.assert_allclose(basis[0], u)

    def test_first_vector_preserved_and_orthonormal(self):
        rng = np.random.default_rng(5)
        for dim in (2, 3, 7, 16):
            u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            u /= np.linalg.norm(u)
            basis = complete_orthonormal_basis(u, dim)
            assert basis.shape == (dim, dim)
            np.testing.assert_allclose(basis[0], u, atol=1e-12)
            gram = basis @ basis.conj().T
            assert np.max(np.abs(gram - np.eye(dim))) < 1e-10

    def test_deterministic(self):
        u = np.array([1, 1j, 1]) / np.sqrt(3)
        b1 = complete_orthonormal_basis(u, 3)
        b2 = complete_orthonormal_basis(u, 3)
        np.testing.assert_array_equal(b1, b2)

    def test_non_unit_input_rejected(self):
        with pytest.raises(ValueError):
            complete_orthonormal_basis([1, 1], 2)
        with pytest.raises(ValueError):
            complete_orthonormal_basis([0, 0], 2)


class TestHaar:
    def test_dim1_is_unit_modulus(self):
        u = haar_random_unitary(1, seed=0)
        assert abs(abs(u.matrix[0, 0]) - 1.0) < 1e-12

    def test_same_seed_same_matrix(self):
        a = haar_random_unitary(6, seed=42)
        b = haar_random_unitary(6, seed=42)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_different_seeds_differ(self):
        a = haar_random_unitary(6, seed=42)
        b = haar_random_unitary(6, seed=43)
        assert np.max(np.abs(a.matrix - b.matrix)) > 1e-3

    def test_unitarity_dim8(self):
        u = haar_random_unitary(8, seed=7).matrix
        np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-9)

    def test_zero_dim_rejected(self):
        with pytest.raises(ValueError):
            haar_random_unitary(0, seed=1)


class TestUnitaryMatrix:
    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            UnitaryMatrix(np.array([[1, 0], [0, 2]], dtype=complex))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            UnitaryMatrix(np.ones((2, 3)))

    def test_composition(self):
        u = X @ X
        np.testing.assert_allclose(u.matrix, np.eye(2))


def test_cauchy_schwarz_vector_bound():
    # ||sum a_i psi_i||^2 <= sum |a_i|^2 * sum ||psi_i||^2, random instances
    rng = np.random.default_rng(1234)
    for _ in range(1000):
        k = int(rng.integers(1, 6))
        dim = int(rng.integers(1, 8))
        alphas = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        vecs = rng.standard_normal((k, dim)) + 1j * rng.standard_normal((k, dim))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        lhs = np.linalg.norm(alphas @ vecs) ** 2
        rhs = np.sum(np.abs(alphas) ** 2) * np.sum(np.linalg.norm(vecs, axis=1) ** 2)
        assert lhs <= rhs + 1e-9
