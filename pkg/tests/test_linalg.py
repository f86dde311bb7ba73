import numpy as np
import pytest

from conftest import haar_unitary, random_state
from quanprism.channels import apply
from quanprism.fixtures import rotated_phase_mix
from quanprism.linalg import (
    HADAMARD,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    hs_inner,
    is_diagonal,
    is_unitary,
    matrix_unit,
    pauli_decompose,
    pauli_reconstruct,
    pauli_singular_values,
    psd_sqrt,
    singular_values,
    trace_norm,
)
from quanprism.states import PureState, density_of

I2 = np.eye(2, dtype=complex)


class TestHSInner:
    def test_identity(self):
        assert hs_inner(I2, I2) == pytest.approx(2 + 0j)

    def test_pauli_orthogonality(self):
        assert hs_inner(PAULI_X, PAULI_Z) == pytest.approx(0)
        assert hs_inner(PAULI_X, PAULI_Y) == pytest.approx(0)

    def test_channel_outputs_orthogonal(self):
        # the bundled rotated mix keeps the basis pair distinguishable
        ch = rotated_phase_mix()
        out0 = apply(ch, density_of(PureState(np.array([1, 0], complex))))
        out1 = apply(ch, density_of(PureState(np.array([0, 1], complex))))
        assert abs(hs_inner(out0.matrix, out1.matrix)) < 1e-12

    def test_conjugate_linear_in_second_argument(self):
        rng = np.random.default_rng(5)
        s = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        t = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        z = 0.3 - 1.7j
        assert hs_inner(s, z * t) == pytest.approx(np.conj(z) * hs_inner(s, t))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            hs_inner(I2, np.eye(3))


class TestSingularValues:
    def test_identity(self):
        np.testing.assert_allclose(singular_values(I2), [1, 1])

    def test_diagonal(self):
        np.testing.assert_allclose(singular_values(np.diag([2.0, 0.0])), [2, 0])

    def test_cross_oracle_against_pauli_form(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            s_svd = singular_values(m)
            s_pauli = pauli_singular_values(*pauli_decompose(m))
            np.testing.assert_allclose(s_svd, s_pauli, atol=1e-10)


class TestTraceNorm:
    def test_identity(self):
        assert trace_norm(I2) == pytest.approx(2)

    def test_rank_one(self):
        rng = np.random.default_rng(3)
        u = random_state(4, rng).amplitudes
        v = random_state(4, rng).amplitudes
        assert trace_norm(np.outer(u, np.conj(v))) == pytest.approx(1, abs=1e-12)

    def test_balanced_cross_matrix(self):
        # t = 1/2 and both off-diagonal couplings at 1/2: nuclear norm exactly 1
        a = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert trace_norm(a) == pytest.approx(1, abs=1e-12)

    def test_equals_sum_of_singular_values_and_unitary_invariance(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            d = int(rng.integers(2, 6))
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            assert trace_norm(m) == pytest.approx(np.sum(singular_values(m)), abs=1e-12)
            u, v = haar_unitary(d, rng), haar_unitary(d, rng)
            assert trace_norm(u @ m @ v) == pytest.approx(trace_norm(m), abs=1e-9)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(I2), I2)

    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_projector_is_fixed(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        np.testing.assert_allclose(psd_sqrt(plus), plus, atol=1e-12)

    def test_square_roundtrip(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            d = int(rng.integers(2, 6))
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            h = a @ np.conj(a).T
            s = psd_sqrt(h)
            np.testing.assert_allclose(s @ s, h, atol=1e-9)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            psd_sqrt(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="positive semidefinite"):
            psd_sqrt(np.diag([1.0, -0.5]))

    def test_clamps_tiny_negative(self):
        s = psd_sqrt(np.diag([1.0, -1e-12]))
        np.testing.assert_allclose(s, np.diag([1.0, 0.0]), atol=1e-6)


class TestPauliDecompose:
    def test_identity(self):
        assert pauli_decompose(I2) == (1, 0, 0, 0)

    def test_sigma_y(self):
        assert pauli_decompose(PAULI_Y) == (0, 0, 1, 0)

    def test_cross_matrix_coefficients(self):
        t, a, b = 0.3, 0.2 + 0.1j, -0.4 + 0.25j
        m = np.array([[t, b], [a, 1 - t]])
        z0, z1, z2, z3 = pauli_decompose(m)
        assert z0 == pytest.approx(0.5)
        assert z1 == pytest.approx((a + b) / 2)
        assert z2 == pytest.approx((a - b) / 2j)
        assert z3 == pytest.approx(t - 0.5)

    def test_reconstruct_exact(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            np.testing.assert_allclose(pauli_reconstruct(*pauli_decompose(m)), m, atol=1e-12)

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            pauli_decompose(np.eye(3))


class TestPauliSingularValues:
    def test_identity_coefficients(self):
        assert pauli_singular_values(1, 0, 0, 0) == pytest.approx((1, 1))

    def test_rank_one_diagonal(self):
        assert pauli_singular_values(1, 0, 0, 1) == pytest.approx((2, 0))

    def test_matches_svd_on_random_matrices(self):
        rng = np.random.default_rng(37)
        for _ in range(1000):
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            expected = singular_values(m)
            got = pauli_singular_values(*pauli_decompose(m))
            np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_degenerate_singular_values_at_radicand_boundary(self):
        # |z0^2 - z1^2| = |z0|^2 + |z1|^2 here: the inner radicand is 0 up to
        # rounding (clamped), and both singular values coincide at sqrt(s)
        s1, s2 = pauli_singular_values(1, 1.5j, 0, 0)
        assert s1 == pytest.approx(np.sqrt(3.25), abs=1e-9)
        assert s2 == pytest.approx(np.sqrt(3.25), abs=1e-9)
        m = pauli_reconstruct(1, 1.5j, 0, 0)
        np.testing.assert_allclose(singular_values(m), [s1, s2], atol=1e-10)


class TestPredicates:
    def test_diagonal_phase_matrix(self):
        m = np.diag([1.0, np.exp(0.7j)])
        assert is_unitary(m)
        assert is_diagonal(m)

    def test_rotated_mix_products_are_diagonal(self):
        k1, k2 = rotated_phase_mix().unitaries
        prod = np.conj(k2).T @ k1
        assert is_diagonal(prod)
        np.testing.assert_allclose(prod, np.diag([1, -1j]), atol=1e-12)
        np.testing.assert_allclose(np.conj(k1).T @ k2, np.diag([1, 1j]), atol=1e-12)

    def test_hadamard(self):
        assert is_unitary(HADAMARD)
        assert not is_diagonal(HADAMARD)

    def test_non_square(self):
        assert not is_unitary(np.ones((2, 3)))
        assert not is_diagonal(np.ones((2, 3)))


class TestMatrixUnit:
    def test_unit_entries(self):
        np.testing.assert_array_equal(matrix_unit(2, 1, 1), [[1, 0], [0, 0]])
        np.testing.assert_array_equal(matrix_unit(2, 1, 2), [[0, 1], [0, 0]])
        e23 = matrix_unit(3, 2, 3)
        assert e23[1, 2] == 1 and np.count_nonzero(e23) == 1

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            matrix_unit(2, 0, 1)
        with pytest.raises(ValueError):
            matrix_unit(2, 1, 3)
