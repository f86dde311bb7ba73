import numpy as np
import pytest

from conftest import haar_unitary, random_density, random_mixed_unitary, random_state
from quanprism.channels import (
    KrausChannel,
    MixedUnitaryChannel,
    apply,
    apply_matrix,
    as_kraus,
    channels_equal,
    choi,
    choi_distance,
    choi_rank,
    complementary_apply,
    controlled_phase_damping,
    identity_channel,
    kraus_equivalent,
    local_operation,
    n_consecutive,
    tensor,
    tensor_factorization_check,
    unitary_channel,
)
from quanprism.dephasing import from_phase_damping, make_gpd, phase_damping, to_mixed_unitary
from quanprism.fixtures import rotated_phase_mix, uniform_phase_triple
from quanprism.linalg import CNOT, PAULI_X, dagger, trace_norm
from quanprism.states import PureState, density_of, fidelity, fidelity_pure

I2 = np.eye(2, dtype=complex)
KET0 = PureState(np.array([1, 0], dtype=complex))
KET1 = PureState(np.array([0, 1], dtype=complex))


class TestChannelTypes:
    def test_kraus_completeness_enforced(self):
        with pytest.raises(ValueError, match="completeness"):
            KrausChannel((0.5 * I2,))

    def test_mixed_unitary_validation(self):
        with pytest.raises(ValueError, match="positive"):
            MixedUnitaryChannel(np.array([1.0, 0.0]), (I2, I2))
        with pytest.raises(ValueError, match="sum"):
            MixedUnitaryChannel(np.array([0.6, 0.6]), (I2, I2))
        with pytest.raises(ValueError, match="unitary"):
            MixedUnitaryChannel(np.array([0.5, 0.5]), (I2, 2 * I2))


class TestAsKraus:
    def test_single_branch(self):
        ch = MixedUnitaryChannel(np.array([1.0]), (I2,))
        np.testing.assert_array_equal(as_kraus(ch).kraus_ops[0], I2)

    def test_rotated_mix_scaling(self):
        ch = rotated_phase_mix()
        ops = as_kraus(ch).kraus_ops
        np.testing.assert_allclose(ops[0], np.sqrt(1 / 3) * ch.unitaries[0], atol=1e-15)
        np.testing.assert_allclose(ops[1], np.sqrt(2 / 3) * ch.unitaries[1], atol=1e-15)

    def test_phase_mixture_form(self):
        # damping parameter 0.36 maps to weights (0.9, 0.1) with a half-turn phase
        g = from_phase_damping(0.36)
        ops = as_kraus(to_mixed_unitary(g)).kraus_ops
        np.testing.assert_allclose(ops[0], np.sqrt(0.9) * I2, atol=1e-12)
        np.testing.assert_allclose(ops[1], np.sqrt(0.1) * np.diag([1, -1]), atol=1e-12)


class TestApply:
    def test_identity(self):
        rng = np.random.default_rng(0)
        rho = random_density(3, rng)
        np.testing.assert_allclose(apply(identity_channel(3), rho).matrix, rho.matrix)

    def test_rotated_mix_basis_outputs(self):
        ch = rotated_phase_mix()
        out0 = apply(ch, density_of(KET0)).matrix
        out1 = apply(ch, density_of(KET1)).matrix
        np.testing.assert_allclose(out0, [[0.5, -0.5j], [0.5j, 0.5]], atol=1e-12)
        np.testing.assert_allclose(out1, [[0.5, 0.5j], [-0.5j, 0.5]], atol=1e-12)

    def test_trace_preserved_on_random_inputs(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            d = int(rng.integers(2, 5))
            ch = random_mixed_unitary(d, rng)
            out = apply(ch, random_density(d, rng))
            assert np.trace(out.matrix) == pytest.approx(1, abs=1e-9)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            apply(identity_channel(2), random_density(3, rng))


class TestChoi:
    def test_identity_channel(self):
        omega = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        np.testing.assert_allclose(choi(identity_channel(2)), 2 * np.outer(omega, omega.conj()))

    def test_complete_dephasing_support(self):
        g = make_gpd([0.5, 0.5], [0, np.pi])
        c = choi(to_mixed_unitary(g))
        np.testing.assert_allclose(c, np.diag([1, 0, 0, 1]), atol=1e-15)

    def test_isometry_recombination_fixes_choi(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = int(rng.integers(2, 4))
            ch = as_kraus(random_mixed_unitary(d, rng))
            r = len(ch.kraus_ops)
            m = r + int(rng.integers(0, 3))
            iso = haar_unitary(m, rng)[:, :r]
            new_ops = tuple(
                sum(iso[i, j] * ch.kraus_ops[j] for j in range(r)) for i in range(m)
            )
            np.testing.assert_allclose(
                choi(KrausChannel(new_ops)), choi(ch), atol=1e-12
            )

    def test_trace_and_rank(self):
        ch = rotated_phase_mix()
        assert np.trace(choi(ch)) == pytest.approx(2, abs=1e-12)
        assert choi_rank(ch) == 2
        assert choi_rank(identity_channel(4)) == 1


class TestChannelsEqual:
    def test_self(self):
        ch = rotated_phase_mix()
        assert channels_equal(ch, ch)

    def test_phase_damping_vs_phase_mixture(self):
        for lam in (0.0, 0.36, 0.75, 1.0):
            pd = phase_damping(lam)
            g = to_mixed_unitary(from_phase_damping(lam))
            assert channels_equal(pd, g, tol=1e-12)

    def test_distinct_phases_differ(self):
        g1 = to_mixed_unitary(make_gpd([0.7, 0.3], [0, np.pi / 2]))
        g2 = to_mixed_unitary(make_gpd([0.7, 0.3], [0, np.pi]))
        assert not channels_equal(g1, g2)


class TestComplementaryApply:
    def test_vanishes_on_cross_term_for_diagonal_products(self):
        ch = rotated_phase_mix()
        x = np.outer([0, 1], [1, 0]).astype(complex)  # |1><0|
        np.testing.assert_allclose(complementary_apply(ch, x), 0, atol=1e-12)

    def test_single_branch(self):
        ch = MixedUnitaryChannel(np.array([1.0]), (I2,))
        rho = random_density(2, np.random.default_rng(4))
        np.testing.assert_allclose(complementary_apply(ch, rho.matrix), [[1.0]], atol=1e-12)

    def test_trace_norm_gives_output_fidelity(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            d = int(rng.integers(2, 4))
            ch = random_mixed_unitary(d, rng)
            phi1, phi2 = random_state(d, rng), random_state(d, rng)
            x = np.outer(phi2.amplitudes, np.conj(phi1.amplitudes))
            kr = as_kraus(ch)
            f = fidelity(apply(kr, density_of(phi1)), apply(kr, density_of(phi2)))
            assert trace_norm(complementary_apply(ch, x)) == pytest.approx(f, abs=1e-9)


class TestKrausEquivalent:
    def test_self_gives_identity(self):
        ops = as_kraus(rotated_phase_mix()).kraus_ops
        u = kraus_equivalent(ops, ops)
        np.testing.assert_allclose(u, np.eye(2), atol=1e-8)

    def test_phase_damping_isometry_closed_form(self):
        lam = 0.36
        a_ops = phase_damping(lam).kraus_ops
        b_ops = as_kraus(to_mixed_unitary(from_phase_damping(lam))).kraus_ops
        u = kraus_equivalent(a_ops, b_ops)
        assert u is not None
        p1 = (1 + np.sqrt(1 - lam)) / 2
        expected = np.array(
            [
                [np.sqrt(p1), np.sqrt(p1 / lam) * (1 - np.sqrt(1 - lam))],
                [np.sqrt(1 - p1), np.sqrt((1 - p1) / lam) * (-1 - np.sqrt(1 - lam))],
            ]
        )
        np.testing.assert_allclose(u, expected, atol=1e-10)
        np.testing.assert_allclose(dagger(u) @ u, np.eye(2), atol=1e-8)

    def test_different_channels_give_none(self):
        from quanprism.dephasing import amplitude_damping

        a_ops = amplitude_damping(0.5).kraus_ops
        b_ops = as_kraus(to_mixed_unitary(from_phase_damping(0.5))).kraus_ops
        assert kraus_equivalent(a_ops, b_ops) is None

    def test_returns_isometry_iff_channels_equal(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            d = int(rng.integers(2, 4))
            ch = as_kraus(random_mixed_unitary(d, rng))
            r = len(ch.kraus_ops)
            m = r + int(rng.integers(0, 2))
            iso = haar_unitary(m, rng)[:, :r]
            other = tuple(sum(iso[i, j] * ch.kraus_ops[j] for j in range(r)) for i in range(m))
            u = kraus_equivalent(other, ch.kraus_ops)
            assert u is not None
            np.testing.assert_allclose(dagger(u) @ u, np.eye(r), atol=1e-8)
            for i, a in enumerate(other):
                rec = sum(u[i, j] * ch.kraus_ops[j] for j in range(r))
                np.testing.assert_allclose(rec, a, atol=1e-8)
            different = as_kraus(random_mixed_unitary(d, rng))
            assert channels_equal(ch, different) == (
                kraus_equivalent(ch.kraus_ops, different.kraus_ops) is not None
            )

    def test_linearly_dependent_b_list(self):
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        b_ops = (h / np.sqrt(2), h / np.sqrt(2))
        u = kraus_equivalent((h,), b_ops)
        assert u is not None
        np.testing.assert_allclose(dagger(u) @ u, np.eye(2), atol=1e-8)
        np.testing.assert_allclose(u[0, 0] * b_ops[0] + u[0, 1] * b_ops[1], h, atol=1e-8)


class TestTensorAndConsecutive:
    def test_identity_tensor(self):
        t = tensor(identity_channel(2), identity_channel(3))
        assert channels_equal(t, identity_channel(6), tol=1e-12)

    def test_product_state_application(self):
        rng = np.random.default_rng(7)
        c1, c2 = random_mixed_unitary(2, rng), random_mixed_unitary(2, rng)
        ra, rb = random_density(2, rng), random_density(2, rng)
        joint = apply(tensor(c1, c2), density_of_product(ra, rb))
        expected = np.kron(apply(as_kraus(c1), ra).matrix, apply(as_kraus(c2), rb).matrix)
        np.testing.assert_allclose(joint.matrix, expected, atol=1e-12)

    def test_two_consecutive_equals_tensor_square(self):
        g = to_mixed_unitary(from_phase_damping(0.4))
        doubled = n_consecutive(g, 2)
        assert doubled.rank == 4
        np.testing.assert_allclose(
            np.sort(doubled.probs), np.sort(np.outer(g.probs, g.probs).reshape(-1)), atol=1e-15
        )
        assert channels_equal(doubled, tensor(g, g), tol=1e-12)

    def test_single_use_unchanged(self):
        g = to_mixed_unitary(from_phase_damping(0.4))
        assert channels_equal(n_consecutive(g, 1), g, tol=1e-15)

    def test_size_budget(self):
        g = to_mixed_unitary(from_phase_damping(0.4))
        with pytest.raises(ValueError, match="budget"):
            n_consecutive(g, 7)


def density_of_product(ra, rb):
    from quanprism.states import DensityOperator

    return DensityOperator(np.kron(ra.matrix, rb.matrix))


class TestControlledPhaseDamping:
    def test_zero_damping_is_controlled_not(self):
        assert channels_equal(controlled_phase_damping(0.0), unitary_channel(CNOT), tol=1e-12)

    def test_standard_basis_stays_distinguishable(self):
        ch = controlled_phase_damping(0.3)
        outs = []
        for k in range(4):
            e = np.zeros(4, dtype=complex)
            e[k] = 1
            outs.append(apply(ch, density_of(PureState(e))))
        for i in range(4):
            for j in range(i + 1, 4):
                assert fidelity(outs[i], outs[j]) <= 1e-8

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            controlled_phase_damping(1.5)


class TestTensorFactorization:
    def test_true_product_recovers_factors(self):
        t = tensor(phase_damping(0.3), phase_damping(0.7))
        ok, factors = tensor_factorization_check(t, (2, 2))
        assert ok
        assert choi_distance(tensor(factors[0], factors[1]), t) <= 1e-6

    def test_controlled_damping_is_not_a_product(self):
        for lam in (0.1, 0.5, 0.9):
            ok, factors = tensor_factorization_check(controlled_phase_damping(lam), (2, 2))
            assert not ok and factors is None

    def test_identity_two_qubit(self):
        ok, factors = tensor_factorization_check(identity_channel(4), (2, 2))
        assert ok
        assert channels_equal(tensor(factors[0], factors[1]), identity_channel(4), tol=1e-6)

    def test_dimension_must_factor(self):
        with pytest.raises(ValueError):
            tensor_factorization_check(identity_channel(6), (4, 2))


class TestLocalOperation:
    def test_full_subset_is_identity_operation(self):
        ch = uniform_phase_triple()
        sub = local_operation(ch, range(3))
        assert channels_equal(sub, ch, tol=1e-12)

    def test_single_branch_is_unitary_channel(self):
        ch = uniform_phase_triple()
        sub = local_operation(ch, [1])
        assert sub.rank == 1 and sub.probs[0] == pytest.approx(1)
        np.testing.assert_array_equal(sub.unitaries[0], ch.unitaries[1])

    def test_two_branch_renormalization(self):
        ch = uniform_phase_triple()
        sub = local_operation(ch, [0, 1])
        np.testing.assert_allclose(sub.probs, [0.5, 0.5], atol=1e-15)
        np.testing.assert_array_equal(sub.unitaries[0], I2)
        np.testing.assert_array_equal(sub.unitaries[1], np.diag([1, 1j]))

    def test_empty_subset(self):
        with pytest.raises(ValueError):
            local_operation(uniform_phase_triple(), [])


class TestFidelityMonotonicity:
    def test_output_fidelity_never_decreases(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            d = int(rng.integers(2, 4))
            ch = as_kraus(random_mixed_unitary(d, rng))
            phi1, phi2 = random_state(d, rng), random_state(d, rng)
            f_in = fidelity_pure(phi1, phi2)
            f_out = fidelity(apply(ch, density_of(phi1)), apply(ch, density_of(phi2)))
            assert 1 + 1e-9 >= f_out >= f_in - 1e-9

    def test_local_operations_of_preserving_channel_preserve(self):
        # phase mixtures preserve every pair anchored on a basis state, and
        # each of their branch-subset channels must then preserve it too
        rng = np.random.default_rng(9)
        for _ in range(25):
            n = int(rng.integers(2, 5))
            probs = rng.uniform(0.1, 1, n)
            probs /= probs.sum()
            phases = np.concatenate([[0], rng.uniform(0, 2 * np.pi, n - 1)])
            ch = to_mixed_unitary(make_gpd(probs, phases))
            phi = random_state(2, rng)
            f_in = fidelity_pure(KET0, phi)
            full = as_kraus(ch)
            f_full = fidelity(apply(full, density_of(KET0)), apply(full, density_of(phi)))
            assert abs(f_full - f_in) <= 1e-9
            for _ in range(3):
                size = int(rng.integers(1, n + 1))
                subset = rng.choice(n, size=size, replace=False)
                sub = as_kraus(local_operation(ch, subset))
                f_sub = fidelity(apply(sub, density_of(KET0)), apply(sub, density_of(phi)))
                assert abs(f_sub - f_in) <= 1e-7
