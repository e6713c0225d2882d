import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrext.linalg import DomainError, ValidationError, max_abs, ptrace, support_projector
from qrext.states import (
    CQState,
    DensityOperator,
    cq_from_joint,
    cq_power,
    depolarize,
    embed,
    marginal_e,
    marginal_x,
    purify,
    random_classical_cq,
    random_cq,
    random_density,
    uniform_cq,
)


class TestDensityOperator:
    def test_invariants_enforced(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([0.6, 0.6]).astype(complex), (2,))
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([1.5, -0.5]).astype(complex), (2,))

    def test_dims_must_factor(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.eye(4) / 4, (3, 2))


class TestEmbed:
    def test_single_symbol(self):
        sigma = random_density(1, 3)
        cq = CQState(np.array([1.0]), (sigma,))
        dense = embed(cq)
        assert dense.dims == (1, 3)
        assert max_abs(dense.mat - sigma.mat) == 0.0

    def test_fig1_blocks(self, fig1):
        dense = embed(fig1)
        assert max_abs(dense.mat - np.diag([0.1, 0.1, 0.7, 0.1])) <= 1e-12

    @given(st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_marginal_consistency(self, seed):
        cq = random_cq(seed, 3, 2)
        dense = embed(cq)
        traced = ptrace(dense.mat, dense.dims, (0,))
        assert max_abs(traced - marginal_e(cq).mat) <= 1e-12

    def test_support_containment(self):
        cq = random_cq(77, 2, 3)
        dense = embed(cq)
        p_joint = support_projector(dense.mat)
        lift = np.kron(np.eye(2), support_projector(marginal_e(cq).mat))
        assert max_abs(lift @ p_joint @ lift - p_joint) <= 1e-10


class TestMarginals:
    def test_product_case(self):
        sigma = random_density(5, 2)
        cq = uniform_cq(4, sigma)
        assert max_abs(marginal_e(cq).mat - sigma.mat) <= 1e-12
        assert np.allclose(marginal_x(cq), 0.25)

    def test_fig1_e_marginal(self, fig1):
        pe = np.diag(marginal_e(fig1).mat).real
        assert pe == pytest.approx([0.8, 0.2], abs=1e-12)

    def test_marginal_trace(self):
        cq = random_cq(9, 3, 3)
        assert np.trace(marginal_e(cq).mat).real == pytest.approx(1.0, abs=1e-12)


class TestDepolarize:
    def test_full_noise(self):
        rho = random_density(2, 3)
        out = depolarize(rho, 1.0)
        assert max_abs(out.mat - np.eye(3) / 3) <= 1e-12

    def test_continuity_at_zero(self):
        rho = random_density(3, 2)
        out = depolarize(rho, 1e-9)
        assert max_abs(out.mat - rho.mat) <= 1e-8

    def test_eigenvalue_floor(self):
        for seed in range(5):
            rho = random_density(seed, 4)
            eps = 0.25
            out = depolarize(rho, eps)
            assert np.min(out.eigenvalues()) >= eps / 4 - 1e-12

    def test_range_checked(self):
        rho = random_density(1, 2)
        for eps in (0.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                depolarize(rho, eps)


class TestPurify:
    def test_pure_input_gets_reference_vector(self):
        v = np.array([1.0, 0.0], dtype=complex)
        rho = DensityOperator(np.outer(v, v.conj()), (2,))
        out = purify(rho)
        ref = np.zeros(2, dtype=complex)
        ref[0] = 1.0
        expected = np.kron(v, ref)
        assert max_abs(out.mat - np.outer(expected, expected.conj())) <= 1e-12

    def test_maximally_mixed_qubit(self):
        out = purify(DensityOperator(np.eye(2) / 2, (2,)))
        # Schmidt coefficients of the purifying vector are 1/sqrt(2)
        reduced = ptrace(out.mat, (2, 2), (1,))
        assert max_abs(reduced - np.eye(2) / 2) <= 1e-12
        assert np.linalg.matrix_rank(out.mat, tol=1e-10) == 1

    @given(st.integers(0, 10**6), st.integers(2, 3))
    @settings(max_examples=20, deadline=None)
    def test_roundtrip(self, seed, d):
        rho = random_density(seed, d * 2, dims=(d, 2))
        out = purify(rho)
        assert out.dims == (d, 2, 2 * d)
        back = ptrace(out.mat, out.dims, (2,))
        assert max_abs(back - rho.mat) <= 1e-10


class TestRandomGeneration:
    def test_deterministic(self):
        a = random_density(123, 3)
        b = random_density(123, 3)
        assert max_abs(a.mat - b.mat) == 0.0
        ca = random_cq(45, 2, 2)
        cb = random_cq(45, 2, 2)
        assert np.array_equal(ca.probs, cb.probs)
        assert max_abs(ca.cond[1].mat - cb.cond[1].mat) == 0.0

    def test_invariants_hold(self):
        for seed in range(10):
            rho = random_density(seed, 4)
            assert np.min(rho.eigenvalues()) >= -1e-10
            assert np.trace(rho.mat).real == pytest.approx(1.0, abs=1e-10)

    def test_ensemble_mean_is_maximally_mixed(self):
        # unitary invariance: the Ginibre ensemble averages to I/d
        acc = np.zeros((2, 2), dtype=complex)
        for seed in range(1000):
            acc += random_density(seed, 2).mat
        assert max_abs(acc / 1000 - np.eye(2) / 2) <= 0.05


class TestCQHelpers:
    def test_classical_flag(self):
        assert random_classical_cq(3, 2, 3).is_classical
        assert not random_cq(3, 2, 3).is_classical

    def test_joint_roundtrip(self):
        rng = np.random.default_rng(8)
        joint = rng.dirichlet(np.ones(6)).reshape(2, 3)
        cq = cq_from_joint(joint)
        assert max_abs(cq.joint_diagonal() - joint) <= 1e-12

    def test_cq_power(self):
        cq = random_cq(14, 2, 2)
        sq = cq_power(cq, 2)
        assert sq.x_dim == 4 and sq.e_dim == 4
        assert sq.probs[1] == pytest.approx(cq.probs[0] * cq.probs[1], abs=1e-14)
        expect = np.kron(cq.cond[0].mat, cq.cond[1].mat)
        assert max_abs(sq.cond[1].mat - expect) <= 1e-12

    def test_prob_normalization_enforced(self):
        sigma = random_density(2, 2)
        with pytest.raises(ValidationError):
            CQState(np.array([0.5, 0.6]), (sigma, sigma))
