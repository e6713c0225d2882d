import math

import numpy as np
import pytest

from qrext.hashing import (
    HashFunction,
    all_hashes,
    apply_hash,
    best_hash_exhaustive,
    fidelity_to_ideal,
    finite_n_table,
    oneshot_converse_check,
)
from qrext.divergences import fidelity
from qrext.linalg import UnsupportedSizeError, ValidationError, max_abs, tensor
from qrext.states import embed, marginal_e, random_cq, random_density, uniform_cq

LN2 = math.log(2.0)
FIG1_F_BEST_N1 = 0.863320209770334
FIG1_EXPONENT_N1_BITS = 0.212032333438472  # 1 - H_half in bits


class TestHashFunction:
    def test_table_validation(self):
        with pytest.raises(ValidationError):
            HashFunction(1, 2, 2, (0,))
        with pytest.raises(ValidationError):
            HashFunction(1, 2, 2, (0, 5))

    def test_call_indexing(self):
        h = HashFunction(2, 2, 2, (0, 1, 1, 0))  # XOR
        assert h((0, 0)) == 0 and h((0, 1)) == 1 and h((1, 0)) == 1 and h((1, 1)) == 0

    def test_enumeration_order_and_budget(self):
        tables = [h.table for h in all_hashes(1, 2, 2)]
        assert tables == [(0, 0), (0, 1), (1, 0), (1, 1)]
        with pytest.raises(UnsupportedSizeError):
            list(all_hashes(3, 2, 8))


class TestApplyHash:
    def test_constant_hash(self, fig1):
        h = HashFunction.constant(2, 2, 2)
        out = apply_hash(fig1, 2, h)
        assert out.probs[0] == pytest.approx(1.0, abs=1e-12)
        me = marginal_e(fig1).mat
        assert max_abs(out.cond[0].mat - tensor(me, me)) <= 1e-12

    def test_identity_hash_relabels(self, fig1):
        out = apply_hash(fig1, 1, HashFunction.identity(2))
        assert np.allclose(out.probs, fig1.probs)
        for a, b in zip(out.cond, fig1.cond):
            assert max_abs(a.mat - b.mat) <= 1e-12

    def test_xor_two_copies(self, fig1):
        h = HashFunction(2, 2, 2, (0, 1, 1, 0))
        out = apply_hash(fig1, 2, h)
        p0, p1 = fig1.probs
        assert out.probs[0] == pytest.approx(p0 * p0 + p1 * p1, abs=1e-12)
        # conditional on z=0: mixture of 00 and 11 tensor blocks
        expect = (
            p0 * p0 * tensor(fig1.cond[0].mat, fig1.cond[0].mat)
            + p1 * p1 * tensor(fig1.cond[1].mat, fig1.cond[1].mat)
        ) / (p0 * p0 + p1 * p1)
        assert max_abs(out.cond[0].mat - expect) <= 1e-12

    def test_marginal_preserved(self):
        st = random_cq(3, 2, 2)
        h = HashFunction(2, 2, 2, (0, 1, 0, 0))
        out = apply_hash(st, 2, h)
        me = marginal_e(st).mat
        got = sum(p * c.mat for p, c in zip(out.probs, out.cond))
        assert max_abs(got - tensor(me, me)) <= 1e-12

    def test_dimension_checks(self, fig1):
        with pytest.raises(ValidationError):
            apply_hash(fig1, 2, HashFunction.identity(2))


class TestFidelityToIdeal:
    def test_constant_hash_single_copy(self, fig1):
        out = apply_hash(fig1, 1, HashFunction.constant(1, 2, 2))
        assert fidelity_to_ideal(out, marginal_e(fig1)) == pytest.approx(0.5, abs=1e-12)

    def test_identity_matches_closed_form(self, fig1):
        out = apply_hash(fig1, 1, HashFunction.identity(2))
        f = fidelity_to_ideal(out, marginal_e(fig1))
        assert f == pytest.approx(FIG1_F_BEST_N1, abs=1e-12)

    def test_generic_path_agreement(self):
        for seed in range(5):
            st = random_cq(seed, 2, 2)
            h = HashFunction(2, 2, 2, tuple(np.random.default_rng(seed).integers(0, 2, size=4)))
            hashed = apply_hash(st, 2, h)
            me = marginal_e(st)
            ideal_e = me.tensor(me)
            blockwise = fidelity_to_ideal(hashed, ideal_e)
            dense = fidelity(embed(hashed).mat, embed(uniform_cq(2, ideal_e)).mat)
            assert blockwise == pytest.approx(dense, abs=1e-10)


class TestBestHash:
    def test_n1_four_functions(self, fig1):
        rep = best_hash_exhaustive(fig1, 1, 2)
        assert rep.best_fidelity == pytest.approx(FIG1_F_BEST_N1, abs=1e-12)
        assert rep.best_hash.table == (0, 1)  # identity wins the lexicographic tie
        assert rep.exponent_estimate / LN2 == pytest.approx(FIG1_EXPONENT_N1_BITS, abs=1e-9)
        # constants only reach 1/2
        out = apply_hash(fig1, 1, HashFunction.constant(1, 2, 2))
        assert fidelity_to_ideal(out, marginal_e(fig1)) == pytest.approx(0.5, abs=1e-12)

    def test_z_one_is_trivially_ideal(self, fig1):
        rep = best_hash_exhaustive(fig1, 1, 1)
        assert rep.best_fidelity == pytest.approx(1.0, abs=1e-12)
        assert rep.exponent_estimate == pytest.approx(0.0, abs=1e-12)

    def test_n2_oneshot_holds(self, fig1):
        rep = best_hash_exhaustive(fig1, 2, 2)
        assert rep.passed
        assert rep.exponent_estimate >= rep.oneshot_bound - 1e-9

    def test_relabeling_invariance(self):
        st = random_cq(11, 2, 2)
        me = marginal_e(st)
        ideal = me.tensor(me)
        h = HashFunction(2, 2, 2, (0, 1, 1, 0))
        relabeled = HashFunction(2, 2, 2, (1, 0, 0, 1))
        f1 = fidelity_to_ideal(apply_hash(st, 2, h), ideal)
        f2 = fidelity_to_ideal(apply_hash(st, 2, relabeled), ideal)
        assert abs(f1 - f2) <= 1e-12

    def test_budget_guard(self, fig1):
        with pytest.raises(UnsupportedSizeError):
            best_hash_exhaustive(fig1, 3, 8)


class TestOneShot:
    def test_exact_equality_at_half(self, fig1):
        ms = oneshot_converse_check(fig1, 1, HashFunction.identity(2), (0.5,))
        assert abs(ms[0]["margin_hashed"]) <= 1e-9
        assert abs(ms[0]["margin_additive"]) <= 1e-9

    def test_constant_hash_margins(self, fig1):
        ms = oneshot_converse_check(fig1, 1, HashFunction.constant(1, 2, 2), (0.5, 0.7, 0.9))
        for m in ms:
            assert m["margin_hashed"] >= -1e-9
            assert m["margin_additive"] >= -1e-9

    def test_alpha_grid_validated(self, fig1):
        with pytest.raises(ValidationError):
            oneshot_converse_check(fig1, 1, HashFunction.identity(2), (0.3,))


class TestFiniteN:
    def test_rate_zero_is_exact(self, fig1):
        reports = finite_n_table(fig1, 0.0, 2)
        for rep in reports:
            assert rep.z_dim == 1
            assert rep.exponent_estimate == pytest.approx(0.0, abs=1e-12)
            assert rep.epa_theory == pytest.approx(0.0, abs=1e-12)
            assert rep.passed

    def test_product_state_identity_exact(self):
        cq = uniform_cq(2, random_density(5, 2))
        reports = finite_n_table(cq, math.log(2), 2)
        for rep in reports:
            assert rep.best_fidelity == pytest.approx(1.0, abs=1e-10)
            assert rep.exponent_estimate == pytest.approx(0.0, abs=1e-9)

    def test_fig1_rate_one_bit(self, fig1):
        reports = finite_n_table(fig1, LN2, 2)
        n1 = reports[0]
        assert n1.z_dim == 2
        assert n1.exponent_estimate / LN2 == pytest.approx(FIG1_EXPONENT_N1_BITS, abs=1e-9)
        assert n1.oneshot_bound / LN2 == pytest.approx(FIG1_EXPONENT_N1_BITS, abs=1e-9)
        assert n1.epa_theory / LN2 == pytest.approx(FIG1_EXPONENT_N1_BITS, abs=1e-6)
        for rep in reports:
            assert rep.passed
