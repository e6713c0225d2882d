import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrext.divergences import (
    DivergenceParams,
    fidelity,
    log_euclidean,
    log_euclidean_variational,
    purified_distance,
    renyi_divergence,
    umegaki,
)
from qrext.linalg import DomainError, ptrace
from qrext.states import embed, marginal_e, random_density, uniform_cq

LN2 = math.log(2.0)

# diagonal closed form for the bundled example state vs pi_X (x) rho_E:
# F = (sum_{x,e} sqrt(p(x,e) p_E(e)))^2 / 2
FIG1_F_UNIFORM = 0.863320209770334


class TestFidelity:
    def test_self_fidelity(self):
        rho = random_density(0, 3).mat
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)
        assert purified_distance(rho, rho) == pytest.approx(0.0, abs=1e-6)

    def test_pure_vs_mixed_overlap(self):
        v = np.array([1.0, 0.0], dtype=complex)
        assert fidelity(np.outer(v, v), np.eye(2) / 2) == pytest.approx(0.5, abs=1e-12)

    def test_fig1_closed_form(self, fig1):
        joint = fig1.joint_diagonal()
        p_e = joint.sum(axis=0)
        oracle = float(np.sum(np.sqrt(joint * p_e[None, :])) ** 2 / 2)
        assert oracle == pytest.approx(FIG1_F_UNIFORM, abs=1e-12)
        ideal = embed(uniform_cq(2, marginal_e(fig1)))
        assert fidelity(embed(fig1).mat, ideal.mat) == pytest.approx(oracle, abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_symmetry_and_envelope(self, seed):
        r = random_density(seed, 3).mat
        s = random_density(seed + 1, 3).mat
        f1, f2 = fidelity(r, s), fidelity(s, r)
        assert abs(f1 - f2) <= 1e-10
        p = purified_distance(r, s)
        assert f1 / 2 - 1e-12 <= 1 - p <= f1 + 1e-12


class TestUmegaki:
    def test_zero_on_equal(self):
        rho = random_density(2, 3).mat
        assert umegaki(rho, rho) == pytest.approx(0.0, abs=1e-10)

    def test_binary_vs_uniform(self):
        # oracle: D(p || uniform) = log 2 - h2(0.3) in nats
        h2 = -0.3 * math.log(0.3) - 0.7 * math.log(0.7)
        oracle = math.log(2) - h2
        assert oracle / LN2 == pytest.approx(0.118709100769307, abs=1e-12)
        got = umegaki(np.diag([0.3, 0.7]), np.eye(2) / 2)
        assert got == pytest.approx(oracle, abs=1e-12)

    def test_support_violation_is_infinite(self):
        v0 = np.array([1.0, 0.0])
        v1 = np.array([0.0, 1.0])
        assert umegaki(np.outer(v0, v0), np.outer(v1, v1)) == math.inf


class TestRenyiFamilies:
    @pytest.mark.parametrize(
        "params",
        [
            DivergenceParams("sandwiched", 0.7),
            DivergenceParams("petz", 0.7),
            DivergenceParams("alpha_z", 0.7, z=0.9),
            DivergenceParams("umegaki"),
        ],
    )
    def test_zero_on_equal(self, params):
        rho = random_density(4, 3).mat
        assert renyi_divergence(rho, rho, params) == pytest.approx(0.0, abs=1e-9)

    def test_commuting_alpha_two(self):
        # classical oracle: D_2(p||u) = log sum p^2 / u = log(2 * 0.58) = log 1.16
        rho = np.diag([0.3, 0.7]).astype(complex)
        sig = np.eye(2) / 2
        oracle = math.log(1.16)
        assert oracle / LN2 == pytest.approx(0.214124805352847, abs=1e-12)
        for params in (
            DivergenceParams("sandwiched", 2.0),
            DivergenceParams("petz", 2.0),
            DivergenceParams("alpha_z", 2.0, z=1.3),
        ):
            assert renyi_divergence(rho, sig, params) == pytest.approx(oracle, abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_half_order_fidelity_identity(self, seed):
        r = random_density(seed, 3).mat
        s = random_density(seed + 7, 3).mat
        d_half = renyi_divergence(r, s, DivergenceParams("sandwiched", 0.5))
        assert d_half == pytest.approx(-math.log(fidelity(r, s)), abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=15, deadline=None)
    def test_alpha_z_coincidences(self, seed):
        r = random_density(seed, 3).mat
        s = random_density(seed + 3, 3).mat
        for alpha in (0.6, 1.7):
            via_z = renyi_divergence(r, s, DivergenceParams("alpha_z", alpha, z=alpha))
            assert via_z == pytest.approx(renyi_divergence(r, s, DivergenceParams("sandwiched", alpha)), abs=1e-10)
            via_1 = renyi_divergence(r, s, DivergenceParams("alpha_z", alpha, z=1.0))
            assert via_1 == pytest.approx(renyi_divergence(r, s, DivergenceParams("petz", alpha)), abs=1e-10)

    def test_support_violation_above_one(self):
        v0 = np.array([1.0, 0.0])
        v1 = np.array([0.0, 1.0])
        p0, p1 = np.outer(v0, v0), np.outer(v1, v1)
        assert renyi_divergence(p0, p1, DivergenceParams("sandwiched", 2.0)) == math.inf
        # disjoint supports blow up for alpha < 1 as well (trace term vanishes)
        assert renyi_divergence(p0, p1, DivergenceParams("sandwiched", 0.5)) == math.inf

    def test_bad_params(self):
        with pytest.raises(DomainError):
            DivergenceParams("sandwiched", 1.0)
        with pytest.raises(DomainError):
            DivergenceParams("alpha_z", 0.5)

    @given(st.integers(0, 10**6))
    @settings(max_examples=50, deadline=None)
    def test_data_processing_partial_trace(self, seed):
        r = random_density(seed, 4, dims=(2, 2))
        s = random_density(seed + 11, 4, dims=(2, 2))
        cases = [
            DivergenceParams("umegaki"),
            DivergenceParams("sandwiched", 0.6),
            DivergenceParams("sandwiched", 2.0),
            DivergenceParams("petz", 0.5),
            DivergenceParams("petz", 1.5),
        ]
        params = cases[seed % len(cases)]
        before = renyi_divergence(r.mat, s.mat, params)
        after = renyi_divergence(ptrace(r.mat, (2, 2), (1,)), ptrace(s.mat, (2, 2), (1,)), params)
        assert after <= before + 1e-9


class TestLogEuclidean:
    def test_commuting_equals_petz(self):
        rho = np.diag([0.2, 0.8]).astype(complex)
        sig = np.diag([0.6, 0.4]).astype(complex)
        for alpha in (0.3, 0.5, 0.8):
            got = log_euclidean(rho, sig, alpha)
            want = renyi_divergence(rho, sig, DivergenceParams("petz", alpha))
            assert got == pytest.approx(want, abs=1e-10)

    def test_zero_on_equal(self):
        rho = random_density(5, 3).mat
        assert log_euclidean(rho, rho, 0.6) == pytest.approx(0.0, abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_dominates_sandwiched(self, seed):
        r = random_density(seed, 3).mat
        s = random_density(seed + 5, 3).mat
        alpha = 0.4 + 0.2 * (seed % 3)
        le = log_euclidean(r, s, alpha)
        sw = renyi_divergence(r, s, DivergenceParams("sandwiched", alpha))
        assert le >= sw - 1e-10

    def test_variational_agrees_with_direct(self):
        for seed in range(5):
            r = random_density(seed, 3).mat
            s = random_density(seed + 17, 3).mat
            alpha = 0.25 + 0.15 * seed
            direct = log_euclidean(r, s, alpha)
            var = log_euclidean_variational(r, s, alpha)
            assert var.converged
            assert abs(var.value - direct) <= 1e-6
