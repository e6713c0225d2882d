import math
import random

import numpy as np
import pytest

from qrext.linalg import UnsupportedSizeError, ValidationError, max_abs
from qrext.states import DensityOperator, random_density
from qrext.symmetry import (
    class_size,
    cycle_type,
    dominance_check,
    irrep_dimension,
    isotypic_projections,
    partitions,
    permutation_unitary,
    sn_characters,
    symmetrize,
    universal_state,
)


class TestCharacters:
    def test_s2_table(self):
        ct = sn_characters(2)
        # trivial rep is 1 on both classes; sign rep is -1 on the transposition
        assert ct.character((2,), (2,)) == 1 and ct.character((2,), (1, 1)) == 1
        assert ct.character((1, 1), (2,)) == -1 and ct.character((1, 1), (1, 1)) == 1

    def test_s3_standard_rep(self):
        ct = sn_characters(3)
        # classes: identity, transposition, 3-cycle
        assert ct.character((2, 1), (1, 1, 1)) == 2
        assert ct.character((2, 1), (2, 1)) == 0
        assert ct.character((2, 1), (3,)) == -1

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_orthogonality_exact(self, n):
        ct = sn_characters(n)
        gram = (ct.table * np.array(ct.sizes)) @ ct.table.T
        assert np.array_equal(gram, math.factorial(n) * np.eye(len(ct.partitions), dtype=np.int64))

    def test_class_sizes_sum(self):
        for n in range(1, 6):
            assert sum(class_size(mu) for mu in partitions(n)) == math.factorial(n)

    def test_dimensions_square_sum(self):
        for n in range(1, 6):
            assert sum(irrep_dimension(lam) ** 2 for lam in partitions(n)) == math.factorial(n)

    def test_size_limit(self):
        with pytest.raises(UnsupportedSizeError):
            sn_characters(6)


class TestPermutationUnitaries:
    def test_identity(self):
        assert max_abs(permutation_unitary((0, 1, 2), 2) - np.eye(8)) == 0.0

    def test_swap_matrix(self):
        swap = permutation_unitary((1, 0), 2)
        expect = np.eye(4)[:, [0, 2, 1, 3]]
        assert max_abs(swap - expect) == 0.0

    def test_composition_law(self):
        rng = random.Random(1)
        for _ in range(10):
            p1 = tuple(rng.sample(range(3), 3))
            p2 = tuple(rng.sample(range(3), 3))
            comp = tuple(p1[p2[k]] for k in range(3))
            u1 = permutation_unitary(p1, 2)
            u2 = permutation_unitary(p2, 2)
            assert max_abs(u1 @ u2 - permutation_unitary(comp, 2)) <= 1e-14

    def test_product_state_invariance(self):
        rho = random_density(4, 2).mat
        prod = np.kron(np.kron(rho, rho), rho)
        for perm in [(1, 2, 0), (2, 1, 0)]:
            u = permutation_unitary(perm, 2)
            assert max_abs(u @ prod @ u.conj().T - prod) <= 1e-12

    def test_invalid_permutation(self):
        with pytest.raises(ValidationError):
            permutation_unitary((0, 0, 1), 2)

    def test_cycle_type(self):
        assert cycle_type((1, 0, 2)) == (2, 1)
        assert cycle_type((1, 2, 0)) == (3,)


class TestIsotypicProjections:
    def test_n2_d2_sym_antisym(self):
        projs = dict(isotypic_projections(2, 2))
        swap = permutation_unitary((1, 0), 2)
        assert max_abs(projs[(2,)] - (np.eye(4) + swap) / 2) <= 1e-12
        assert max_abs(projs[(1, 1)] - (np.eye(4) - swap) / 2) <= 1e-12
        assert np.trace(projs[(2,)]).real == pytest.approx(3.0, abs=1e-10)
        assert np.trace(projs[(1, 1)]).real == pytest.approx(1.0, abs=1e-10)

    def test_completeness_and_orthogonality(self):
        projs = isotypic_projections(3, 2)
        total = sum(p for _, p in projs)
        assert max_abs(total - np.eye(8)) <= 1e-10
        mats = [p for _, p in projs]
        for i, p in enumerate(mats):
            assert max_abs(p @ p - p) <= 1e-10
            for q in mats[i + 1 :]:
                assert max_abs(p @ q) <= 1e-10

    def test_centrality(self):
        import itertools

        for lam, p in isotypic_projections(3, 2):
            for perm in itertools.permutations(range(3)):
                u = permutation_unitary(perm, 2)
                assert max_abs(p @ u - u @ p) <= 1e-10

    def test_row_limit_drops_blocks(self):
        # on (C^2)^3 the partition (1,1,1) has 3 > 2 rows and must vanish
        labels = [lam for lam, _ in isotypic_projections(3, 2)]
        assert (1, 1, 1) not in labels

    def test_size_limit(self):
        with pytest.raises(UnsupportedSizeError):
            isotypic_projections(4, 3)


class TestUniversalState:
    def test_n2_d2_spectrum(self):
        u = universal_state(2, 2)
        eigs = np.sort(np.linalg.eigvalsh(u.omega.mat))
        assert np.allclose(eigs, [1 / 6, 1 / 6, 1 / 6, 1 / 2], atol=1e-12)
        assert u.g == 27.0 and u.v == 2

    def test_trace_one_and_invariance(self):
        for n in (2, 3):
            u = universal_state(n, 2)
            assert np.trace(u.omega.mat).real == pytest.approx(1.0, abs=1e-12)
            import itertools

            for perm in itertools.permutations(range(n)):
                up = permutation_unitary(perm, 2)
                assert max_abs(up @ u.omega.mat @ up.conj().T - u.omega.mat) <= 1e-10

    def test_commutes_with_product_states(self):
        u = universal_state(2, 2)
        rho = random_density(6, 2).mat
        prod = np.kron(rho, rho)
        assert max_abs(u.omega.mat @ prod - prod @ u.omega.mat) <= 1e-10

    def test_dominance_of_omega_itself(self):
        u = universal_state(2, 2)
        margin = dominance_check(u.omega, u)
        lam_min = float(np.min(np.linalg.eigvalsh(u.omega.mat)))
        assert margin == pytest.approx((u.g - 1) * lam_min, abs=1e-9)
        assert margin > 0

    def test_dominance_product_and_symmetrized(self):
        u2 = universal_state(2, 2)
        rho = random_density(8, 2).mat
        tau = DensityOperator(np.kron(rho, rho), (2, 2))
        assert dominance_check(tau, u2) >= -1e-10
        u3 = universal_state(3, 2)
        for seed in range(5):
            sym = symmetrize(random_density(seed, 8).mat, 3, 2)
            tau3 = DensityOperator(sym, (2, 2, 2))
            assert dominance_check(tau3, u3) >= -1e-10

    def test_non_invariant_rejected(self):
        u = universal_state(2, 2)
        tau = random_density(9, 4, dims=(2, 2))
        with pytest.raises(ValidationError):
            dominance_check(tau, u)
