import itertools

import numpy as np

from hicat.coeff import (BOTH, CONTRAVARIANT, COVARIANT, ComplexField, MatrixAlgebra,
                         base_pairs_for, covariance_match, is_commutative,
                         validate_star_algebra)
from hicat.hypermatrix import HypermatrixSystem


class TestStarAlgebra:
    def test_matrix_algebra_clean(self):
        assert validate_star_algebra(MatrixAlgebra(2)).ok

    def test_matrix_algebra_3_clean(self):
        assert validate_star_algebra(MatrixAlgebra(3)).ok

    def test_complex_field_both_labels(self):
        A = ComplexField()
        assert validate_star_algebra(A).ok
        assert A.covariance(0, 0) == BOTH

    def test_declared_covariant_adjoint_fails(self):
        A = MatrixAlgebra(2, declared_covariance=COVARIANT)
        rep = validate_star_algebra(A)
        assert "alg.covariance" in rep.laws()
        # the derived witness: (E12 E21)^† = E11 but E12^† E21^† = E22
        e12, e21 = A.matrix_unit(1, 2), A.matrix_unit(2, 1)
        lhs = A.involution(0, e12 @ e21)
        rhs = A.involution(0, e12) @ A.involution(0, e21)
        assert not np.allclose(lhs, rhs)

    def test_sampled_mode(self):
        rep = validate_star_algebra(MatrixAlgebra(2), elements=None, samples=8,
                                    rng=np.random.default_rng(0))
        assert rep.ok


class TestCommutativity:
    def test_complex_field(self):
        assert is_commutative(ComplexField()) == (True, None)

    def test_matrix_algebra(self):
        flag, witness = is_commutative(MatrixAlgebra(2))
        assert flag is False and witness is not None
        A = MatrixAlgebra(2)
        e12, e21 = A.matrix_unit(1, 2), A.matrix_unit(2, 1)
        assert not np.allclose(e12 @ e21, e21 @ e12)

    def test_one_by_one(self):
        assert is_commutative(MatrixAlgebra(1))[0] is True

    def test_hypermatrix_system(self):
        flag, witness = is_commutative(HypermatrixSystem((2,)))
        assert flag is False  # the contracted product is matrix multiplication


class TestCovarianceMatch:
    def fully_involutive_pairs(self, depth):
        variances = [frozenset(s) for r in range(depth + 1)
                     for s in itertools.combinations(range(depth), r)]
        return base_pairs_for(depth, variances)

    def test_fully_contravariant_always_matches(self):
        pairs = base_pairs_for(2, [frozenset({0, 1})])
        assert all(v == CONTRAVARIANT for _c, _i, v in pairs)
        got, blocking = covariance_match(pairs, MatrixAlgebra(2))
        assert got is not None and blocking is None

    def test_mixed_variance_blocks_on_matrix_algebra(self):
        pairs = self.fully_involutive_pairs(2)
        got, blocking = covariance_match(pairs, MatrixAlgebra(2))
        assert got is None
        assert blocking is not None and blocking[2] == COVARIANT

    def test_commutative_always_matches(self):
        pairs = self.fully_involutive_pairs(2)
        got, blocking = covariance_match(pairs, ComplexField())
        assert got is not None

    def test_hypermatrix_system_matches_mixed_variance(self):
        pairs = self.fully_involutive_pairs(2)
        system = HypermatrixSystem((2,))
        got, blocking = covariance_match(pairs, system)
        assert got is not None
        # the assignment's labels genuinely admit each variance
        for (comp, inv), (k, j) in got.pairs.items():
            want = dict((tuple(p[:2]), p[2]) for p in pairs)[(comp, inv)]
            assert system.covariance(k, j) in (want, BOTH)

    def test_assignment_is_factored(self):
        pairs = self.fully_involutive_pairs(2)
        got, _ = covariance_match(pairs, ComplexField())
        for (comp, inv), (k, j) in got.pairs.items():
            assert got.product_map[comp] == k
            assert got.involution_map[inv] == j

    def test_commutative_matches_every_variance_vector(self):
        # exhaustive over all variance label vectors up to depth 3
        for depth in (1, 2, 3):
            comps = list(range(depth))
            invs = [frozenset({q}) for q in range(depth)]
            pairs_keys = [(c, i) for c in comps for i in invs]
            for labels in itertools.product([COVARIANT, CONTRAVARIANT],
                                            repeat=len(pairs_keys)):
                pairs = [(c, i, v) for (c, i), v in zip(pairs_keys, labels)]
                got, _ = covariance_match(pairs, ComplexField())
                assert got is not None

    def test_hypermatrix_covariance_labels(self):
        system = HypermatrixSystem((2, 2))
        # masks: 0 = {}, 1 = {1}, 2 = {2}, 3 = {1,2}
        assert system.covariance(0, 0) == BOTH
        assert system.covariance(1, 1) == CONTRAVARIANT
        assert system.covariance(1, 0) == COVARIANT
        assert system.covariance(3, 1) == "neither"
        assert system.covariance(1, 3) == CONTRAVARIANT
