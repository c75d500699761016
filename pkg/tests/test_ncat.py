import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rebuild_with
from hicat.errors import CellBudgetExceeded, HicatError, NotComposable
from hicat.fixtures import collapse_battery
from hicat.ncat import (build_double_deloop, build_group_category, build_pair_groupoid,
                        build_product, build_terminal, check_exchange, check_nc_exchange,
                        compose, compose_full_depth, diagonal_block, subset_mask, suspend,
                        validate_full_depth, validate_globular, validate_partial_category)


def pg_id(n, i, j):
    # 1-based pair-groupoid cell (i, j)
    return (i - 1) * n + (j - 1)


class TestCompose:
    def test_pair_groupoid_law(self):
        pg = build_pair_groupoid(2)
        assert compose(pg, 0, pg_id(2, 1, 2), pg_id(2, 2, 1)) == pg_id(2, 1, 1)

    def test_identity_is_right_unit(self):
        for cat in (build_pair_groupoid(3), build_terminal(2),
                    build_double_deloop(np.array([[0, 1], [1, 0]]))):
            for p in range(cat.depth):
                for x in range(cat.cell_count):
                    assert compose(cat, p, x, int(cat.source[p, x])) == x
                    assert compose(cat, p, int(cat.target[p, x]), x) == x

    def test_terminal_single_cell(self):
        t = build_terminal(2)
        assert compose(t, 1, 0, 0) == 0

    def test_not_composable_raises(self):
        pg = build_pair_groupoid(2)
        with pytest.raises(NotComposable):
            compose(pg, 0, pg_id(2, 2, 1), pg_id(2, 1, 2) + 1)


class TestBuilders:
    def test_pair_groupoid_n1(self):
        pg = build_pair_groupoid(1)
        assert pg.cell_count == 1
        assert list(pg.identities(0)) == [0]

    def test_pair_groupoid_n2_counts(self):
        pg = build_pair_groupoid(2)
        # oracle: enumerate composable pairs by the source/target criterion
        composable = sum(1 for x in range(4) for y in range(4)
                         if pg.source[0, x] == pg.target[0, y])
        assert pg.cell_count == 4
        assert len(pg.identities(0)) == 2
        assert composable == 8
        assert int((pg.comp[0] >= 0).sum()) == 8

    def test_pair_groupoid_n3(self):
        pg = build_pair_groupoid(3)
        assert pg.cell_count == 9
        assert len(pg.identities(0)) == 3

    def test_pair_groupoid_rejects_zero(self):
        with pytest.raises(HicatError):
            build_pair_groupoid(0)

    def test_terminal(self):
        t1 = build_terminal(1)
        assert t1.cell_count == 1 and t1.comp[0, 0, 0] == 0
        t3 = build_terminal(3)
        assert validate_globular(t3).ok
        assert check_exchange(t3) is None
        assert t3.is_identity.all()

    def test_group_category_needs_unit(self):
        with pytest.raises(HicatError):
            build_group_category(np.zeros((2, 2), np.int64))


class TestPartialValidator:
    def test_pair_groupoid_clean(self):
        assert validate_partial_category(build_pair_groupoid(3), 0).ok

    def test_terminal_clean(self):
        assert validate_partial_category(build_terminal(1), 0).ok

    def test_corrupted_entry_reported(self):
        pg = build_pair_groupoid(3)
        comp = np.array(pg.comp)
        # (1,2) o (2,3) is (1,3); force it to (2,3)
        comp[0, pg_id(3, 1, 2), pg_id(3, 2, 3)] = pg_id(3, 2, 3)
        bad = rebuild_with(pg, comp=comp)
        rep = validate_partial_category(bad, 0)
        assert not rep.ok
        assert rep.laws() & {"partial.assoc_eq", "partial.assoc_def",
                             "partial.composite_target", "partial.composite_source"}

    def test_budget(self):
        with pytest.raises(CellBudgetExceeded):
            validate_partial_category(build_pair_groupoid(3), 0, budget=4)


class TestGlobular:
    def test_terminal_clean(self):
        assert validate_globular(build_terminal(4)).ok

    def test_pair_groupoid_depth1_vacuous(self):
        assert validate_globular(build_pair_groupoid(3)).ok

    def test_cubical_faces_fail_globularity(self):
        # squares of two pair groupoids force-cast as globular cells, with the
        # depth-1 boundary taken to be the top/bottom cubical face
        pg = build_pair_groupoid(2)
        m = 16
        ident = np.zeros((2, m), bool)
        src = np.zeros((2, m), np.int64)
        tgt = np.zeros((2, m), np.int64)
        comp = np.full((2, m, m), -1, np.int64)
        for a in range(4):
            for b in range(4):
                c = a * 4 + b
                ident[0, c] = pg.is_identity[0, a] and pg.is_identity[0, b]
                ident[1, c] = pg.is_identity[0, b]
                src[0, c] = pg.source[0, a] * 4 + pg.source[0, b]
                tgt[0, c] = pg.target[0, a] * 4 + pg.target[0, b]
                src[1, c] = a * 4 + pg.source[0, b]
                tgt[1, c] = a * 4 + pg.target[0, b]
        from hicat.ncat import FiniteGlobularCategory

        cast = FiniteGlobularCategory(2, m, ident, src, tgt, comp)
        rep = validate_globular(cast)
        assert not rep.ok
        assert rep.laws() & {"globular.sq_sp", "globular.tq_tp",
                             "globular.sq_tp", "globular.tq_sp"}


class TestExchange:
    def test_terminal_none(self):
        assert check_exchange(build_terminal(2)) is None

    def test_battery_full_exchange(self):
        for name, cat in collapse_battery():
            assert check_exchange(cat) is None, name

    def test_full_exchange_implies_nc(self):
        for name, cat in collapse_battery():
            assert check_nc_exchange(cat).ok, name

    def test_noncommutative_double_deloop_fails_exchange(self, s3):
        table, names = s3
        dd = build_double_deloop(table, names)
        wit = check_exchange(dd)
        assert wit is not None
        x, y, w, z, p, q = wit
        # the witness genuinely breaks interchange in the tables
        lhs = dd.comp[q, dd.comp[p, x, y], dd.comp[p, w, z]]
        xw, yz = dd.comp[q, x, w], dd.comp[q, y, z]
        rhs = dd.comp[p, xw, yz] if xw >= 0 and yz >= 0 else -1
        assert lhs >= 0 and lhs != rhs
        # but it satisfies the non-commutative exchange
        assert check_nc_exchange(dd).ok

    def test_nc_mutation_detected(self, z4):
        dd = build_double_deloop(z4)
        comp = np.array(dd.comp)
        e = 0
        comp[0, e, 2] = 3  # break the left unit action used by nc functoriality
        bad = rebuild_with(dd, comp=comp)
        assert not check_nc_exchange(bad).ok

    def test_depth1_rejected(self):
        with pytest.raises(HicatError):
            check_exchange(build_pair_groupoid(2))


class TestProduct:
    def test_two_pair_groupoids(self):
        prod = build_product([build_pair_groupoid(2), build_pair_groupoid(2)])
        assert prod.cell_count == 16
        assert validate_full_depth(prod).ok

    def test_comp_empty_set_composes_both(self):
        prod = build_product([build_pair_groupoid(2), build_pair_groupoid(2)])
        # ((1,2),(1,2)) o_{} ((2,1),(2,1)) = ((1,1),(1,1))
        x = pg_id(2, 1, 2) * 4 + pg_id(2, 1, 2)
        y = pg_id(2, 2, 1) * 4 + pg_id(2, 2, 1)
        want = pg_id(2, 1, 1) * 4 + pg_id(2, 1, 1)
        assert compose_full_depth(prod, 0, x, y) == want

    def test_comp_all_held_is_identity_pairing(self):
        prod = build_product([build_pair_groupoid(2), build_pair_groupoid(2)])
        full = subset_mask([1, 2], 2)
        for x in range(16):
            for y in range(16):
                if x == y:
                    assert compose_full_depth(prod, full, x, y) == x
                else:
                    assert prod.comp[full, x, y] == -1

    def test_comp_hold_first_composes_second(self):
        prod = build_product([build_pair_groupoid(2), build_pair_groupoid(2)])
        g1 = subset_mask([1], 2)
        f = pg_id(2, 2, 1)
        x = f * 4 + pg_id(2, 1, 2)   # (f, (1,2))
        y = f * 4 + pg_id(2, 2, 1)   # (f, (2,1))
        assert compose_full_depth(prod, g1, x, y) == f * 4 + pg_id(2, 1, 1)
        # mismatched held component is undefined
        y2 = pg_id(2, 1, 2) * 4 + pg_id(2, 2, 1)
        assert prod.comp[g1, x, y2] == -1

    def test_single_factor(self):
        prod = build_product([build_pair_groupoid(3)])
        assert validate_full_depth(prod).ok

    def test_empty_factors_rejected(self):
        with pytest.raises(HicatError):
            build_product([])

    def test_corrupted_entry_detected(self):
        prod = build_product([build_pair_groupoid(2), build_pair_groupoid(2)])
        comp = np.array(prod.comp)
        xs, ys = np.nonzero(comp[0] >= 0)
        comp[0, xs[0], ys[0]] = (comp[0, xs[0], ys[0]] + 1) % 16
        assert not validate_full_depth(rebuild_with(prod, comp=comp)).ok

    def test_nc_exchange_literal_direction_holds_on_products(self):
        # the stated form: a gamma-identity acting through comp_alpha is a
        # homomorphism of comp_gamma whenever gamma is inside alpha
        prod = build_product([build_pair_groupoid(2), build_pair_groupoid(2)])
        for gamma in prod.subsets():
            for alpha in prod.subsets():
                if gamma & alpha != gamma:
                    continue
                for e in map(int, prod.identities(gamma)):
                    for x in range(prod.cell_count):
                        lx = prod.comp[alpha, e, x]
                        if lx < 0:
                            continue
                        for y in range(prod.cell_count):
                            ly = prod.comp[alpha, e, y]
                            if ly < 0:
                                continue
                            xy = prod.comp[gamma, x, y]
                            lxy = prod.comp[gamma, lx, ly]
                            assert (xy >= 0) == (lxy >= 0)
                            if xy >= 0:
                                assert prod.comp[alpha, e, xy] == lxy


class TestDiagonalBlock:
    def test_double_deloop_block_is_whole_group(self, z4):
        dd = build_double_deloop(z4)
        assert list(diagonal_block(dd, 0, 0, 1)) == [0, 1, 2, 3]

    def test_suspension_blocks_trivial(self, s3):
        table, names = s3
        cat = suspend(build_group_category(table, names))
        assert list(diagonal_block(cat, 0, 0, 1)) == [0]

    def test_non_identity_rejected(self, z4):
        dd = build_double_deloop(z4)
        with pytest.raises(HicatError):
            diagonal_block(dd, 1, 0, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=5))
def test_pair_groupoid_laws_property(n):
    pg = build_pair_groupoid(n)
    assert validate_partial_category(pg, 0).ok
    # composability criterion as a property
    for x in range(pg.cell_count):
        for y in range(pg.cell_count):
            assert (pg.comp[0, x, y] >= 0) == (pg.source[0, x] == pg.target[0, y])


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3))
def test_product_always_validates_property(n1, n2):
    prod = build_product([build_pair_groupoid(n1), build_pair_groupoid(n2)])
    assert validate_full_depth(prod).ok


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=4), st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_validators_invariant_under_relabeling(n, seed):
    # a permuted copy of a valid category is valid; validators must not
    # depend on any particular cell numbering
    from hicat.ncat import FiniteGlobularCategory

    rng = np.random.default_rng(seed)
    pg = suspend(build_pair_groupoid(n))
    m = pg.cell_count
    perm = rng.permutation(m)
    inv = np.argsort(perm)
    ident = pg.is_identity[:, inv]
    src = perm[pg.source[:, inv]]
    tgt = perm[pg.target[:, inv]]
    comp = np.full((pg.depth, m, m), -1, np.int64)
    for p in range(pg.depth):
        xs, ys = np.nonzero(pg.comp[p] >= 0)
        comp[p, perm[xs], perm[ys]] = perm[pg.comp[p, xs, ys]]
    shuffled = FiniteGlobularCategory(pg.depth, m, ident, src, tgt, comp)
    for p in range(pg.depth):
        assert validate_partial_category(shuffled, p).ok
    assert validate_globular(shuffled).ok
    assert check_exchange(shuffled) is None
    assert check_nc_exchange(shuffled).ok
