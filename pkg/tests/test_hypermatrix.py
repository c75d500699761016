import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hicat.coeff import ComplexField
from hicat.convolution import ConvolutionAlgebra, Section, convolve, involve
from hicat.errors import DimMismatch
from hicat.hypermatrix import (Hypermatrix, HypermatrixSystem, contraction_to_held,
                               hinvol, hmul, hnorm, hyper_from_section, load_hyper,
                               save_hyper, section_from_hyper, unit, zeros)
from hicat.involutive import InvolutionSpec
from hicat.ncat import build_pair_groupoid, build_product, subset_mask


def brute_hmul(gamma, x, y):
    """Independent oracle: naive loops straight from the mixed
    convolution/Schur semantics."""
    n = len(x.dims)
    lv = [k - 1 for k in gamma]
    out = np.zeros(x.dims + x.dims, np.complex128)
    for idx in np.ndindex(*out.shape):
        ii, jj = idx[:n], idx[n:]
        ranges = [range(x.dims[k]) if k in lv else (0,) for k in range(n)]
        total = 0.0 + 0.0j
        for o in itertools.product(*ranges):
            xi = tuple(ii) + tuple(o[k] if k in lv else jj[k] for k in range(n))
            yi = tuple(o[k] if k in lv else ii[k] for k in range(n)) + tuple(jj)
            total += x.data[xi] * y.data[yi]
        out[idx] = total
    return out


def rand_hyper(rng, dims, integer=False):
    shape = tuple(dims) + tuple(dims)
    if integer:
        return Hypermatrix(dims, rng.integers(-3, 4, shape) + 1j * rng.integers(-3, 4, shape))
    return Hypermatrix(dims, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def all_subsets(n):
    return [tuple(k + 1 for k in range(n) if mask >> k & 1) for mask in range(1 << n)]


class TestHmul:
    def test_n1_matmul(self):
        rng = np.random.default_rng(0)
        a, b = rand_hyper(rng, (3,)), rand_hyper(rng, (3,))
        assert np.allclose(hmul([1], a, b).data, a.data @ b.data)

    def test_n1_hadamard(self):
        rng = np.random.default_rng(1)
        a, b = rand_hyper(rng, (3,)), rand_hyper(rng, (3,))
        assert np.allclose(hmul([], a, b).data, a.data * b.data, rtol=1e-15)
        ai, bi = rand_hyper(rng, (3,), integer=True), rand_hyper(rng, (3,), integer=True)
        assert np.array_equal(hmul([], ai, bi).data, ai.data * bi.data)
        assert np.array_equal(unit([], (3,)).data, np.ones((3, 3)))

    def test_simple_tensor_law(self):
        rng = np.random.default_rng(2)
        a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                      for _ in range(4))
        x = Hypermatrix((2, 2), np.einsum("ik,jl->ijkl", a, b))
        y = Hypermatrix((2, 2), np.einsum("ik,jl->ijkl", c, d))
        assert np.allclose(hmul([1], x, y).data, np.einsum("ik,jl->ijkl", a @ c, b * d))
        assert np.allclose(hmul([2], x, y).data, np.einsum("ik,jl->ijkl", a * c, b @ d))
        assert np.allclose(hmul([1, 2], x, y).data, np.einsum("ik,jl->ijkl", a @ c, b @ d))
        assert np.allclose(hmul([], x, y).data, np.einsum("ik,jl->ijkl", a * c, b * d))

    def test_against_brute_oracle(self):
        rng = np.random.default_rng(3)
        for dims in ((2,), (2, 3), (2, 2, 2)):
            x, y = rand_hyper(rng, dims), rand_hyper(rng, dims)
            for gamma in all_subsets(len(dims)):
                got = hmul(gamma, x, y).data
                want = brute_hmul(gamma, x, y)
                assert np.allclose(got, want, rtol=1e-13), (dims, gamma)

    def test_dim_mismatch(self):
        rng = np.random.default_rng(4)
        with pytest.raises(DimMismatch):
            hmul([1], rand_hyper(rng, (2,)), rand_hyper(rng, (3,)))

    def test_unit_laws_random(self):
        rng = np.random.default_rng(5)
        for dims in ((2, 2), (3, 2)):
            x = rand_hyper(rng, dims)
            for gamma in all_subsets(len(dims)):
                u = unit(gamma, dims)
                assert np.array_equal(hmul(gamma, u, x).data, x.data)
                assert np.array_equal(hmul(gamma, x, u).data, x.data)

    def test_associativity_exact_on_integers(self):
        rng = np.random.default_rng(6)
        dims = (2, 2)
        for gamma in all_subsets(2):
            x, y, z = (rand_hyper(rng, dims, integer=True) for _ in range(3))
            lhs = hmul(gamma, hmul(gamma, x, y), z)
            rhs = hmul(gamma, x, hmul(gamma, y, z))
            assert np.array_equal(lhs.data, rhs.data)


class TestHinvol:
    def test_n1_conjugate_transpose(self):
        rng = np.random.default_rng(7)
        a = rand_hyper(rng, (3,))
        assert np.array_equal(hinvol([1], a).data, a.data.conj().T)

    def test_involutive(self):
        rng = np.random.default_rng(8)
        a = rand_hyper(rng, (2, 3))
        for gamma in all_subsets(2):
            assert np.array_equal(hinvol(gamma, hinvol(gamma, a)).data, a.data)

    def test_antimultiplicative_same_levels(self):
        rng = np.random.default_rng(9)
        a, b = rand_hyper(rng, (2, 2)), rand_hyper(rng, (2, 2))
        for gamma in all_subsets(2):
            lhs = hinvol(gamma, hmul(gamma, a, b))
            rhs = hmul(gamma, hinvol(gamma, b), hinvol(gamma, a))
            assert np.allclose(lhs.data, rhs.data, rtol=1e-13)

    def test_multiplicative_disjoint_levels(self):
        rng = np.random.default_rng(10)
        a, b = rand_hyper(rng, (2, 2)), rand_hyper(rng, (2, 2))
        for gamma, delta in (((1,), (2,)), ((2,), (1,)), ((), (1, 2))):
            lhs = hinvol(gamma, hmul(delta, a, b))
            rhs = hmul(delta, hinvol(gamma, a), hinvol(gamma, b))
            assert np.allclose(lhs.data, rhs.data, rtol=1e-13)


class TestHnorm:
    def test_ones_matrix(self):
        ones = Hypermatrix((2,), np.ones((2, 2)))
        assert hnorm([1], ones) == pytest.approx(2.0, rel=1e-12)
        assert hnorm([], ones) == 1.0

    def test_unit_norm_one(self):
        for dims in ((2,), (2, 2), (3, 2)):
            for gamma in all_subsets(len(dims)):
                assert hnorm(gamma, unit(gamma, dims)) == pytest.approx(1.0, rel=1e-12)

    def test_cstar_identity_sampled(self):
        rng = np.random.default_rng(11)
        for dims in ((2, 2), (3, 2)):
            for gamma in all_subsets(len(dims)):
                for _ in range(20):
                    x = rand_hyper(rng, dims)
                    nx = hnorm(gamma, x)
                    lhs = hnorm(gamma, hmul(gamma, hinvol(gamma, x), x))
                    assert abs(lhs - nx * nx) <= 1e-9 * nx * nx

    def test_submultiplicative_sampled(self):
        rng = np.random.default_rng(12)
        dims = (2, 2)
        for gamma in all_subsets(2):
            for _ in range(20):
                x, y = rand_hyper(rng, dims), rand_hyper(rng, dims)
                assert hnorm(gamma, hmul(gamma, x, y)) <= (
                    hnorm(gamma, x) * hnorm(gamma, y) * (1 + 1e-9))

    def test_equivalence_bounds(self):
        rng = np.random.default_rng(13)
        dims = (2, 2)
        for _ in range(30):
            x = rand_hyper(rng, dims)
            base = hnorm([], x)
            for gamma in all_subsets(2):
                bound = float(np.prod([dims[k - 1] for k in gamma])) if gamma else 1.0
                v = hnorm(gamma, x)
                assert base <= v * (1 + 1e-12)
                assert v <= bound * base * (1 + 1e-12)

    def test_slice_semantics(self):
        # gamma={1} on dims (2,2): max over (i2,j2) of the 2x2 slice norm
        rng = np.random.default_rng(14)
        x = rand_hyper(rng, (2, 2))
        want = max(float(np.linalg.svd(x.data[:, i2, :, j2], compute_uv=False)[0])
                   for i2 in range(2) for j2 in range(2))
        assert hnorm([1], x) == pytest.approx(want, rel=1e-12)

    def test_kron_flattening(self):
        rng = np.random.default_rng(15)
        x = rand_hyper(rng, (2, 2))
        flat = x.data.transpose(0, 1, 2, 3).reshape(4, 4)
        assert hnorm([1, 2], x) == pytest.approx(
            float(np.linalg.svd(flat, compute_uv=False)[0]), rel=1e-12)


class TestSectionCorrespondence:
    def test_roundtrip(self):
        rng = np.random.default_rng(16)
        x = rand_hyper(rng, (2,))
        sec = section_from_hyper(x)
        assert sec.shape == (4,)
        assert np.array_equal(hyper_from_section(sec, (2,)).data, x.data)
        x2 = rand_hyper(rng, (2, 2))
        sec2 = section_from_hyper(x2)
        assert sec2.shape == (16,)
        assert np.array_equal(hyper_from_section(sec2, (2, 2)).data, x2.data)

    def test_products_match_convolutions_exactly(self):
        dims = (2, 2)
        fdc = build_product([build_pair_groupoid(d) for d in dims])
        alg = ConvolutionAlgebra(fdc, ComplexField())
        rng = np.random.default_rng(17)
        for _ in range(5):
            x, y = rand_hyper(rng, dims), rand_hyper(rng, dims)
            sx = Section(fdc.cell_count, section_from_hyper(x))
            sy = Section(fdc.cell_count, section_from_hyper(y))
            for gamma in all_subsets(2):
                key = subset_mask(contraction_to_held(gamma, 2), 2)
                got = convolve(alg, key, sx, sy).data
                want = section_from_hyper(hmul(gamma, x, y))
                assert np.array_equal(got.view(np.float64), want.view(np.float64)), gamma

    def test_involutions_match_exactly(self):
        dims = (2, 2)
        fdc = build_product([build_pair_groupoid(d) for d in dims])
        rng = np.random.default_rng(18)
        for gamma in all_subsets(2):
            perm = np.empty(16, np.int64)
            for c in range(16):
                p1, p2 = divmod(c, 4)
                i1, j1 = divmod(p1, 2)
                i2, j2 = divmod(p2, 2)
                if 1 in gamma:
                    i1, j1 = j1, i1
                if 2 in gamma:
                    i2, j2 = j2, i2
                perm[c] = (i1 * 2 + j1) * 4 + (i2 * 2 + j2)
            spec = InvolutionSpec(variance=frozenset(), map=perm, covariant=frozenset())
            alg = ConvolutionAlgebra(fdc, ComplexField(), involutions={gamma: spec})
            x = rand_hyper(rng, dims)
            sx = Section(16, section_from_hyper(x))
            got = involve(alg, gamma, sx).data
            want = section_from_hyper(hinvol(gamma, x))
            assert np.array_equal(got, want)


class TestIO:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(19)
        x = rand_hyper(rng, (2, 3))
        path = tmp_path / "x.hyp"
        save_hyper(path, x)
        assert np.array_equal(load_hyper(path).data, x.data)

    def test_missing_entries_default_zero(self, tmp_path):
        path = tmp_path / "sparse.hyp"
        path.write_text("hyper 1 2\n1 2 3.5 -1.0\n")
        x = load_hyper(path)
        assert x.data[0, 1] == 3.5 - 1.0j
        assert x.data[1, 0] == 0

    def test_bad_header(self, tmp_path):
        from hicat.errors import SpecFileError

        path = tmp_path / "bad.hyp"
        path.write_text("hyperx 1 2\n")
        with pytest.raises(SpecFileError):
            load_hyper(path)


class TestSystem:
    def test_star_algebra_laws_sampled(self):
        from hicat.coeff import validate_star_algebra

        system = HypermatrixSystem((2,))
        rep = validate_star_algebra(system, elements=[system.sample(np.random.default_rng(i))
                                                      for i in range(4)])
        assert rep.ok

    def test_no_common_unit(self):
        assert HypermatrixSystem((2,)).common_unit is None

    def test_zeros(self):
        z = zeros((2, 2))
        assert not z.data.any()


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_algebra_property(n1, n2, seed):
    # each (hmul gamma, hinvol gamma) pair is an associative unital *-algebra
    rng = np.random.default_rng(seed)
    dims = (n1, n2)
    x, y = rand_hyper(rng, dims, integer=True), rand_hyper(rng, dims, integer=True)
    for gamma in all_subsets(2):
        u = unit(gamma, dims)
        assert np.array_equal(hmul(gamma, u, x).data, x.data)
        lhs = hinvol(gamma, hmul(gamma, x, y))
        rhs = hmul(gamma, hinvol(gamma, y), hinvol(gamma, x))
        assert np.array_equal(lhs.data, rhs.data)
