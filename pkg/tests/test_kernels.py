"""Cross-checks between the numba kernels and their fallback twins.

The two backends must agree bit for bit: the float kernels share one scalar
loop (jitted or not), and the integer scans have an independently vectorized
fallback that must produce identical witnesses in identical order.
"""

import numpy as np
import pytest

from hicat import _kernels
from hicat._kernels import (_assoc_scan_loop, _assoc_scan_numpy,
                            _convolve_matrix_loop, _convolve_scalar_loop,
                            _exchange_first_loop, _hmul_loop,
                            hmul_broadcast_reference, hmul_kernel)


def random_partial_table(rng, m, density=0.5, corrupt=0):
    comp = np.full((m, m), -1, np.int64)
    mask = rng.random((m, m)) < density
    comp[mask] = rng.integers(0, m, mask.sum())
    for _ in range(corrupt):
        comp[rng.integers(0, m), rng.integers(0, m)] = rng.integers(-1, m)
    return comp


class TestAssocScan:
    def test_fallback_matches_loop_on_random_tables(self):
        rng = np.random.default_rng(0)
        for trial in range(30):
            m = int(rng.integers(2, 12))
            comp = random_partial_table(rng, m)
            out_a = np.empty((16, 4), np.int64)
            out_b = np.empty((16, 4), np.int64)
            na = _assoc_scan_loop(comp, out_a, 16)
            nb = _assoc_scan_numpy(comp, out_b, 16)
            assert na == nb
            assert np.array_equal(out_a[:na], out_b[:nb])

    def test_clean_associative_table(self):
        # Z5 under addition: fully associative, no witnesses from either path
        m = 5
        comp = np.array([[(i + j) % m for j in range(m)] for i in range(m)], np.int64)
        out = np.empty((16, 4), np.int64)
        assert _assoc_scan_loop(comp, out, 16) == 0
        assert _assoc_scan_numpy(comp, out, 16) == 0

    def test_undefined_entry_not_mistaken_for_cell_zero(self):
        # comp[0,0]=1 defined, comp[1,*] undefined: (0*0)*z undefined for all
        # z while 0*(0*z) may be defined; both backends must agree
        comp = np.full((3, 3), -1, np.int64)
        comp[0, 0] = 1
        out_a = np.empty((16, 4), np.int64)
        out_b = np.empty((16, 4), np.int64)
        na = _assoc_scan_loop(comp, out_a, 16)
        nb = _assoc_scan_numpy(comp, out_b, 16)
        assert na == nb and np.array_equal(out_a[:na], out_b[:nb])


class TestFloatKernels:
    def test_convolve_scalar_matches_python(self):
        if not _kernels.HAS_NUMBA:
            pytest.skip("single backend")
        rng = np.random.default_rng(1)
        m, t = 40, 500
        sig = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        rho = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        xs = rng.integers(0, m, t)
        ys = rng.integers(0, m, t)
        zs = rng.integers(0, m, t)
        out_nb = np.zeros(m, np.complex128)
        out_py = np.zeros(m, np.complex128)
        _kernels.convolve_scalar(xs, ys, zs, sig, rho, out_nb)
        _convolve_scalar_loop(xs, ys, zs, sig, rho, out_py)
        assert np.array_equal(out_nb.view(np.float64), out_py.view(np.float64))

    def test_convolve_matrix_matches_python(self):
        if not _kernels.HAS_NUMBA:
            pytest.skip("single backend")
        rng = np.random.default_rng(2)
        m, d, t = 9, 3, 120
        sig = rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))
        rho = rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))
        xs = rng.integers(0, m, t)
        ys = rng.integers(0, m, t)
        zs = rng.integers(0, m, t)
        out_nb = np.zeros((m, d, d), np.complex128)
        out_py = np.zeros((m, d, d), np.complex128)
        _kernels.convolve_matrix(xs, ys, zs, sig, rho, out_nb)
        _convolve_matrix_loop(xs, ys, zs, sig, rho, out_py)
        assert np.array_equal(out_nb.view(np.float64), out_py.view(np.float64))

    def test_hmul_kernel_matches_pure_loop(self):
        rng = np.random.default_rng(3)
        for dims in ((2,), (2, 3), (2, 2, 2)):
            n = len(dims)
            shape = dims + dims
            x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            y = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            for mask in range(1 << n):
                lv = tuple(k for k in range(n) if mask >> k & 1)
                got = hmul_kernel(x, y, lv, dims)
                dims_a = np.asarray(dims, np.int64)
                gamma_a = np.asarray(lv, np.int64)
                strides = np.empty(2 * n, np.int64)
                s = 1
                for a in range(2 * n - 1, -1, -1):
                    strides[a] = s
                    s *= dims[a] if a < n else dims[a - n]
                outf = np.zeros(x.size, np.complex128)
                _hmul_loop(x.reshape(-1), y.reshape(-1), outf, dims_a, gamma_a,
                           strides[:n].copy(), strides[n:].copy(), x.size)
                assert np.array_equal(got.reshape(-1).view(np.float64),
                                      outf.view(np.float64)), (dims, lv)

    def test_hmul_against_broadcast_reference(self):
        rng = np.random.default_rng(4)
        dims = (2, 3)
        shape = dims + dims
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        y = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        for mask in range(4):
            lv = tuple(k for k in range(2) if mask >> k & 1)
            got = hmul_kernel(x, y, lv, dims)
            ref = hmul_broadcast_reference(x, y, lv, dims)
            assert np.allclose(got, ref, rtol=1e-13)


class TestExchangeKernel:
    def test_agrees_with_python(self):
        if not _kernels.HAS_NUMBA:
            pytest.skip("single backend")
        rng = np.random.default_rng(5)
        for _ in range(10):
            m = int(rng.integers(2, 8))
            cp = random_partial_table(rng, m, density=0.7)
            cq = random_partial_table(rng, m, density=0.7)
            got = _kernels.exchange_first(cp, cq)
            want = _exchange_first_loop(cp, cq)
            want = None if want[0] < 0 else tuple(int(v) for v in want)
            assert got == want


def test_backend_flag_matches_env(monkeypatch):
    assert _kernels.BACKEND in ("numba", "numpy")
