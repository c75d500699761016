#!/usr/bin/env python3
"""Benchmark the numba kernels against their fallback twins.

The fallback paths are what you get with HICAT_NO_NUMBA=1: the vectorized
numpy associativity scan and the pure-python scalar loops (kept loop-for-loop
identical to the jitted kernels so results match bit for bit).

Usage: python benchmarks/bench_kernels.py [--cells 192] [--repeat 3]
"""

import argparse
import time

import numpy as np

from hicat import _kernels
from hicat._kernels import (_assoc_scan_loop, _assoc_scan_numpy,
                            _convolve_scalar_loop, _hmul_loop)
from hicat.ncat import build_pair_groupoid


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_assoc(m, repeat):
    rng = np.random.default_rng(0)
    n_points = int(np.sqrt(m))
    comp = np.array(build_pair_groupoid(n_points).comp[0])
    out = np.empty((16, 4), np.int64)
    rows = {}
    if _kernels.HAS_NUMBA:
        jit = _kernels._assoc_scan_nb
        jit(comp, out, 16)  # warm up
        rows["numba"] = timeit(lambda: jit(comp, out, 16), repeat)
    rows["numpy"] = timeit(lambda: _assoc_scan_numpy(comp, out, 16), repeat)
    if comp.shape[0] <= 128:
        rows["python"] = timeit(lambda: _assoc_scan_loop(comp, out, 16), repeat)
    return f"assoc scan ({comp.shape[0]} cells, O(m^3))", rows


def bench_convolve(m, repeat):
    rng = np.random.default_rng(1)
    t = m * 8
    sig = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    rho = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    xs = rng.integers(0, m, t)
    ys = rng.integers(0, m, t)
    zs = rng.integers(0, m, t)
    out = np.zeros(m, np.complex128)
    rows = {}
    if _kernels.HAS_NUMBA:
        jit = _kernels.convolve_scalar
        jit(xs, ys, zs, sig, rho, out)
        rows["numba"] = timeit(lambda: jit(xs, ys, zs, sig, rho, out), repeat)
    rows["python"] = timeit(lambda: _convolve_scalar_loop(xs, ys, zs, sig, rho, out),
                            repeat)
    return f"convolve ({t} composable pairs)", rows


def bench_hmul(dims, gamma, repeat):
    rng = np.random.default_rng(2)
    n = len(dims)
    shape = tuple(dims) + tuple(dims)
    x = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)).reshape(-1)
    y = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)).reshape(-1)
    outf = np.zeros(x.size, np.complex128)
    dims_a = np.asarray(dims, np.int64)
    gamma_a = np.asarray([k - 1 for k in gamma], np.int64)
    strides = np.empty(2 * n, np.int64)
    s = 1
    for a in range(2 * n - 1, -1, -1):
        strides[a] = s
        s *= dims[a] if a < n else dims[a - n]
    si, sj = strides[:n].copy(), strides[n:].copy()
    rows = {}
    if _kernels.HAS_NUMBA:
        jit = _kernels._hmul_impl
        jit(x, y, outf, dims_a, gamma_a, si, sj, x.size)
        rows["numba"] = timeit(lambda: jit(x, y, outf, dims_a, gamma_a, si, sj, x.size),
                               repeat)
    rows["python"] = timeit(lambda: _hmul_loop(x, y, outf, dims_a, gamma_a, si, sj,
                                               x.size), repeat)
    return f"hmul dims={dims} gamma={set(gamma)} ({x.size} entries)", rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=196)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {_kernels.BACKEND}")
    benches = [bench_assoc(args.cells, args.repeat),
               bench_convolve(args.cells, args.repeat),
               bench_hmul((4, 4), (1,), args.repeat),
               bench_hmul((4, 4), (1, 2), args.repeat)]
    for label, rows in benches:
        print(f"\n{label}")
        base = rows.get("numba")
        for name in ("numba", "numpy", "python"):
            if name not in rows:
                continue
            line = f"  {name:7s} {rows[name] * 1e3:10.3f} ms"
            if base is not None and name != "numba" and base > 0:
                line += f"   ({rows[name] / base:8.1f}x numba)"
            print(line)


if __name__ == "__main__":
    main()
