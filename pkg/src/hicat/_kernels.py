"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import time:

* default: ``numba`` when importable,
* ``HICAT_KERNELS=numpy`` or ``HICAT_NO_NUMBA=1`` in the environment forces
  the fallback.

Both backends accumulate floating-point sums in the same (ascending) order,
so results are bit-identical across backends and across runs.  Composition
tables are dense ``int64`` arrays where ``-1`` marks an undefined composite.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get
_FORCE_NUMPY = _env("HICAT_NO_NUMBA", "") == "1" or _env("HICAT_KERNELS", "").lower() == "numpy"

try:  # pragma: no cover - exercised via the backend-equality tests
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


BACKEND = "numba" if HAS_NUMBA else "numpy"


def apply_thread_cap() -> int | None:
    """Honor HICAT_THREADS by capping numba's worker pool.

    Returns the applied cap, or None when unset / not applicable.  Current
    kernels are sequential, so this only constrains future parallel regions.
    """
    raw = _env("HICAT_THREADS")
    if not raw or not HAS_NUMBA:
        return None
    try:
        cap = max(1, int(raw))
    except ValueError:
        return None
    import numba

    numba.set_num_threads(min(numba.get_num_threads(), cap))
    return cap


# ---------------------------------------------------------------------------
# associativity scan
# ---------------------------------------------------------------------------

def _assoc_scan_loop(comp, out, max_w):
    # out rows: (kind, x, y, z); kind 0 = definedness mismatch, 1 = value mismatch
    m = comp.shape[0]
    n = 0
    for x in range(m):
        for y in range(m):
            xy = comp[x, y]
            for z in range(m):
                yz = comp[y, z]
                lhs = comp[xy, z] if xy >= 0 else -1
                rhs = comp[x, yz] if yz >= 0 else -1
                if (lhs >= 0) != (rhs >= 0):
                    out[n, 0] = 0
                    out[n, 1] = x
                    out[n, 2] = y
                    out[n, 3] = z
                    n += 1
                elif lhs >= 0 and lhs != rhs:
                    out[n, 0] = 1
                    out[n, 1] = x
                    out[n, 2] = y
                    out[n, 3] = z
                    n += 1
                if n >= max_w:
                    return n
    return n


_assoc_scan_nb = njit(cache=True)(_assoc_scan_loop) if HAS_NUMBA else None


def _assoc_scan_numpy(comp, out, max_w):
    # Vectorized per x-slice; witness order matches the loop backend
    # (x ascending, then (y, z) in C order within the slice).
    # np.clip only guards the gather index; undefined (-1) values survive.
    m = comp.shape[0]
    n = 0
    for x in range(m):
        xy = comp[x]                                   # (m,)
        lhs = np.where(xy[:, None] >= 0, comp[np.clip(xy, 0, None)], -1)  # (m, m) over (y, z)
        yz = comp                                      # (m, m) over (y, z)
        rhs = np.where(yz >= 0, comp[x][np.clip(yz, 0, None)], -1)
        bad_def = (lhs >= 0) != (rhs >= 0)
        bad_val = (lhs >= 0) & (rhs >= 0) & (lhs != rhs)
        if not (bad_def.any() or bad_val.any()):
            continue
        ys, zs = np.nonzero(bad_def | bad_val)
        for y, z in zip(ys, zs):
            out[n, 0] = 0 if bad_def[y, z] else 1
            out[n, 1] = x
            out[n, 2] = y
            out[n, 3] = z
            n += 1
            if n >= max_w:
                return n
    return n


def assoc_scan(comp: np.ndarray, max_w: int = 16) -> np.ndarray:
    """Exhaustive associativity scan of one composition table.

    Returns an array of (kind, x, y, z) rows, at most ``max_w`` of them, in
    ascending (x, y, z) order.
    """
    out = np.empty((max_w, 4), dtype=np.int64)
    if HAS_NUMBA:
        n = _assoc_scan_nb(comp, out, max_w)
    else:
        n = _assoc_scan_numpy(comp, out, max_w)
    return out[:n]


# ---------------------------------------------------------------------------
# exchange scans
# ---------------------------------------------------------------------------

def _exchange_first_loop(comp_p, comp_q):
    # First (x, y, w, z) where (x *p y) *q (w *p z) exists but
    # (x *q w) *p (y *q z) is undefined or differs.  -1 sentinel row otherwise.
    m = comp_p.shape[0]
    for x in range(m):
        for y in range(m):
            xy = comp_p[x, y]
            if xy < 0:
                continue
            for w in range(m):
                xw = comp_q[x, w]
                for z in range(m):
                    wz = comp_p[w, z]
                    if wz < 0:
                        continue
                    lhs = comp_q[xy, wz]
                    if lhs < 0:
                        continue
                    if xw < 0:
                        return x, y, w, z
                    yz = comp_q[y, z]
                    if yz < 0:
                        return x, y, w, z
                    rhs = comp_p[xw, yz]
                    if rhs < 0 or rhs != lhs:
                        return x, y, w, z
    return -1, -1, -1, -1


_exchange_first = njit(cache=True)(_exchange_first_loop) if HAS_NUMBA else _exchange_first_loop


def exchange_first(comp_p: np.ndarray, comp_q: np.ndarray):
    res = _exchange_first(comp_p, comp_q)
    return None if res[0] < 0 else tuple(int(v) for v in res)


def _nc_scan_loop(comp_q, comp_p, idents_p, left, out, max_w):
    # For each p-identity e, checks that (left ? e *q - : - *q e) is a
    # homomorphism of the partial monoid (cells, *p).
    # out rows: (code, e, x, y); codes:
    #   0 def_forward, 1 def_backward, 2 image_undefined, 3 compose
    m = comp_q.shape[0]
    n = 0
    for ii in range(idents_p.shape[0]):
        e = idents_p[ii]
        for x in range(m):
            lx = comp_q[e, x] if left else comp_q[x, e]
            if lx < 0:
                continue
            for y in range(m):
                ly = comp_q[e, y] if left else comp_q[y, e]
                if ly < 0:
                    continue
                xy = comp_p[x, y]
                lxy = comp_p[lx, ly]
                if xy >= 0 and lxy < 0:
                    out[n, 0] = 0
                elif xy < 0 and lxy >= 0:
                    out[n, 0] = 1
                elif xy >= 0:
                    img = comp_q[e, xy] if left else comp_q[xy, e]
                    if img < 0:
                        out[n, 0] = 2
                    elif img != lxy:
                        out[n, 0] = 3
                    else:
                        continue
                else:
                    continue
                out[n, 1] = e
                out[n, 2] = x
                out[n, 3] = y
                n += 1
                if n >= max_w:
                    return n
    return n


_nc_scan = njit(cache=True)(_nc_scan_loop) if HAS_NUMBA else _nc_scan_loop


def nc_scan(comp_q: np.ndarray, comp_p: np.ndarray, idents_p: np.ndarray,
            left: bool, max_w: int = 16) -> np.ndarray:
    out = np.empty((max_w, 4), dtype=np.int64)
    n = _nc_scan(comp_q, comp_p, np.asarray(idents_p, dtype=np.int64), left, out, max_w)
    return out[:n]


# ---------------------------------------------------------------------------
# convolution kernels
# ---------------------------------------------------------------------------

def _convolve_scalar_loop(xs, ys, zs, sig, rho, out):
    for t in range(xs.shape[0]):
        out[zs[t]] += sig[xs[t]] * rho[ys[t]]


def _convolve_matrix_loop(xs, ys, zs, sig, rho, out):
    d = sig.shape[1]
    for t in range(xs.shape[0]):
        a = sig[xs[t]]
        b = rho[ys[t]]
        z = zs[t]
        for i in range(d):
            for j in range(d):
                acc = out[z, i, j]
                for k in range(d):
                    acc = acc + a[i, k] * b[k, j]
                out[z, i, j] = acc


convolve_scalar = njit(cache=True)(_convolve_scalar_loop) if HAS_NUMBA else _convolve_scalar_loop
convolve_matrix = njit(cache=True)(_convolve_matrix_loop) if HAS_NUMBA else _convolve_matrix_loop


# ---------------------------------------------------------------------------
# hypermatrix product kernel
# ---------------------------------------------------------------------------

def _hmul_loop(xf, yf, outf, dims, gamma, strides_i, strides_j, total):
    # Flat row-major layout with axis order (i_1..i_n, j_1..j_n).
    # Contraction multi-index iterates lexicographically, lowest level most
    # significant, to match the convolution summation order exactly.
    n = dims.shape[0]
    g = gamma.shape[0]
    idx = np.empty(2 * n, dtype=np.int64)
    o = np.empty(g, dtype=np.int64)
    for flat in range(total):
        # decode flat index (row-major over the 2n axes)
        rem = flat
        for a in range(n):
            idx[a] = rem // strides_i[a]
            rem -= idx[a] * strides_i[a]
        for a in range(n):
            idx[n + a] = rem // strides_j[a]
            rem -= idx[n + a] * strides_j[a]
        acc = 0.0 + 0.0j
        for c in range(g):
            o[c] = 0
        while True:
            xoff = 0
            yoff = 0
            for a in range(n):
                xj = idx[n + a]
                yi = idx[a]
                for c in range(g):
                    if gamma[c] == a:
                        xj = o[c]
                        yi = o[c]
                xoff += idx[a] * strides_i[a] + xj * strides_j[a]
                yoff += yi * strides_i[a] + idx[n + a] * strides_j[a]
            acc = acc + xf[xoff] * yf[yoff]
            if g == 0:
                break
            c = g - 1
            while c >= 0:
                o[c] += 1
                if o[c] < dims[gamma[c]]:
                    break
                o[c] = 0
                c -= 1
            if c < 0:
                break
        outf[flat] = acc


_hmul_impl = njit(cache=True)(_hmul_loop) if HAS_NUMBA else _hmul_loop


def hmul_broadcast_reference(x, y, gamma_levels, dims):
    """Vectorized reference implementation (one broadcast multiply-add per
    contraction multi-index).  Used as an independent cross-check; numpy's
    SIMD complex multiply can differ from the scalar kernels in the last ulp,
    so comparisons against it are approximate."""
    n = len(dims)
    gamma_levels = tuple(sorted(gamma_levels))
    if not gamma_levels:
        return np.asarray(x) * np.asarray(y)
    out = np.zeros(x.shape, dtype=np.complex128)
    ranges = [range(dims[k]) for k in gamma_levels]
    import itertools

    for o in itertools.product(*ranges):
        xsl = [slice(None)] * (2 * n)
        ysl = [slice(None)] * (2 * n)
        for c, k in enumerate(gamma_levels):
            xsl[n + k] = o[c]
            ysl[k] = o[c]
        xs = np.expand_dims(x[tuple(xsl)], axis=tuple(n + k for k in gamma_levels))
        yss = np.expand_dims(y[tuple(ysl)], axis=tuple(gamma_levels))
        out += xs * yss
    return out


def hmul_kernel(x: np.ndarray, y: np.ndarray, gamma_levels: tuple[int, ...],
                dims: tuple[int, ...]) -> np.ndarray:
    """Mixed convolution/Schur product over the levels in ``gamma_levels``.

    ``x`` and ``y`` have shape ``dims + dims``; levels are 0-based here.
    Both backends run the same scalar loop (jitted when numba is available),
    so the term order and multiply semantics match the convolution kernels
    exactly.
    """
    n = len(dims)
    dims_a = np.asarray(dims, dtype=np.int64)
    gamma_a = np.asarray(sorted(gamma_levels), dtype=np.int64)
    strides = np.empty(2 * n, dtype=np.int64)
    s = 1
    for a in range(2 * n - 1, -1, -1):
        strides[a] = s
        s *= dims[a] if a < n else dims[a - n]
    strides_i = strides[:n].copy()
    strides_j = strides[n:].copy()
    xf = np.ascontiguousarray(x).reshape(-1)
    yf = np.ascontiguousarray(y).reshape(-1)
    outf = np.zeros(xf.shape[0], dtype=np.complex128)
    _hmul_impl(xf, yf, outf, dims_a, gamma_a, strides_i, strides_j, xf.shape[0])
    return outf.reshape(x.shape)
