"""Depth-n hypermatrices: 2^n products, involutions and C*-norms, and the
exact correspondence with convolution over a product of pair groupoids.

A hypermatrix of dims (N_1..N_n) is a dense complex array of shape
dims + dims, axes ordered (i_1..i_n, j_1..j_n), row-major.  For a level set
``gamma`` (1-based levels):

* ``hmul(gamma, x, y)`` contracts (matrix-multiplies) the levels in gamma and
  takes the Schur product at every other level,
* ``hinvol(gamma, x)`` conjugates entries and transposes the levels in gamma,
* ``hnorm(gamma, x)`` is the C*-norm of (hmul(gamma), hinvol(gamma)): the max
  over all off-gamma index assignments of the operator norm of the gamma-level
  slice; the max entry modulus when gamma is empty.

Under the entrywise bijection with sections over the product of pair
groupoids, hmul(gamma) is the full-depth convolution that holds the
complementary directions fixed, with the same summation order, so the two
sides agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import hmul_kernel
from .coeff import BOTH, CONTRAVARIANT, COVARIANT, NEITHER, close
from .errors import DimMismatch, HicatError


@dataclass(frozen=True)
class Hypermatrix:
    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        a = np.asarray(self.data, np.complex128)
        if a.shape != dims + dims:
            raise DimMismatch(f"expected shape {dims + dims}, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise HicatError("non-finite hypermatrix entries")
        a = np.array(a, copy=True, order="C")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def depth(self) -> int:
        return len(self.dims)


def zeros(dims) -> Hypermatrix:
    dims = tuple(dims)
    return Hypermatrix(dims, np.zeros(dims + dims, np.complex128))


def _levels(gamma, n: int) -> tuple[int, ...]:
    """Validate 1-based levels, return sorted 0-based tuple."""
    lv = sorted(set(int(k) for k in gamma))
    for k in lv:
        if not 1 <= k <= n:
            raise HicatError(f"level {k} outside 1..{n}")
    return tuple(k - 1 for k in lv)


def _match(x: Hypermatrix, y: Hypermatrix):
    if x.dims != y.dims:
        raise DimMismatch(f"dims {x.dims} vs {y.dims}")


def hmul(gamma, x: Hypermatrix, y: Hypermatrix) -> Hypermatrix:
    """Product contracting the levels in gamma, Schur elsewhere."""
    _match(x, y)
    lv = _levels(gamma, x.depth)
    out = hmul_kernel(x.data, y.data, lv, x.dims)
    return Hypermatrix(x.dims, out)


def hinvol(gamma, x: Hypermatrix) -> Hypermatrix:
    """Conjugate entries; swap row/column indices at the levels in gamma."""
    lv = _levels(gamma, x.depth)
    n = x.depth
    axes = list(range(2 * n))
    for k in lv:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return Hypermatrix(x.dims, np.conjugate(np.transpose(x.data, axes)))


def unit(gamma, dims) -> Hypermatrix:
    """Two-sided unit of hmul(gamma): Kronecker delta at gamma levels,
    constant one elsewhere, combined multiplicatively."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    lv = set(_levels(gamma, n))
    out = np.ones(dims + dims, np.complex128)
    for k, d in enumerate(dims):
        f = np.eye(d) if k in lv else np.ones((d, d))
        shape = [1] * (2 * n)
        shape[k] = d
        shape[n + k] = d
        out = out * f.reshape(shape)
    return Hypermatrix(dims, out)


def hnorm(gamma, x: Hypermatrix) -> float:
    """Max over off-gamma slices of the slice operator norm."""
    n = x.depth
    lv = _levels(gamma, x.depth)
    if not np.all(np.isfinite(x.data)):
        raise HicatError("non-finite entries")
    if not lv:
        return float(np.max(np.abs(x.data), initial=0.0))
    off = [k for k in range(n) if k not in lv]
    order = ([k for k in off] + [n + k for k in off]
             + [k for k in lv] + [n + k for k in lv])
    d_gamma = int(np.prod([x.dims[k] for k in lv]))
    moved = np.transpose(x.data, order).reshape(-1, d_gamma, d_gamma)
    sv = np.linalg.svd(moved, compute_uv=False)
    return float(np.max(sv, initial=0.0))


# ---------------------------------------------------------------------------
# correspondence with the product-of-pair-groupoids convolution
# ---------------------------------------------------------------------------

def section_from_hyper(x: Hypermatrix) -> np.ndarray:
    """Flat section over the product of pair groupoids of sizes ``dims``.

    Product cell ((i_1,j_1),..,(i_n,j_n)) has index sum over k of
    (i_k*N_k + j_k) * stride_k, first factor most significant, matching
    ncat.build_product.
    """
    n = x.depth
    perm = [a for k in range(n) for a in (k, n + k)]
    return np.ascontiguousarray(np.transpose(x.data, perm)).reshape(-1)


def hyper_from_section(sec: np.ndarray, dims) -> Hypermatrix:
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    inter = tuple(v for d in dims for v in (d, d))
    sec = np.asarray(sec, np.complex128)
    if sec.shape != (int(np.prod(inter)),):
        raise DimMismatch(f"section length {sec.shape} does not match dims {dims}")
    arr = sec.reshape(inter)
    perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return Hypermatrix(dims, np.transpose(arr, perm))


def contraction_to_held(gamma, n: int):
    """Contracted levels -> the directions the matching convolution holds fixed."""
    lv = set(_levels(gamma, n))
    return tuple(k + 1 for k in range(n) if k not in lv)


# ---------------------------------------------------------------------------
# text import/export
# ---------------------------------------------------------------------------

def save_hyper(path_or_file, x: Hypermatrix) -> None:
    def emit(fh):
        fh.write(f"hyper {x.depth} {' '.join(str(d) for d in x.dims)}\n")
        n = x.depth
        for idx in np.ndindex(*x.data.shape):
            v = x.data[idx]
            if v == 0:
                continue
            ii = " ".join(str(idx[k] + 1) for k in range(n))
            jj = " ".join(str(idx[n + k] + 1) for k in range(n))
            fh.write(f"{ii} {jj} {float(v.real)!r} {float(v.imag)!r}\n")

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w") as fh:
            emit(fh)


def load_hyper(path) -> Hypermatrix:
    from .errors import SpecFileError

    with open(path) as fh:
        lines = fh.readlines()
    header = None
    dims = None
    data = None
    n = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if header is None:
            if toks[0] != "hyper" or len(toks) < 2:
                raise SpecFileError(path, lineno, "expected header 'hyper n N_1 .. N_n'")
            try:
                n = int(toks[1])
                dims = tuple(int(t) for t in toks[2:])
            except ValueError:
                raise SpecFileError(path, lineno, "bad integer in header") from None
            if len(dims) != n or n < 1 or any(d < 1 for d in dims):
                raise SpecFileError(path, lineno, "header dims do not match level count")
            data = np.zeros(dims + dims, np.complex128)
            header = True
            continue
        if len(toks) != 2 * n + 2:
            raise SpecFileError(path, lineno, f"expected {2 * n + 2} fields, got {len(toks)}")
        try:
            idx = tuple(int(t) - 1 for t in toks[:2 * n])
            re_v, im_v = float(toks[2 * n]), float(toks[2 * n + 1])
        except ValueError:
            raise SpecFileError(path, lineno, "bad number") from None
        for k in range(2 * n):
            if not 0 <= idx[k] < dims[k % n]:
                raise SpecFileError(path, lineno, f"index {idx[k] + 1} out of range")
        data[idx] = complex(re_v, im_v)
    if header is None:
        raise SpecFileError(path, 0, "empty hypermatrix file")
    return Hypermatrix(dims, data)


# ---------------------------------------------------------------------------
# hypermatrices as a coefficient system
# ---------------------------------------------------------------------------

class HypermatrixSystem:
    """All 2^n products and involutions of fixed-dims hypermatrices, as a
    multi-product multi-involution coefficient system.

    The covariance of (hmul(g), hinvol(s)) is contravariant when g is inside
    s, covariant when they are disjoint, both when g is empty and mixed
    (usable for neither variance) otherwise.  The products have distinct
    units in general, so there is usually no common unit.
    """

    tol = 1e-12

    def __init__(self, dims):
        self.dims = tuple(int(d) for d in dims)
        self.n = len(self.dims)
        masks = list(range(1 << self.n))
        self._masks = masks
        self.product_names = tuple(f"mul{{{self._mask_str(g)}}}" for g in masks)
        self.involution_names = tuple(f"star{{{self._mask_str(g)}}}" for g in masks)

    def _mask_str(self, mask):
        return ",".join(str(k + 1) for k in range(self.n) if mask >> k & 1)

    def _mask_levels(self, mask):
        return [k + 1 for k in range(self.n) if mask >> k & 1]

    def product(self, k, a, b):
        return hmul(self._mask_levels(self._masks[k]), a, b)

    def involution(self, j, a):
        return hinvol(self._mask_levels(self._masks[j]), a)

    def unit(self, k):
        return unit(self._mask_levels(self._masks[k]), self.dims)

    @property
    def common_unit(self):
        units = [self.unit(k) for k in range(len(self._masks))]
        first = units[0]
        if all(np.array_equal(u.data, first.data) for u in units[1:]):
            return first
        return None

    @property
    def zero(self):
        return zeros(self.dims)

    def add(self, a, b):
        return Hypermatrix(self.dims, a.data + b.data)

    def scalar_mul(self, c, a):
        return Hypermatrix(self.dims, c * a.data)

    def covariance(self, k, j):
        g, s = self._masks[k], self._masks[j]
        if g == 0:
            return BOTH
        if g & s == g:
            return CONTRAVARIANT
        if g & s == 0:
            return COVARIANT
        return NEITHER

    def basis(self):
        out = []
        shape = self.dims + self.dims
        for idx in np.ndindex(*shape):
            e = np.zeros(shape, np.complex128)
            e[idx] = 1.0
            out.append(Hypermatrix(self.dims, e))
        return out

    def sample(self, rng):
        shape = self.dims + self.dims
        return Hypermatrix(self.dims,
                           (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
                           / np.sqrt(2))

    def eq(self, a, b):
        return close(a.data, b.data, self.tol)

    def describe(self):
        return f"hyper{self.dims}"
