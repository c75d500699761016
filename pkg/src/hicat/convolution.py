"""Sections of the trivial coefficient bundle over a finite base category and
their convolution algebra.

A section assigns a coefficient element to every base cell.  Convolution at a
base composition sums sigma_x * rho_y over all factorizations x ∘ y = z, in
ascending (x, y) cell order, which keeps floating-point results bit-stable
and matches the hypermatrix product order exactly.  Lifted involutions pull
back along the base involution and apply the assigned coefficient involution.

The embedded category (one coefficient on one delta) is materialized as a
finite table category over any finite multiplicative generator monoid; its
tables are computed by real convolutions, so the exchange checks run on the
genuine structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import convolve_matrix, convolve_scalar
from .coeff import ComplexField, CovarianceAssignment, MatrixAlgebra, is_commutative
from .errors import HicatError, UnassignedVariance, UnsupportedCoefficient
from .ncat import (FiniteGlobularCategory, FullDepthCategory,
                   check_exchange, check_nc_exchange, validate_globular,
                   validate_partial_category)
from .report import ValidationReport


@dataclass(frozen=True)
class Section:
    base_cells: int
    data: np.ndarray  # (m,) complex, (m,d,d) complex, or (m,) object

    def __post_init__(self):
        a = self.data
        if not isinstance(a, np.ndarray) or a.shape[0] != self.base_cells:
            raise HicatError("section data must be an array over the base cells")
        if a.dtype != object:
            a = np.array(a, np.complex128, order="C")
            if not np.all(np.isfinite(a)):
                raise HicatError("non-finite section entries")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)


class ConvolutionAlgebra:
    """Convolution structure over a finite base with a coefficient system.

    ``involutions`` maps an involution id to its base InvolutionSpec;
    ``assignment`` (a CovarianceAssignment) picks the coefficient product for
    each base composition and the coefficient involution for each involution
    id.  When omitted, everything is routed to the system's first product and
    first involution (the single-product single-involution situation).
    """

    def __init__(self, base, coeff, involutions=None,
                 assignment: CovarianceAssignment | None = None):
        self.base = base
        self.coeff = coeff
        self.involutions = dict(involutions or {})
        if assignment is None:
            pm = {key: 0 for key in self._comp_keys()}
            im = {name: 0 for name in self.involutions}
            assignment = CovarianceAssignment(pm, im, {})
        self.assignment = assignment
        self._triples = {}

    def _comp_keys(self):
        if isinstance(self.base, FullDepthCategory):
            return list(range(1 << self.base.directions))
        return list(range(self.base.depth))

    def triples(self, key):
        """(xs, ys, zs) with comp[key][x, y] = z, ascending (x, y)."""
        if key not in self._triples:
            comp = self.base.comp[key]
            xs, ys = np.nonzero(comp >= 0)
            self._triples[key] = (xs.astype(np.int64), ys.astype(np.int64),
                                  comp[xs, ys].astype(np.int64))
        return self._triples[key]

    @property
    def cell_count(self):
        return self.base.cell_count

    def coeff_kind(self):
        if isinstance(self.coeff, ComplexField):
            return "scalar"
        if isinstance(self.coeff, MatrixAlgebra):
            return "matrix"
        return "object"

    def zero_section(self) -> Section:
        m = self.cell_count
        kind = self.coeff_kind()
        if kind == "scalar":
            return Section(m, np.zeros(m, np.complex128))
        if kind == "matrix":
            d = self.coeff.dim
            return Section(m, np.zeros((m, d, d), np.complex128))
        data = np.empty(m, object)
        for i in range(m):
            data[i] = self.coeff.zero
        return Section(m, data)


def delta(alg: ConvolutionAlgebra, x: int) -> Section:
    """The section with the coefficient unit at cell x and zero elsewhere."""
    u = alg.coeff.common_unit
    if u is None:
        raise UnsupportedCoefficient(
            "delta sections need a common unit across the coefficient products")
    return embed(alg, u, x)


def embed(alg: ConvolutionAlgebra, a, x: int) -> Section:
    sec = alg.zero_section()
    data = sec.data.copy() if sec.data.dtype != object else sec.data
    if data.dtype == object:
        data = data.copy()
        data[x] = a
    else:
        data[x] = a if alg.coeff_kind() != "matrix" else np.asarray(a, np.complex128)
    return Section(alg.cell_count, data)


def identity_section(alg: ConvolutionAlgebra, key) -> Section:
    """Sum of deltas over the identities of one base composition: the
    two-sided unit of that convolution."""
    ids = alg.base.identities(key)
    sec = alg.zero_section()
    data = sec.data.copy()
    u = alg.coeff.common_unit
    if u is None:
        raise UnsupportedCoefficient("identity section needs a common unit")
    for e in ids:
        data[e] = u
    return Section(alg.cell_count, data)


def add(alg: ConvolutionAlgebra, s: Section, t: Section) -> Section:
    if s.data.dtype == object:
        data = np.empty(alg.cell_count, object)
        for i in range(alg.cell_count):
            data[i] = alg.coeff.add(s.data[i], t.data[i])
        return Section(alg.cell_count, data)
    return Section(alg.cell_count, s.data + t.data)


def scale(alg: ConvolutionAlgebra, c, s: Section) -> Section:
    if s.data.dtype == object:
        data = np.empty(alg.cell_count, object)
        for i in range(alg.cell_count):
            data[i] = alg.coeff.scalar_mul(c, s.data[i])
        return Section(alg.cell_count, data)
    return Section(alg.cell_count, c * s.data)


def convolve(alg: ConvolutionAlgebra, key, sigma: Section, rho: Section) -> Section:
    """(sigma ∘̂ rho)_z = sum over x ∘ y = z of sigma_x * rho_y.

    The sum runs in ascending (x, y) order; empty sums give zero.
    """
    xs, ys, zs = alg.triples(key)
    kind = alg.coeff_kind()
    if kind == "scalar":
        out = np.zeros(alg.cell_count, np.complex128)
        convolve_scalar(xs, ys, zs, sigma.data, rho.data, out)
        return Section(alg.cell_count, out)
    if kind == "matrix":
        d = alg.coeff.dim
        out = np.zeros((alg.cell_count, d, d), np.complex128)
        convolve_matrix(xs, ys, zs, sigma.data, rho.data, out)
        return Section(alg.cell_count, out)
    k = alg.assignment.product_map.get(key, 0)
    out = np.empty(alg.cell_count, object)
    for i in range(alg.cell_count):
        out[i] = alg.coeff.zero
    for x, y, z in zip(xs, ys, zs):
        out[z] = alg.coeff.add(out[z], alg.coeff.product(k, sigma.data[x], rho.data[y]))
    return Section(alg.cell_count, out)


def involve(alg: ConvolutionAlgebra, inv_id, sigma: Section) -> Section:
    """(sigma^*)_z = coefficient-involution(sigma at the base-involuted cell)."""
    if inv_id not in alg.involutions:
        raise UnassignedVariance(inv_id)
    spec = alg.involutions[inv_id]
    if inv_id in alg.assignment.involution_map:
        j = alg.assignment.involution_map[inv_id]
    elif len(alg.coeff.involution_names) == 1:
        j = 0
    else:
        raise UnassignedVariance(inv_id)
    perm = spec.map
    kind = alg.coeff_kind()
    if kind == "scalar":
        return Section(alg.cell_count, np.conjugate(sigma.data[perm]))
    if kind == "matrix":
        return Section(alg.cell_count, np.conjugate(np.transpose(sigma.data[perm], (0, 2, 1))))
    data = np.empty(alg.cell_count, object)
    for z in range(alg.cell_count):
        data[z] = alg.coeff.involution(j, sigma.data[perm[z]])
    return Section(alg.cell_count, data)


def left_regular_rep(alg: ConvolutionAlgebra, key, sigma: Section) -> np.ndarray:
    """Matrix of v -> sigma ∘̂ v on the direct sum of one coefficient column
    space per base cell; block (z, y) accumulates left multiplication by
    sigma_x over all x with x ∘ y = z."""
    kind = alg.coeff_kind()
    xs, ys, zs = alg.triples(key)
    m = alg.cell_count
    if kind == "scalar":
        lam = np.zeros((m, m), np.complex128)
        np.add.at(lam, (zs, ys), sigma.data[xs])
        return lam
    if kind == "matrix":
        d = alg.coeff.dim
        lam = np.zeros((m, d, m, d), np.complex128)
        for x, y, z in zip(xs, ys, zs):
            lam[z, :, y, :] += sigma.data[x]
        return lam.reshape(m * d, m * d)
    raise UnsupportedCoefficient("regular representation needs scalar or matrix coefficients")


def conv_norm(alg: ConvolutionAlgebra, key, sigma: Section) -> float:
    """Operator norm of the left regular representation at one composition."""
    lam = left_regular_rep(alg, key, sigma)
    if lam.size == 0:
        return 0.0
    return float(np.linalg.svd(lam, compute_uv=False)[0])


# ---------------------------------------------------------------------------
# the embedded category of one-fiber sections
# ---------------------------------------------------------------------------

def matrix_unit_generators(d: int):
    """The finite multiplicative monoid {0, 1, E_ij} of MatrixAlgebra(d)."""
    elems = [np.zeros((d, d), np.complex128), np.eye(d, dtype=np.complex128)]
    names = ["0", "1"]
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), np.complex128)
            e[i, j] = 1.0
            elems.append(e)
            names.append(f"E{i + 1}{j + 1}")
    return elems, names


def scalar_generators():
    return [0.0 + 0.0j, 1.0 + 0.0j], ["0", "1"]


def default_generators(coeff):
    if isinstance(coeff, ComplexField):
        return scalar_generators()
    if isinstance(coeff, MatrixAlgebra):
        return matrix_unit_generators(coeff.dim)
    raise UnsupportedCoefficient("supply an explicit finite generator monoid")


def embedded_table_category(alg: ConvolutionAlgebra, generators=None, names=None):
    """The one-fiber sections a·delta^x over a finite coefficient monoid, as a
    finite globular category.

    Cells are (base cell, generator) pairs; (x,a) ∘_p (y,b) = (x ∘_p y, a·b)
    exactly when the base composition is defined; the p-identities are the
    pairs (base p-identity, coefficient unit).  The generator list must be
    closed under multiplication and contain zero and the unit.
    """
    if not isinstance(alg.base, FiniteGlobularCategory):
        raise HicatError("embedded table category needs a globular base")
    if generators is None:
        generators, names = default_generators(alg.coeff)
    if names is None:
        names = [f"g{i}" for i in range(len(generators))]
    coeff = alg.coeff
    g = len(generators)

    def find(val):
        for idx, cand in enumerate(generators):
            if np.array_equal(np.asarray(cand, np.complex128), np.asarray(val, np.complex128)):
                return idx
        return -1

    unit_idx = find(coeff.common_unit)
    if unit_idx < 0:
        raise HicatError("generator monoid must contain the coefficient unit")
    mul = np.empty((g, g), np.int64)
    for i in range(g):
        for j in range(g):
            mul[i, j] = find(coeff.product(0, generators[i], generators[j]))
            if mul[i, j] < 0:
                raise HicatError("generator list is not closed under multiplication")
    base = alg.base
    mb = base.cell_count
    m = mb * g
    depth = base.depth
    ident = np.zeros((depth, m), bool)
    src = np.zeros((depth, m), np.int64)
    tgt = np.zeros((depth, m), np.int64)
    comp = np.full((depth, m, m), -1, np.int64)
    cell_names = []
    for x in range(mb):
        for a in range(g):
            c = x * g + a
            cell_names.append(f"{base.cell_name(x)}|{names[a]}")
            for p in range(depth):
                ident[p, c] = base.is_identity[p, x] and a == unit_idx
                src[p, c] = int(base.source[p, x]) * g + unit_idx
                tgt[p, c] = int(base.target[p, x]) * g + unit_idx
    for p in range(depth):
        bx, by = np.nonzero(base.comp[p] >= 0)
        for x, y in zip(bx, by):
            z = base.comp[p, x, y]
            for a in range(g):
                for b in range(g):
                    comp[p, x * g + a, y * g + b] = z * g + mul[a, b]
    return FiniteGlobularCategory(depth, m, ident, src, tgt, comp, tuple(cell_names)), generators, names


def validate_embedded_category(alg: ConvolutionAlgebra, generators=None, names=None,
                               *, budget=None) -> ValidationReport:
    """Certify that the one-fiber sections form a strict globular category
    under convolution, with non-commutative exchange.

    Checks closure of {a·delta^x} under every convolution against the base
    composability pattern (by real convolutions, exact), the 1-category and
    globularity laws of the induced tables, non-commutative exchange, and the
    presence (noncommutative coefficients) or absence (commutative) of a
    classical exchange counterexample.
    """
    rep = ValidationReport()
    cat, gens, gnames = embedded_table_category(alg, generators, names)
    base = alg.base
    g = len(gens)
    # closure against real convolutions on every composition
    for p in range(base.depth):
        for x in range(base.cell_count):
            for a_idx, a in enumerate(gens):
                sa = embed(alg, a, x)
                for y in range(base.cell_count):
                    for b_idx, b in enumerate(gens):
                        sb = embed(alg, b, y)
                        got = convolve(alg, p, sa, sb)
                        z = base.comp[p, x, y]
                        if z >= 0:
                            want = embed(alg, alg.coeff.product(0, a, b), int(z))
                        else:
                            want = alg.zero_section()
                        if not np.array_equal(np.asarray(got.data, np.complex128),
                                              np.asarray(want.data, np.complex128)):
                            law = "embed.closure" if z >= 0 else "embed.zero"
                            rep.add(law, f"p={p}", (x, a_idx, y, b_idx))
    for p in range(cat.depth):
        rep.merge(validate_partial_category(cat, p, budget=budget))
    rep.merge(validate_globular(cat, budget=budget))
    if cat.depth >= 2:
        rep.merge(check_nc_exchange(cat, budget=budget))
        commutative, _w = is_commutative(alg.coeff)
        witness = check_exchange(cat, budget=budget)
        if commutative and witness is not None:
            rep.add("embed.exchange_unexpected", "-", witness)
        if not commutative and witness is None:
            rep.add("embed.exchange_witness_missing", "-", ())
    return rep


def exchange_witness(alg: ConvolutionAlgebra, generators=None, names=None, *, budget=None):
    """First classical-exchange counterexample among embedded cells, as
    ((x,a),(y,b),(w,c),(z,d),p,q) with named cells; None if exchange holds."""
    cat, _gens, _names = embedded_table_category(alg, generators, names)
    hit = check_exchange(cat, budget=budget)
    if hit is None:
        return None
    x, y, w, z, p, q = hit
    return hit, tuple(cat.cell_name(c) for c in (x, y, w, z))
