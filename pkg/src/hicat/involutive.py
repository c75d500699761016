"""Involutions with declared variance, conjugation data and folding calculus.

An involution is a cell permutation together with the set of compositions for
which it is contravariant.  On a globular category the variance is a set of
depths; on a full-depth category it is a set of direction-subset bitmasks,
and a second explicit set lists the compositions for which covariance is
checked (a product-groupoid involution is genuinely neither co- nor
contravariant for the remaining mixed compositions, which are skipped).

Conjugation data lives on a depth-2 base with an involution over 1-arrows.
The tensor product is the reversed composition over objects, x ⊗ y = y ∘_0 x,
so only one composition table is stored and the reversal happens here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HicatError, MissingConjugate, NonCommutingFamily, NotComposable
from .ncat import FiniteGlobularCategory, FullDepthCategory
from .report import ValidationReport


@dataclass(frozen=True)
class InvolutionSpec:
    """A total cell map with declared variance.

    ``variance`` holds the compositions (depths, or subset bitmasks for
    full-depth bases) for which the map is contravariant; ``covariant``
    optionally restricts the compositions checked for covariance (default:
    every other composition).
    """

    variance: frozenset
    map: np.ndarray
    hermitian: bool = False
    covariant: frozenset | None = None
    name: str = "*"

    def __post_init__(self):
        m = np.array(np.asarray(self.map, np.int64), copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "map", m)
        object.__setattr__(self, "variance", frozenset(self.variance))
        if self.covariant is not None:
            object.__setattr__(self, "covariant", frozenset(self.covariant))


def _comp_keys(cat):
    if isinstance(cat, FullDepthCategory):
        return list(range(1 << cat.directions))
    return list(range(cat.depth))


def _where(cat, key):
    if isinstance(cat, FullDepthCategory):
        from .ncat import mask_levels

        return f"gamma={{{','.join(map(str, mask_levels(key)))}}}"
    return f"p={key}"


def validate_involution(cat, inv: InvolutionSpec, family=(), *,
                        max_witnesses: int = 16) -> ValidationReport:
    """Exhaustive table check of the involution axioms.

    Checks involutivity, co/contravariance (with definedness both ways),
    identity preservation at every composition, the Hermitian condition when
    requested, and pairwise commutation against ``family``.
    """
    rep = ValidationReport()
    mw = max_witnesses
    M = inv.map
    m = cat.cell_count
    arange = np.arange(m)
    if M.shape != (m,) or not np.array_equal(np.sort(M), arange):
        rep.add("inv.bijection", "-", ())
        return rep
    bad = np.nonzero(M[M] != arange)[0]
    for x in bad[:mw]:
        rep.add("inv.involutive", "-", (x,))
    keys = _comp_keys(cat)
    cov_keys = inv.covariant
    if cov_keys is None:
        cov_keys = frozenset(keys) - inv.variance
    for key in keys:
        A = cat.comp[key]
        is_id = cat.is_identity[key]
        where = _where(cat, key)
        perm = A[np.ix_(M, M)]
        if key in inv.variance:
            C = perm.T  # C[x, y] = A[M[y], M[x]]
            def_law, eq_law = "inv.contravariant_def", "inv.contravariant_eq"
        elif key in cov_keys:
            C = perm
            def_law, eq_law = "inv.covariant_def", "inv.covariant_eq"
        else:
            C = None
        if C is not None:
            defA, defC = A >= 0, C >= 0
            bad_x, bad_y = np.nonzero(defA != defC)
            for x, y in zip(bad_x[:mw], bad_y[:mw]):
                rep.add(def_law, where, (x, y))
            both = defA & defC
            lhs = np.where(both, M[np.where(defA, A, 0)], -1)
            bad_x, bad_y = np.nonzero(both & (lhs != np.where(both, C, -1)))
            for x, y in zip(bad_x[:mw], bad_y[:mw]):
                rep.add(eq_law, where, (x, y))
        ids = np.nonzero(is_id)[0]
        bad = ids[~is_id[M[ids]]]
        for x in bad[:mw]:
            rep.add("inv.identity", where, (x,))
        if inv.hermitian and key in inv.variance:
            bad = ids[M[ids] != ids]
            for x in bad[:mw]:
                rep.add("inv.hermitian", where, (x,))
    for other in family:
        if other is inv:
            continue
        N = other.map
        bad = np.nonzero(M[N] != N[M])[0]
        for x in bad[:mw]:
            rep.add("inv.commute", f"with={other.name}", (x,))
    return rep


@dataclass(frozen=True)
class InvolutionGroup:
    """Subgroup of the power set under symmetric difference, with its maps."""

    elements: dict  # frozenset -> np.ndarray cell map
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def delta_table(self):
        keys = sorted(self.elements, key=lambda s: (len(s), sorted(s)))
        return {(a, b): frozenset(a ^ b) for a in keys for b in keys}


def generated_involution_group(cat, family) -> InvolutionGroup:
    """Close a commuting family under composition.

    The composite of *_a and *_b realizes *_{a Δ b}; the closure is the
    subgroup of (P(compositions), Δ) generated by the variances.  Raises
    NonCommutingFamily if two members fail to commute, and flags an
    inconsistent family (same variance, different map) as an error.
    """
    family = list(family)
    m = cat.cell_count
    arange = np.arange(m, dtype=np.int64)
    for i, a in enumerate(family):
        for b in family[i + 1:]:
            bad = np.nonzero(a.map[b.map] != b.map[a.map])[0]
            if bad.size:
                raise NonCommutingFamily(a.variance, b.variance, int(bad[0]))
    elements: dict = {frozenset(): arange}
    for inv in family:
        key = frozenset(inv.variance)
        if key in elements and not np.array_equal(elements[key], inv.map):
            raise HicatError(f"two involutions with variance {set(key)} disagree")
        elements[key] = inv.map
    frontier = True
    while frontier:
        frontier = False
        current = list(elements.items())
        for ka, ma in current:
            for kb, mb in current:
                kc = ka ^ kb
                mc = ma[mb]
                if kc in elements:
                    if not np.array_equal(elements[kc], mc):
                        raise HicatError(
                            f"inconsistent closure: two factorizations of variance {set(kc)} disagree")
                else:
                    elements[kc] = mc
                    frontier = True
    return InvolutionGroup(elements, tuple(family))


def validate_functor(dom: FiniteGlobularCategory, cod: FiniteGlobularCategory,
                     fmap: np.ndarray, variance=frozenset(), *,
                     max_witnesses: int = 16) -> ValidationReport:
    """Covariance (or declared contravariance) of a cell map between categories.

    One-directional definedness: whenever x ∘_q y exists the image composite
    must exist and match.
    """
    rep = ValidationReport()
    mw = max_witnesses
    F = np.asarray(fmap, np.int64)
    if dom.depth != cod.depth:
        rep.add("functor.depth", "-", (dom.depth, cod.depth))
        return rep
    variance = frozenset(variance)
    for q in range(dom.depth):
        A, B = dom.comp[q], cod.comp[q]
        where = f"p={q}"
        dx, dy = np.nonzero(A >= 0)
        img = B[F[dy], F[dx]] if q in variance else B[F[dx], F[dy]]
        bad = img < 0
        for x, y in zip(dx[bad][:mw], dy[bad][:mw]):
            rep.add("functor.def", where, (x, y))
        good = ~bad
        mism = F[A[dx, dy]] != img
        for x, y in zip(dx[good & mism][:mw], dy[good & mism][:mw]):
            rep.add("functor.eq", where, (x, y))
        ids = np.nonzero(dom.is_identity[q])[0]
        bad = ids[~cod.is_identity[q][F[ids]]]
        for e in bad[:mw]:
            rep.add("functor.identity", where, (e,))
    return rep


def validate_transfor1(dom: FiniteGlobularCategory, cod: FiniteGlobularCategory,
                       phi: np.ndarray, psi: np.ndarray, xi: dict, *,
                       max_witnesses: int = 16) -> ValidationReport:
    """Intertwining law of a 1-transfor between the functors phi and psi:
    psi(x) ∘_0 xi(source_0(x)) = xi(target_0(x)) ∘_0 phi(x) for every cell."""
    rep = ValidationReport()
    phi = np.asarray(phi, np.int64)
    psi = np.asarray(psi, np.int64)
    count = 0
    for x in range(dom.cell_count):
        s0, t0 = int(dom.source[0, x]), int(dom.target[0, x])
        if s0 not in xi or t0 not in xi:
            rep.add("transfor.component_missing", "-", (x,))
            continue
        lhs = cod.comp[0, psi[x], xi[s0]]
        rhs = cod.comp[0, xi[t0], phi[x]]
        if lhs < 0 or rhs < 0 or lhs != rhs:
            rep.add("transfor.intertwine", "-", (x,))
            count += 1
            if count >= max_witnesses:
                break
    return rep


# ---------------------------------------------------------------------------
# conjugations on finite 2-categories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjugationData:
    """Chosen conjugates and unit/counit 2-cells on a depth-2 base.

    ``bar``, ``runit`` and ``rcounit`` are indexed by cell id and hold -1
    outside the 1-cells (and for 1-cells without supplied conjugation).
    """

    base: FiniteGlobularCategory
    star: InvolutionSpec
    bar: np.ndarray
    runit: np.ndarray     # R_x
    rcounit: np.ndarray   # R̄_x

    def __post_init__(self):
        if self.base.depth != 2:
            raise HicatError("conjugation data needs a depth-2 base")
        for name in ("bar", "runit", "rcounit"):
            a = np.array(getattr(self, name), np.int64, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def one_cells(self) -> np.ndarray:
        return self.base.identities(1)

    def conj(self, x: int) -> int:
        b = self.bar[x]
        if b < 0:
            raise MissingConjugate(x)
        return int(b)

    def unit(self, x: int) -> int:
        r = self.runit[x]
        if r < 0:
            raise MissingConjugate(x)
        return int(r)

    def counit(self, x: int) -> int:
        r = self.rcounit[x]
        if r < 0:
            raise MissingConjugate(x)
        return int(r)


def tensor(cat: FiniteGlobularCategory, a: int, b: int) -> int:
    """a ⊗ b = b ∘_0 a (reversed composition over objects)."""
    z = cat.comp[0, b, a]
    if z < 0:
        raise NotComposable("tensor", a, b)
    return int(z)


def vert(cat: FiniteGlobularCategory, a: int, b: int) -> int:
    z = cat.comp[1, a, b]
    if z < 0:
        raise NotComposable(1, a, b)
    return int(z)


def fold_right(data: ConjugationData, phi: int) -> int:
    """Phi_• = (x̄ ⊗ R̄*_y) ∘ (x̄ ⊗ Phi ⊗ ȳ) ∘ (R_x ⊗ ȳ) for Phi : x ⇒ y."""
    cat = data.base
    x, y = int(cat.source[1, phi]), int(cat.target[1, phi])
    bx, by = data.conj(x), data.conj(y)
    top = tensor(cat, bx, int(data.star.map[data.counit(y)]))
    mid = tensor(cat, tensor(cat, bx, phi), by)
    bot = tensor(cat, data.unit(x), by)
    return vert(cat, top, vert(cat, mid, bot))


def fold_left(data: ConjugationData, phi: int) -> int:
    """•Phi = (R*_y ⊗ x̄) ∘ (ȳ ⊗ Phi ⊗ x̄) ∘ (ȳ ⊗ R̄_x) for Phi : x ⇒ y."""
    cat = data.base
    x, y = int(cat.source[1, phi]), int(cat.target[1, phi])
    bx, by = data.conj(x), data.conj(y)
    top = tensor(cat, int(data.star.map[data.unit(y)]), bx)
    mid = tensor(cat, tensor(cat, by, phi), bx)
    bot = tensor(cat, by, data.counit(x))
    return vert(cat, top, vert(cat, mid, bot))


def dagger(data: ConjugationData, phi: int) -> int:
    return fold_right(data, int(data.star.map[phi]))


def ddagger(data: ConjugationData, phi: int) -> int:
    return fold_left(data, int(data.star.map[phi]))


def validate_conjugation(data: ConjugationData, *, unitality=False, involutivity=False,
                         tensorial=False, traciability=False, unitarity=False,
                         max_witnesses: int = 64) -> ValidationReport:
    """Conjugate equations for every 1-cell, plus the flagged conditions.

    ``unitarity`` is accepted for interface compatibility and ignored: it is
    a C*-norm statement, not a table equality.
    """
    del unitarity
    cat = data.base
    rep = ValidationReport()
    ids1 = data.one_cells()
    s0, t0 = cat.source[0], cat.target[0]
    for x in map(int, ids1):
        bx = data.conj(x)
        rx, rbx = data.unit(x), data.counit(x)
        if not cat.is_identity[1, bx]:
            rep.add("conj.bar_not_1cell", "-", (x, bx))
            continue
        if s0[bx] != t0[x] or t0[bx] != s0[x]:
            rep.add("conj.bar_boundary", "-", (x, bx))
        try:
            if cat.source[1, rx] != t0[x] or cat.target[1, rx] != tensor(cat, bx, x):
                rep.add("conj.unit_boundary", "-", (x, rx))
            if cat.source[1, rbx] != s0[x] or cat.target[1, rbx] != tensor(cat, x, bx):
                rep.add("conj.counit_boundary", "-", (x, rbx))
        except NotComposable:
            rep.add("conj.unit_boundary", "-", (x,))
        star = data.star.map
        try:
            lhs = vert(cat, tensor(cat, int(star[rbx]), x), tensor(cat, x, rx))
            if lhs != x:
                rep.add("conj.eq1", "-", (x,))
        except NotComposable:
            rep.add("conj.eq1", "-", (x,))
        try:
            lhs = vert(cat, tensor(cat, int(star[rx]), bx), tensor(cat, bx, rbx))
            if lhs != bx:
                rep.add("conj.eq2", "-", (x,))
        except NotComposable:
            rep.add("conj.eq2", "-", (x,))
    if unitality:
        for x in map(int, ids1):
            if cat.is_identity[0, x]:
                if data.unit(x) != x or data.counit(x) != x:
                    rep.add("conj.unitality", "-", (x,))
                if data.conj(x) != x:
                    rep.add("conj.unitality_bar", "-", (x,))
    if involutivity:
        for x in map(int, ids1):
            bx = data.conj(x)
            if data.conj(bx) != x:
                rep.add("conj.involutivity_bar", "-", (x,))
            if data.unit(bx) != data.counit(x) or data.counit(bx) != data.unit(x):
                rep.add("conj.involutivity", "-", (x,))
    if tensorial:
        for x in map(int, ids1):
            for y in map(int, ids1):
                if cat.comp[0, y, x] < 0:
                    continue
                z = tensor(cat, x, y)
                try:
                    want_r = vert(cat, tensor(cat, tensor(cat, data.conj(y), data.unit(x)), y),
                                  data.unit(y))
                    if data.unit(z) != want_r:
                        rep.add("conj.tensorial_R", "-", (x, y))
                    want_rb = vert(cat, tensor(cat, tensor(cat, x, data.counit(y)), data.conj(x)),
                                   data.counit(x))
                    if data.counit(z) != want_rb:
                        rep.add("conj.tensorial_Rbar", "-", (x, y))
                except NotComposable:
                    rep.add("conj.tensorial_R", "-", (x, y))
                if data.conj(z) != tensor(cat, data.conj(y), data.conj(x)):
                    rep.add("conj.tensorial_bar", "-", (x, y))
    if traciability:
        for phi in range(cat.cell_count):
            try:
                if fold_right(data, phi) != fold_left(data, phi):
                    rep.add("conj.traciability", "-", (phi,))
            except NotComposable:
                rep.add("conj.traciability", "-", (phi,))
    rep.violations = rep.violations[:max_witnesses]
    return rep


def verify_folding_laws(data: ConjugationData, *, tensorial=False, involutivity=False,
                        traciability=False, max_witnesses: int = 64) -> ValidationReport:
    """Exhaustive functoriality laws of the foldings and daggers.

    Composition-contravariance of both foldings, covariance of the daggers,
    the star interchange, and under the tensorial flag the ⊗-contravariance
    and conjugate ⊗-congruence.
    """
    cat = data.base
    rep = ValidationReport()
    star = data.star.map
    m = cat.cell_count

    def guarded(law, witness, f):
        try:
            if not f():
                rep.add(law, "-", witness)
        except (NotComposable, MissingConjugate):
            rep.add(law, "-", witness)

    for phi in range(m):
        guarded("fold.star_interchange_r", (phi,),
                lambda phi=phi: star[fold_right(data, phi)] == fold_left(data, int(star[phi])))
        guarded("fold.star_interchange_l", (phi,),
                lambda phi=phi: star[fold_left(data, phi)] == fold_right(data, int(star[phi])))
        guarded("fold.dagger_star", (phi,),
                lambda phi=phi: star[dagger(data, phi)] == ddagger(data, int(star[phi])))
        if involutivity:
            guarded("fold.fold_inverse_rl", (phi,),
                    lambda phi=phi: fold_left(data, fold_right(data, phi)) == phi)
            guarded("fold.fold_inverse_lr", (phi,),
                    lambda phi=phi: fold_right(data, fold_left(data, phi)) == phi)
            guarded("fold.dagger_involutive", (phi,),
                    lambda phi=phi: dagger(data, dagger(data, phi)) == phi)
            guarded("fold.ddagger_involutive", (phi,),
                    lambda phi=phi: ddagger(data, ddagger(data, phi)) == phi)
        if traciability:
            guarded("fold.traciability", (phi,),
                    lambda phi=phi: fold_right(data, phi) == fold_left(data, phi))
    for phi in range(m):
        for psi in range(m):
            if cat.comp[1, phi, psi] >= 0:
                comp = int(cat.comp[1, phi, psi])
                guarded("fold.circ_contra_right", (phi, psi),
                        lambda comp=comp, phi=phi, psi=psi:
                        fold_right(data, comp) == vert(cat, fold_right(data, psi), fold_right(data, phi)))
                guarded("fold.circ_contra_left", (phi, psi),
                        lambda comp=comp, phi=phi, psi=psi:
                        fold_left(data, comp) == vert(cat, fold_left(data, psi), fold_left(data, phi)))
                guarded("fold.dagger_cov", (phi, psi),
                        lambda comp=comp, phi=phi, psi=psi:
                        dagger(data, comp) == vert(cat, dagger(data, phi), dagger(data, psi)))
                guarded("fold.ddagger_cov", (phi, psi),
                        lambda comp=comp, phi=phi, psi=psi:
                        ddagger(data, comp) == vert(cat, ddagger(data, phi), ddagger(data, psi)))
            if tensorial and cat.comp[0, psi, phi] >= 0:
                tens = int(cat.comp[0, psi, phi])
                guarded("fold.tensor_contra_right", (phi, psi),
                        lambda tens=tens, phi=phi, psi=psi:
                        fold_right(data, tens) == tensor(cat, fold_right(data, psi), fold_right(data, phi)))
                guarded("fold.tensor_contra_left", (phi, psi),
                        lambda tens=tens, phi=phi, psi=psi:
                        fold_left(data, tens) == tensor(cat, fold_left(data, psi), fold_left(data, phi)))
                guarded("fold.dagger_tensor", (phi, psi),
                        lambda tens=tens, phi=phi, psi=psi:
                        dagger(data, tens) == tensor(cat, dagger(data, psi), dagger(data, phi)))
    if tensorial:
        for x in map(int, data.one_cells()):
            for y in map(int, data.one_cells()):
                if cat.comp[0, y, x] >= 0:
                    guarded("fold.bar_tensor", (x, y),
                            lambda x=x, y=y: data.conj(tensor(cat, x, y))
                            == tensor(cat, data.conj(y), data.conj(x)))
    rep.violations = rep.violations[:max_witnesses]
    return rep


def group_conjugation_fixture(table: np.ndarray, names=None):
    """Delooped finite group as a 2-category with inverse conjugates and
    trivial units; the standard exhaustively-checkable conjugation example."""
    from .ncat import build_group_category, suspend

    base = suspend(build_group_category(table, names))
    m = base.cell_count
    e = int(np.nonzero(base.is_identity[0])[0][0])
    table = np.asarray(table, np.int64)
    inverse = np.empty(m, np.int64)
    for g in range(m):
        hits = np.nonzero(table[g] == e)[0]
        if hits.size != 1:
            raise HicatError("table is not a group table")
        inverse[g] = hits[0]
    star = InvolutionSpec(variance=frozenset({1}), map=np.arange(m), hermitian=True,
                          name="*1")
    units = np.full(m, e, np.int64)
    return ConjugationData(base, star, inverse, units, units.copy())
