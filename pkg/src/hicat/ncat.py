"""Finite strict globular and full-depth cubical categories as explicit tables.

Cells are dense integer ids.  A depth-``n`` globular category stores, per
depth ``p``, an identity flag vector, total source/target maps and a partial
composition table (``-1`` = undefined).  Lower cells live inside the single
flat cell set as identities, so a ``p``-identity is its own image under every
deeper inclusion.

Full-depth categories carry one partial composition per subset ``gamma`` of
the direction set ``{1..n}``; here ``gamma`` lists the directions *held
fixed* by the composition, and the directions outside ``gamma`` are the ones
actually composed.  Subsets are encoded as bitmasks (bit ``k-1`` for
direction ``k``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import assoc_scan, exchange_first, nc_scan
from .errors import CellBudgetExceeded, HicatError, NotComposable
from .report import ValidationReport

DEFAULT_CELL_BUDGET = 512


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True, order="C")
    a.setflags(write=False)
    return a


def _check_tables(cat):
    m = cat.cell_count
    if cat.comp.min() < -1 or cat.comp.max() >= m:
        raise HicatError("composition table entries must be cell ids or -1")
    for name in ("source", "target"):
        arr = getattr(cat, name)
        if arr.min() < 0 or arr.max() >= m:
            raise HicatError(f"{name} map entries must be cell ids")


@dataclass(frozen=True)
class FiniteGlobularCategory:
    depth: int
    cell_count: int
    is_identity: np.ndarray  # (depth, m) bool
    source: np.ndarray       # (depth, m) int64
    target: np.ndarray       # (depth, m) int64
    comp: np.ndarray         # (depth, m, m) int64, -1 undefined
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        n, m = self.depth, self.cell_count
        if n < 1:
            raise HicatError("depth must be >= 1")
        if m < 1:
            raise HicatError("cell_count must be >= 1")
        object.__setattr__(self, "is_identity", _freeze(np.asarray(self.is_identity, bool).reshape(n, m)))
        object.__setattr__(self, "source", _freeze(np.asarray(self.source, np.int64).reshape(n, m)))
        object.__setattr__(self, "target", _freeze(np.asarray(self.target, np.int64).reshape(n, m)))
        object.__setattr__(self, "comp", _freeze(np.asarray(self.comp, np.int64).reshape(n, m, m)))
        _check_tables(self)

    def identities(self, p: int) -> np.ndarray:
        return np.nonzero(self.is_identity[p])[0]

    def defined(self, p: int, x: int, y: int) -> bool:
        return self.comp[p, x, y] >= 0

    def cell_name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)


def compose(cat: FiniteGlobularCategory, p: int, x: int, y: int) -> int:
    """Table composition x ∘_p y; raises NotComposable outside the domain."""
    z = cat.comp[p, x, y]
    if z < 0:
        raise NotComposable(p, x, y)
    return int(z)


@dataclass(frozen=True)
class FullDepthCategory:
    directions: int
    cell_count: int
    is_identity: np.ndarray  # (2**n, m) bool, row = bitmask of gamma
    source: np.ndarray       # (2**n, m) int64
    target: np.ndarray       # (2**n, m) int64
    comp: np.ndarray         # (2**n, m, m) int64
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        n, m = self.directions, self.cell_count
        if n < 1:
            raise HicatError("directions must be >= 1")
        k = 1 << n
        object.__setattr__(self, "is_identity", _freeze(np.asarray(self.is_identity, bool).reshape(k, m)))
        object.__setattr__(self, "source", _freeze(np.asarray(self.source, np.int64).reshape(k, m)))
        object.__setattr__(self, "target", _freeze(np.asarray(self.target, np.int64).reshape(k, m)))
        object.__setattr__(self, "comp", _freeze(np.asarray(self.comp, np.int64).reshape(k, m, m)))
        _check_tables(self)

    def subsets(self):
        return range(1 << self.directions)

    def identities(self, gamma: int) -> np.ndarray:
        return np.nonzero(self.is_identity[gamma])[0]

    def cell_name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)


def subset_mask(levels, n: int) -> int:
    """Bitmask for a collection of 1-based direction labels."""
    mask = 0
    for k in levels:
        if not 1 <= k <= n:
            raise HicatError(f"direction {k} outside 1..{n}")
        mask |= 1 << (k - 1)
    return mask


def mask_levels(mask: int) -> tuple[int, ...]:
    return tuple(k + 1 for k in range(64) if mask >> k & 1)


def compose_full_depth(fdc: FullDepthCategory, gamma: int, x: int, y: int) -> int:
    z = fdc.comp[gamma, x, y]
    if z < 0:
        raise NotComposable(f"gamma={set(mask_levels(gamma))}", x, y)
    return int(z)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_pair_groupoid(n_points: int) -> FiniteGlobularCategory:
    """Pair groupoid of {1..N}: cells (i,j), identities (j,j), (i,j)∘(j,k)=(i,k).

    Cell (i,j) has id (i-1)*N + (j-1), source j and target i.
    """
    if n_points < 1:
        raise HicatError("pair groupoid needs at least one point")
    N = n_points
    m = N * N
    ident = np.zeros((1, m), bool)
    src = np.zeros((1, m), np.int64)
    tgt = np.zeros((1, m), np.int64)
    comp = np.full((1, m, m), -1, np.int64)
    names = []
    for i in range(N):
        for j in range(N):
            c = i * N + j
            names.append(f"{i + 1}.{j + 1}")
            ident[0, c] = i == j
            src[0, c] = j * N + j
            tgt[0, c] = i * N + i
    for i in range(N):
        for j in range(N):
            for k in range(N):
                comp[0, i * N + j, j * N + k] = i * N + k
    return FiniteGlobularCategory(1, m, ident, src, tgt, comp, tuple(names))


def build_terminal(depth: int) -> FiniteGlobularCategory:
    """One cell, identity at every depth, every composition defined."""
    ident = np.ones((depth, 1), bool)
    zero = np.zeros((depth, 1), np.int64)
    comp = np.zeros((depth, 1, 1), np.int64)
    return FiniteGlobularCategory(depth, 1, ident, zero, zero, comp, ("star",))


def build_group_category(table: np.ndarray, names=None) -> FiniteGlobularCategory:
    """Depth-1 delooping of a finite group (or monoid) given its Cayley table."""
    table = np.asarray(table, np.int64)
    m = table.shape[0]
    units = [e for e in range(m)
             if all(table[e, x] == x and table[x, e] == x for x in range(m))]
    if len(units) != 1:
        raise HicatError("multiplication table must have exactly one two-sided unit")
    e = units[0]
    ident = np.zeros((1, m), bool)
    ident[0, e] = True
    src = np.full((1, m), e, np.int64)
    tgt = np.full((1, m), e, np.int64)
    return FiniteGlobularCategory(1, m, ident, src, tgt, table.reshape(1, m, m),
                                  tuple(names) if names else None)


def suspend(cat: FiniteGlobularCategory) -> FiniteGlobularCategory:
    """Raise the depth by one; every cell becomes an identity at the new top.

    The new composition x ∘_n y is defined only for x = y (every cell is its
    own n-source and n-target), so all existing structure is untouched.
    """
    n, m = cat.depth, cat.cell_count
    ident = np.vstack([cat.is_identity, np.ones((1, m), bool)])
    arange = np.arange(m, dtype=np.int64)
    src = np.vstack([cat.source, arange[None, :]])
    tgt = np.vstack([cat.target, arange[None, :]])
    top = np.full((1, m, m), -1, np.int64)
    top[0, arange, arange] = arange
    comp = np.concatenate([cat.comp, top])
    return FiniteGlobularCategory(n + 1, m, ident, src, tgt, comp, cat.names)


def build_double_deloop(table: np.ndarray, names=None) -> FiniteGlobularCategory:
    """Depth-2 category on one object and one 1-arrow, 2-cells = monoid elements.

    Both compositions are the monoid multiplication, so full exchange holds
    exactly when the monoid is commutative (the Eckmann-Hilton situation).
    """
    base = build_group_category(table, names)
    m = base.cell_count
    ident = np.vstack([base.is_identity, base.is_identity])
    src = np.vstack([base.source, base.source])
    tgt = np.vstack([base.target, base.target])
    comp = np.concatenate([base.comp, base.comp])
    return FiniteGlobularCategory(2, m, ident, src, tgt, comp, base.names)


def build_product(factors) -> FullDepthCategory:
    """Full-depth category on the Cartesian product of depth-1 categories.

    ``comp_gamma`` requires the components in the fixed set ``gamma`` to
    coincide and composes every other component; a ``gamma``-identity is a
    tuple whose components outside ``gamma`` are identities.
    """
    factors = list(factors)
    if not factors:
        raise HicatError("product of an empty factor family is not defined")
    for f in factors:
        if f.depth != 1:
            raise HicatError("build_product expects depth-1 factors")
    n = len(factors)
    sizes = [f.cell_count for f in factors]
    m = int(np.prod(sizes))
    strides = np.ones(n, np.int64)
    for a in range(n - 2, -1, -1):
        strides[a] = strides[a + 1] * sizes[a + 1]

    def decode(c):
        out = []
        for a in range(n):
            out.append(c // strides[a] % sizes[a])
        return out

    k = 1 << n
    ident = np.zeros((k, m), bool)
    src = np.zeros((k, m), np.int64)
    tgt = np.zeros((k, m), np.int64)
    comp = np.full((k, m, m), -1, np.int64)
    names = []
    for c in range(m):
        parts = decode(c)
        names.append("x".join(factors[a].cell_name(parts[a]) for a in range(n)))
        for gamma in range(k):
            all_id = True
            s = t = 0
            for a in range(n):
                held = gamma >> a & 1
                if held:
                    s += parts[a] * strides[a]
                    t += parts[a] * strides[a]
                else:
                    if not factors[a].is_identity[0, parts[a]]:
                        all_id = False
                    s += factors[a].source[0, parts[a]] * strides[a]
                    t += factors[a].target[0, parts[a]] * strides[a]
            ident[gamma, c] = all_id
            src[gamma, c] = s
            tgt[gamma, c] = t
    for cx in range(m):
        px = decode(cx)
        for cy in range(m):
            py = decode(cy)
            for gamma in range(k):
                res = 0
                ok = True
                for a in range(n):
                    if gamma >> a & 1:
                        if px[a] != py[a]:
                            ok = False
                            break
                        res += px[a] * strides[a]
                    else:
                        z = factors[a].comp[0, px[a], py[a]]
                        if z < 0:
                            ok = False
                            break
                        res += z * strides[a]
                if ok:
                    comp[gamma, cx, cy] = res
    return FullDepthCategory(n, m, ident, src, tgt, comp, tuple(names))


# ---------------------------------------------------------------------------
# validators
# ---------------------------------------------------------------------------

def _check_budget(m: int, budget: int | None):
    b = DEFAULT_CELL_BUDGET if budget is None else budget
    if m > b:
        raise CellBudgetExceeded(m, b)


def _validate_partial(comp, is_id, src, tgt, where: str, max_w: int) -> ValidationReport:
    rep = ValidationReport()
    m = comp.shape[0]
    ids = np.nonzero(is_id)[0]
    arange = np.arange(m)

    # identities are their own source and target
    bad = ids[(src[ids] != ids) | (tgt[ids] != ids)]
    for e in bad[:max_w]:
        rep.add("partial.identity_self", where, (e,))
    # sources/targets land on identity cells
    for law, mapv in (("partial.source_identity", src), ("partial.target_identity", tgt)):
        bad = arange[~is_id[mapv]]
        for x in bad[:max_w]:
            rep.add(law, where, (x,))
    # unit laws against the stored maps
    right = comp[arange, src]
    bad = arange[right != arange]
    for x in bad[:max_w]:
        rep.add("partial.right_unit", where, (x, src[x]))
    left = comp[tgt, arange]
    bad = arange[left != arange]
    for x in bad[:max_w]:
        rep.add("partial.left_unit", where, (tgt[x], x))
    # identity absorption wherever defined
    sub = comp[ids]  # (k, m)
    defined = sub >= 0
    bad_r, bad_c = np.nonzero(defined & (sub != arange[None, :]))
    for r, h in zip(bad_r[:max_w], bad_c[:max_w]):
        rep.add("partial.identity_absorb_left", where, (ids[r], h))
    sub = comp[:, ids]
    defined = sub >= 0
    bad_r, bad_c = np.nonzero(defined & (sub != arange[:, None]))
    for h, r in zip(bad_r[:max_w], bad_c[:max_w]):
        rep.add("partial.identity_absorb_right", where, (h, ids[r]))
    # composability criterion: defined iff source(x) = target(y)
    should = src[:, None] == tgt[None, :]
    actual = comp >= 0
    bad_x, bad_y = np.nonzero(should != actual)
    for x, y in zip(bad_x[:max_w], bad_y[:max_w]):
        rep.add("partial.composability", where, (x, y))
    # source/target of composites
    dx, dy = np.nonzero(actual)
    z = comp[dx, dy]
    bad = src[z] != src[dy]
    for x, y in zip(dx[bad][:max_w], dy[bad][:max_w]):
        rep.add("partial.composite_source", where, (x, y))
    bad = tgt[z] != tgt[dx]
    for x, y in zip(dx[bad][:max_w], dy[bad][:max_w]):
        rep.add("partial.composite_target", where, (x, y))
    # exhaustive associativity with definedness bi-implication
    for kind, x, y, zz in assoc_scan(comp, max_w):
        law = "partial.assoc_def" if kind == 0 else "partial.assoc_eq"
        rep.add(law, where, (x, y, zz))
    return rep


def validate_partial_category(cat: FiniteGlobularCategory, p: int, *,
                              budget: int | None = None, max_witnesses: int = 16) -> ValidationReport:
    """Exhaustive 1-category laws for the depth-``p`` composition."""
    _check_budget(cat.cell_count, budget)
    return _validate_partial(cat.comp[p], cat.is_identity[p], cat.source[p],
                             cat.target[p], f"p={p}", max_witnesses)


def validate_globular(cat: FiniteGlobularCategory, *, budget: int | None = None,
                      max_witnesses: int = 16) -> ValidationReport:
    """Identity nesting, identity closure and the globular boundary laws."""
    _check_budget(cat.cell_count, budget)
    rep = ValidationReport()
    m = cat.cell_count
    mw = max_witnesses
    for p in range(cat.depth):
        for q in range(p):
            idq, idp = cat.is_identity[q], cat.is_identity[p]
            bad = np.nonzero(idq & ~idp)[0]
            for x in bad[:mw]:
                rep.add("globular.identity_nesting", f"q={q},p={p}", (x,))
            both = idp[:, None] & idp[None, :]
            defined = cat.comp[q] >= 0
            zz = np.where(defined, cat.comp[q], 0)
            bad_x, bad_y = np.nonzero(both & defined & ~idp[zz])
            for x, y in zip(bad_x[:mw], bad_y[:mw]):
                rep.add("globular.identity_closure", f"q={q},p={p}", (x, y))
            sq, tq = cat.source[q], cat.target[q]
            sp, tp = cat.source[p], cat.target[p]
            for law, got in (("globular.sq_sp", sq[sp]), ("globular.sq_tp", sq[tp])):
                bad = np.nonzero(got != sq)[0]
                for x in bad[:mw]:
                    rep.add(law, f"q={q},p={p}", (x,))
            for law, got in (("globular.tq_tp", tq[tp]), ("globular.tq_sp", tq[sp])):
                bad = np.nonzero(got != tq)[0]
                for x in bad[:mw]:
                    rep.add(law, f"q={q},p={p}", (x,))
    return rep


def check_exchange(cat: FiniteGlobularCategory, *, budget: int | None = None):
    """First quadruple breaking the classical exchange law, or None.

    Scans depth pairs q < p in ascending (p, q) order and cells in ascending
    (x, y, w, z) order; the witness is (x, y, w, z, p, q).  Worst case is
    O(cells^4) per depth pair, so the cell budget applies.
    """
    if cat.depth < 2:
        raise HicatError("exchange needs depth >= 2")
    _check_budget(cat.cell_count, budget)
    for p in range(1, cat.depth):
        for q in range(p):
            hit = exchange_first(cat.comp[p], cat.comp[q])
            if hit is not None:
                return (*hit, p, q)
    return None


_NC_CODE = {0: "def_forward", 1: "def_backward", 2: "image_undefined", 3: "compose"}


def _nc_report(comp_q, comp_p, is_id_p, where: str, max_w: int) -> ValidationReport:
    rep = ValidationReport()
    idents = np.nonzero(is_id_p)[0]
    for left, side in ((True, "left"), (False, "right")):
        for code, e, x, y in nc_scan(comp_q, comp_p, idents, left, max_w):
            rep.add(f"nc.{side}.{_NC_CODE[int(code)]}", where, (e, x, y))
        # p-identities with a defined image must map to p-identities
        img = comp_q[idents][:, idents] if left else comp_q[idents][:, idents].T
        # rows: the acting identity e, cols: the argument identity x
        defined = img >= 0
        zz = np.where(defined, img, 0)
        bad_e, bad_x = np.nonzero(defined & ~is_id_p[zz])
        for r, c in zip(bad_e[:max_w], bad_x[:max_w]):
            rep.add(f"nc.{side}.identity", where, (idents[r], idents[c]))
    return rep


def check_nc_exchange(cat: FiniteGlobularCategory, *, budget: int | None = None,
                      max_witnesses: int = 16) -> ValidationReport:
    """Non-commutative exchange: left/right composition with a p-identity at
    any lower depth q must be a homomorphism for ∘_p, with definedness
    preserved both ways."""
    if cat.depth < 2:
        raise HicatError("exchange needs depth >= 2")
    _check_budget(cat.cell_count, budget)
    rep = ValidationReport()
    for p in range(1, cat.depth):
        for q in range(p):
            rep.merge(_nc_report(cat.comp[q], cat.comp[p], cat.is_identity[p],
                                 f"q={q},p={p}", max_witnesses))
    return rep


def validate_full_depth(fdc: FullDepthCategory, *, budget: int | None = None,
                        max_witnesses: int = 16) -> ValidationReport:
    """All axiom families of a full-depth cubical category.

    With gamma = the held-fixed set, the identity family grows with gamma, a
    composition with a smaller held set preserves the identities of a larger
    one, and non-commutative exchange relates comp_a to comp_g for a ⊂ g.
    """
    _check_budget(fdc.cell_count, budget)
    rep = ValidationReport()
    mw = max_witnesses
    k = 1 << fdc.directions
    for gamma in range(k):
        where = f"gamma={{{','.join(map(str, mask_levels(gamma))) or ''}}}"
        rep.merge(_validate_partial(fdc.comp[gamma], fdc.is_identity[gamma],
                                    fdc.source[gamma], fdc.target[gamma], where, mw))
    for a in range(k):
        for b in range(k):
            if a == b or (a & b) != a:
                continue  # only a ⊂ b
            where = f"a={{{','.join(map(str, mask_levels(a)))}}},b={{{','.join(map(str, mask_levels(b)))}}}"
            ida, idb = fdc.is_identity[a], fdc.is_identity[b]
            bad = np.nonzero(ida & ~idb)[0]
            for x in bad[:mw]:
                rep.add("fulldepth.identity_monotone", where, (x,))
            both = idb[:, None] & idb[None, :]
            defined = fdc.comp[a] >= 0
            zz = np.where(defined, fdc.comp[a], 0)
            bad_x, bad_y = np.nonzero(both & defined & ~idb[zz])
            for x, y in zip(bad_x[:mw], bad_y[:mw]):
                rep.add("fulldepth.identity_closure", where, (x, y))
            sub = _nc_report(fdc.comp[a], fdc.comp[b], fdc.is_identity[b], where, mw)
            for v in sub.violations:
                rep.add("fulldepth." + v.law, v.where, v.witness)
    return rep


def diagonal_block(cat: FiniteGlobularCategory, o: int, q: int, p: int) -> np.ndarray:
    """Cells whose k-source and k-target equal ``o`` for every k in [q, p].

    ``o`` must be a q-identity; on the block all compositions ∘_q..∘_p are
    globally defined (in a valid category).
    """
    if not (0 <= q <= p < cat.depth):
        raise HicatError("need 0 <= q <= p < depth")
    if not cat.is_identity[q, o]:
        raise HicatError(f"cell {o} is not a {q}-identity")
    mask = np.ones(cat.cell_count, bool)
    for kdepth in range(q, p + 1):
        mask &= (cat.source[kdepth] == o) & (cat.target[kdepth] == o)
    return np.nonzero(mask)[0]
