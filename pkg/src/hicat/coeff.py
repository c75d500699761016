"""Coefficient systems for convolution: the complex field, matrix *-algebras,
and the generic multi-product / multi-involution interface with a covariance
table, plus the covariance-matching search.

A coefficient pair (product k, involution j) carries one of the labels
``covariant`` ((ab)† = a†b†), ``contravariant`` ((ab)† = b†a†), ``both``
(commutative situations) or ``neither`` (mixed behaviour, usable for no
variance).  Matching a fully involutive base against a system requires one
product per base composition and one involution per base involution, with
every induced pair admissible; the search is exhaustive and returns the
lexicographically least factored assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .report import ValidationReport

COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"
BOTH = "both"
NEITHER = "neither"


def close(a, b, tol: float) -> bool:
    """Relative comparison scaled by operand magnitude."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return bool(np.max(np.abs(a - b), initial=0.0) <= tol * scale)


class ComplexField:
    """The complex numbers with conjugation; commutative, so both labels hold."""

    tol = 1e-12
    product_names = ("mul",)
    involution_names = ("conj",)

    def product(self, k, a, b):
        return a * b

    def involution(self, j, a):
        return np.conjugate(a)

    def unit(self, k):
        return 1.0 + 0.0j

    @property
    def common_unit(self):
        return 1.0 + 0.0j

    zero = 0.0 + 0.0j

    def add(self, a, b):
        return a + b

    def scalar_mul(self, c, a):
        return c * a

    def covariance(self, k, j):
        return BOTH

    def basis(self):
        return [1.0 + 0.0j]

    def sample(self, rng):
        return complex(rng.standard_normal() + 1j * rng.standard_normal())

    def eq(self, a, b):
        return close(a, b, self.tol)

    def describe(self):
        return "C"


class MatrixAlgebra:
    """d x d complex matrices with the conjugate-transpose involution."""

    tol = 1e-12
    product_names = ("matmul",)
    involution_names = ("adjoint",)

    def __init__(self, dim: int, declared_covariance: str | None = None):
        self.dim = dim
        self._label = declared_covariance or (BOTH if dim == 1 else CONTRAVARIANT)

    def product(self, k, a, b):
        return a @ b

    def involution(self, j, a):
        return np.conjugate(a.T)

    def unit(self, k):
        return np.eye(self.dim, dtype=np.complex128)

    @property
    def common_unit(self):
        return self.unit(0)

    @property
    def zero(self):
        return np.zeros((self.dim, self.dim), dtype=np.complex128)

    def add(self, a, b):
        return a + b

    def scalar_mul(self, c, a):
        return c * a

    def covariance(self, k, j):
        return self._label

    def basis(self):
        out = []
        for i in range(self.dim):
            for j in range(self.dim):
                e = np.zeros((self.dim, self.dim), dtype=np.complex128)
                e[i, j] = 1.0
                out.append(e)
        return out

    def matrix_unit(self, i, j):
        e = np.zeros((self.dim, self.dim), dtype=np.complex128)
        e[i - 1, j - 1] = 1.0
        return e

    def sample(self, rng):
        d = self.dim
        return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)

    def eq(self, a, b):
        return close(a, b, self.tol)

    def describe(self):
        return f"M{self.dim}"


def validate_star_algebra(A, elements=None, *, rng=None, samples: int = 32,
                          max_witnesses: int = 16) -> ValidationReport:
    """Algebra, unit, distributivity, involution and declared-covariance laws.

    Exhaustive over ``A.basis()`` (matrix units and the like) unless explicit
    ``elements`` or a sampler is requested.
    """
    rep = ValidationReport()
    if elements is None:
        elements = A.basis()
        if elements is None:
            rng = rng or np.random.default_rng(0)
            elements = [A.sample(rng) for _ in range(samples)]
    mw = max_witnesses
    eq = A.eq
    n_prod = len(A.product_names)
    n_inv = len(A.involution_names)
    lam = 0.5 - 1.25j
    for k in range(n_prod):
        u = A.unit(k)
        for ia, a in enumerate(elements):
            if not eq(A.product(k, u, a), a) or not eq(A.product(k, a, u), a):
                rep.add("alg.unit", f"k={k}", (ia,))
            for ib, b in enumerate(elements):
                ab = A.product(k, a, b)
                for ic, c in enumerate(elements):
                    if not eq(A.product(k, ab, c), A.product(k, a, A.product(k, b, c))):
                        rep.add("alg.assoc", f"k={k}", (ia, ib, ic))
                        if len(rep.violations) >= mw:
                            return rep
                    if not eq(A.product(k, a, A.add(b, c)),
                              A.add(ab, A.product(k, a, c))):
                        rep.add("alg.dist_left", f"k={k}", (ia, ib, ic))
                    if not eq(A.product(k, A.add(a, c), b),
                              A.add(ab, A.product(k, c, b))):
                        rep.add("alg.dist_right", f"k={k}", (ia, ib, ic))
    for j in range(n_inv):
        for ia, a in enumerate(elements):
            if not eq(A.involution(j, A.involution(j, a)), a):
                rep.add("alg.inv_involutive", f"j={j}", (ia,))
            if not eq(A.involution(j, A.scalar_mul(lam, a)),
                      A.scalar_mul(np.conjugate(lam), A.involution(j, a))):
                rep.add("alg.inv_conjlinear", f"j={j}", (ia,))
            for ib, b in enumerate(elements):
                if not eq(A.involution(j, A.add(a, b)),
                          A.add(A.involution(j, a), A.involution(j, b))):
                    rep.add("alg.inv_additive", f"j={j}", (ia, ib))
    for k in range(n_prod):
        for j in range(n_inv):
            label = A.covariance(k, j)
            for ia, a in enumerate(elements):
                for ib, b in enumerate(elements):
                    lhs = A.involution(j, A.product(k, a, b))
                    cov_ok = eq(lhs, A.product(k, A.involution(j, a), A.involution(j, b)))
                    con_ok = eq(lhs, A.product(k, A.involution(j, b), A.involution(j, a)))
                    bad = ((label == COVARIANT and not cov_ok)
                           or (label == CONTRAVARIANT and not con_ok)
                           or (label == BOTH and not (cov_ok and con_ok)))
                    if bad:
                        rep.add("alg.covariance", f"k={k},j={j},label={label}", (ia, ib))
                        if len(rep.violations) >= mw:
                            return rep
    return rep


def is_commutative(A, *, rng=None, samples: int = 64):
    """(True, None) or (False, witness pair) for the first product of A."""
    elements = A.basis()
    if elements is None:
        rng = rng or np.random.default_rng(0)
        elements = [A.sample(rng) for _ in range(samples)]
    for k in range(len(A.product_names)):
        for ia, a in enumerate(elements):
            for ib, b in enumerate(elements):
                if not A.eq(A.product(k, a, b), A.product(k, b, a)):
                    return False, (k, ia, ib)
    return True, None


@dataclass(frozen=True)
class CovarianceAssignment:
    """Factored assignment: one coefficient product per base composition and
    one coefficient involution per base involution."""

    product_map: dict
    involution_map: dict
    pairs: dict  # (comp_id, inv_id) -> (k, j)


def covariance_match(base_pairs, coeff):
    """Search for a variance-preserving assignment of coefficient pairs.

    ``base_pairs`` is a sequence of (composition id, involution id, variance)
    with variance in {covariant, contravariant}.  Returns
    (CovarianceAssignment, None) on success, else (None, blocking_pair) where
    blocking_pair is the first base pair that could not be satisfied.
    """
    base_pairs = list(base_pairs)
    n_prod = len(coeff.product_names)
    n_inv = len(coeff.involution_names)

    def admits(k, j, variance):
        label = coeff.covariance(k, j)
        return label == BOTH or label == variance

    for pair in base_pairs:
        comp_id, inv_id, variance = pair
        if not any(admits(k, j, variance) for k in range(n_prod) for j in range(n_inv)):
            return None, pair
    comps = sorted({p[0] for p in base_pairs}, key=repr)
    invs = sorted({p[1] for p in base_pairs}, key=repr)
    deepest_fail = -1
    import itertools

    for prod_choice in itertools.product(range(n_prod), repeat=len(comps)):
        for inv_choice in itertools.product(range(n_inv), repeat=len(invs)):
            pmap = dict(zip(comps, prod_choice))
            imap = dict(zip(invs, inv_choice))
            ok = True
            for idx, (comp_id, inv_id, variance) in enumerate(base_pairs):
                if not admits(pmap[comp_id], imap[inv_id], variance):
                    deepest_fail = max(deepest_fail, idx)
                    ok = False
                    break
            if ok:
                pairs = {(c, i): (pmap[c], imap[i])
                         for (c, i, _v) in base_pairs}
                return CovarianceAssignment(pmap, imap, pairs), None
    return None, base_pairs[deepest_fail if deepest_fail >= 0 else 0]


def base_pairs_for(cat_depth: int, variances) -> list:
    """Base (composition, involution, variance) triples of a globular category
    carrying involutions with the given variance sets."""
    out = []
    for p in range(cat_depth):
        for alpha in variances:
            label = CONTRAVARIANT if p in alpha else COVARIANT
            out.append((p, frozenset(alpha), label))
    return out
