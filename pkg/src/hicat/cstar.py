"""Numerical certification: operator norms, positivity, C*-identity and
submultiplicativity suites, norm-equivalence ratios, Eckmann-Hilton collapse
reports.

All randomized checks are seeded; every report records its seed and
tolerances so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HicatError
from .ncat import FiniteGlobularCategory, check_exchange, diagonal_block


@dataclass(frozen=True)
class CheckConfig:
    rel_tol: float = 1e-9
    abs_floor: float = 1e-12
    samples: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_floor <= 0:
            raise HicatError("tolerances must be positive")

    def rng(self):
        return np.random.default_rng(self.seed)

    def to_dict(self):
        return {"rel_tol": self.rel_tol, "abs_floor": self.abs_floor,
                "samples": self.samples, "seed": self.seed}


def op_norm(mat: np.ndarray) -> float:
    """Largest singular value."""
    mat = np.asarray(mat, np.complex128)
    if not np.all(np.isfinite(mat)):
        raise HicatError("non-finite matrix entries")
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def is_positive(mat: np.ndarray, cfg: CheckConfig = CheckConfig()):
    """(is positive, smallest eigenvalue): Hermitian within tolerance and
    min eigenvalue >= -tol * norm."""
    mat = np.asarray(mat, np.complex128)
    if not np.all(np.isfinite(mat)):
        raise HicatError("non-finite matrix entries")
    scale = max(op_norm(mat), cfg.abs_floor)
    herm = op_norm(mat - mat.conj().T) <= cfg.rel_tol * scale
    eigs = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
    min_eig = float(eigs[0])
    return bool(herm and min_eig >= -cfg.rel_tol * scale), min_eig


# ---------------------------------------------------------------------------
# sampled C*-suites
# ---------------------------------------------------------------------------

@dataclass
class SuiteReport:
    name: str
    cfg: CheckConfig
    passed: bool = True
    worst: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, kind: str, witness):
        self.passed = False
        self.failures.append({"kind": kind, "witness": witness})

    def bump(self, kind: str, value: float):
        if value > self.worst.get(kind, float("-inf")):
            self.worst[kind] = float(value)

    def to_dict(self):
        return {"name": self.name, "config": self.cfg.to_dict(), "passed": self.passed,
                "worst_slack": {k: self.worst[k] for k in sorted(self.worst)},
                "failures": self.failures, "details": self.details}


def cstar_suite(product, involution, norm, sampler, cfg: CheckConfig = CheckConfig(),
                *, structured=(), restrict=None, name="cstar") -> SuiteReport:
    """Sampled C*-axioms for one (product, involution, norm) triple.

    Checks |‖x*x‖ - ‖x‖²| <= tol·max(‖x‖², floor), ‖xy‖ <= ‖x‖‖y‖(1+tol) on
    consecutive sample pairs, and isometry of the involution.  ``structured``
    elements (matrix units, permutations, rank-1) are prepended to the random
    stream to hit the identity's extreme cases.  ``restrict`` optionally
    filters the elements entering the C*-identity check (the weaker axiom
    variant); by default the strong form is certified.
    """
    rng = cfg.rng()
    rep = SuiteReport(name, cfg)
    elements = list(structured) + [sampler(rng) for _ in range(cfg.samples)]
    rep.details["element_count"] = len(elements)
    tol, floor = cfg.rel_tol, cfg.abs_floor
    prev = None
    for idx, x in enumerate(elements):
        nx = norm(x)
        if not np.isfinite(nx):
            rep.fail("nonfinite_norm", idx)
            continue
        sx = involution(x)
        iso = abs(norm(sx) - nx) / max(nx, floor)
        rep.bump("isometry", iso)
        if iso > tol:
            rep.fail("isometry", idx)
        if nx >= floor and (restrict is None or restrict(x)):
            cs = abs(norm(product(sx, x)) - nx * nx) / max(nx * nx, floor)
            rep.bump("cstar_identity", cs)
            if cs > tol:
                rep.fail("cstar_identity", idx)
        if prev is not None:
            py, ny = prev
            sub = (norm(product(py, x)) - ny * nx) / max(ny * nx, floor)
            rep.bump("submultiplicativity", sub)
            if sub > tol:
                rep.fail("submultiplicativity", (idx - 1, idx))
        prev = (x, nx)
    return rep


def norm_equivalence(norms, sampler, cfg: CheckConfig = CheckConfig(), *,
                     bounds=None, name="equivalence") -> SuiteReport:
    """Max observed ratio for every ordered pair of norms.

    ``norms`` is a sequence of (label, fn); ``bounds`` optionally maps a
    (label_i, label_j) pair to an analytic bound the ratio must respect.
    """
    rng = cfg.rng()
    rep = SuiteReport(name, cfg)
    labels = [lb for lb, _f in norms]
    fns = [f for _lb, f in norms]
    ratios = {(a, b): 0.0 for a in labels for b in labels}
    for idx in range(cfg.samples):
        x = sampler(rng)
        vals = [f(x) for f in fns]
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                if vals[j] >= cfg.abs_floor:
                    r = vals[i] / vals[j]
                    if r > ratios[(a, b)]:
                        ratios[(a, b)] = float(r)
                elif vals[i] >= cfg.abs_floor:
                    rep.fail("infinite_ratio", {"pair": [a, b], "sample": idx})
    rep.details["ratios"] = {f"{a}/{b}": ratios[(a, b)] for a in labels for b in labels}
    rep.bump("max_ratio", max(ratios.values(), default=0.0))
    if bounds:
        for (a, b), bound in bounds.items():
            r = ratios.get((a, b), 0.0)
            if r > bound * (1 + cfg.rel_tol):
                rep.fail("bound_exceeded", {"pair": [a, b], "ratio": r, "bound": bound})
    return rep


# ---------------------------------------------------------------------------
# Eckmann-Hilton collapse
# ---------------------------------------------------------------------------

@dataclass
class CollapseReport:
    mode: str                    # "exchange" (assertions) or "nc" (observation)
    block: list
    q: int
    p: int
    all_defined: bool = True
    ops_agree: bool = True
    agree_witness: tuple | None = None
    commutative: dict = field(default_factory=dict)
    commute_witness: dict = field(default_factory=dict)
    assertion_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.assertion_failures

    @property
    def collapse_confirmed(self) -> bool:
        return (self.all_defined and self.ops_agree
                and all(self.commutative.get(k, False) for k in range(self.q, self.p + 1)))

    def to_dict(self):
        return {"mode": self.mode, "q": self.q, "p": self.p, "block_size": len(self.block),
                "all_defined": self.all_defined, "ops_agree": self.ops_agree,
                "commutative": {str(k): v for k, v in sorted(self.commutative.items())},
                "assertion_failures": self.assertion_failures,
                "collapse_confirmed": self.collapse_confirmed}


def eh_collapse_check(obj, o: int, q: int, p: int) -> CollapseReport:
    """Diagonal-block collapse over the q-identity ``o``.

    On the q-diagonal p-block all compositions ∘_q..∘_p are global binary
    operations.  When the structure satisfies classical exchange the checks
    are assertions: the operations must coincide pairwise and be commutative.
    Under non-commutative exchange only, the same facts are observed and
    reported without assertion.

    ``obj`` is a table category, or a convolution algebra whose embedded
    cells are materialized over the default finite generator monoid.
    """
    if isinstance(obj, FiniteGlobularCategory):
        cat = obj
    else:
        from .convolution import embedded_table_category

        cat, gens, _names = embedded_table_category(obj)
        unit_idx = next(i for i, g0 in enumerate(gens)
                        if np.array_equal(np.asarray(g0), np.asarray(obj.coeff.common_unit)))
        o = o * len(gens) + unit_idx
    if not 0 <= q < p < cat.depth:
        raise HicatError("need 0 <= q < p < depth")
    mode = "exchange" if check_exchange(cat) is None else "nc"
    block = [int(c) for c in diagonal_block(cat, o, q, p)]
    rep = CollapseReport(mode, block, q, p)
    ops = list(range(q, p + 1))
    for k in ops:
        for x in block:
            for y in block:
                if cat.comp[k, x, y] < 0:
                    rep.all_defined = False
                    if mode == "exchange":
                        rep.assertion_failures.append(
                            {"kind": "undefined", "op": k, "witness": [x, y]})
    for ka, kb in zip(ops, ops[1:]):
        for x in block:
            for y in block:
                if cat.comp[ka, x, y] != cat.comp[kb, x, y]:
                    rep.ops_agree = False
                    rep.agree_witness = (ka, kb, x, y)
                    if mode == "exchange":
                        rep.assertion_failures.append(
                            {"kind": "ops_differ", "ops": [ka, kb], "witness": [x, y]})
                    break
            if rep.agree_witness:
                break
    for k in ops:
        rep.commutative[k] = True
        for x in block:
            for y in block:
                if cat.comp[k, x, y] != cat.comp[k, y, x]:
                    rep.commutative[k] = False
                    rep.commute_witness[k] = (x, y)
                    if mode == "exchange":
                        rep.assertion_failures.append(
                            {"kind": "noncommutative", "op": k, "witness": [x, y]})
                    break
            if not rep.commutative[k]:
                break
    return rep


def eh_collapse_all(cat: FiniteGlobularCategory):
    """Collapse reports for every q-identity and every q < p."""
    out = []
    for p in range(1, cat.depth):
        for q in range(p):
            for o in map(int, cat.identities(q)):
                out.append(eh_collapse_check(cat, o, q, p))
    return out


# ---------------------------------------------------------------------------
# structured samples
# ---------------------------------------------------------------------------

def structured_matrices(d: int):
    """Matrix units, a cyclic permutation, and a rank-1 projector-like matrix;
    the elements where the C*-identity is tight."""
    out = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), np.complex128)
            e[i, j] = 1.0
            out.append(e)
    perm = np.zeros((d, d), np.complex128)
    for i in range(d):
        perm[i, (i + 1) % d] = 1.0
    out.append(perm)
    v = np.arange(1, d + 1, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    out.append(np.outer(v, v.conj()))
    return out


def matrix_sampler(d: int):
    def sample(rng):
        return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)

    return sample


def validate_positivity(alg, key, inv_id, cfg: CheckConfig = CheckConfig(),
                        name="positivity") -> SuiteReport:
    """Sampled positivity of sigma* ∘̂ sigma through the regular representation.

    Checks that the representation intertwines the lifted involution with the
    matrix adjoint, then that lambda(sigma* ∘̂ sigma) is positive.  Reported as
    not-applicable when the adjoint identity itself fails (non-groupoid
    bases), rather than overclaiming.
    """
    from .convolution import Section, conv_norm, convolve, involve, left_regular_rep

    rng = cfg.rng()
    rep = SuiteReport(name, cfg)
    m = alg.cell_count
    kind = alg.coeff_kind()
    applicable = True
    for idx in range(cfg.samples):
        if kind == "scalar":
            data = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2)
        else:
            d = alg.coeff.dim
            data = (rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))) / np.sqrt(2)
        sigma = Section(m, data)
        lam = left_regular_rep(alg, key, sigma)
        lam_star = left_regular_rep(alg, key, involve(alg, inv_id, sigma))
        scale = max(op_norm(lam), cfg.abs_floor)
        adj_err = op_norm(lam_star - lam.conj().T) / scale
        rep.bump("adjoint_identity", adj_err)
        if adj_err > 1e-10:
            applicable = False
            rep.fail("adjoint_identity", idx)
            continue
        prod = left_regular_rep(alg, key, convolve(alg, key, involve(alg, inv_id, sigma), sigma))
        ok, min_eig = is_positive(prod, cfg)
        rep.bump("negative_eigenvalue", -min_eig / scale if min_eig < 0 else 0.0)
        if not ok:
            rep.fail("positivity", {"sample": idx, "min_eig": min_eig})
        rep.bump("max_conv_norm", conv_norm(alg, key, sigma))
    rep.details["applicable"] = applicable
    return rep
