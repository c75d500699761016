"""Batch front-end: load text specs, run validators and numeric suites, emit
deterministic reports.

Exit codes: 0 all checks pass, 1 at least one check fails, 2 parse/usage/
dimension errors.  JSON reports are byte-identical for identical inputs and
seeds (schema field, sorted keys, recorded seed and tolerances).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import _kernels
from .coeff import ComplexField, MatrixAlgebra
from .convolution import ConvolutionAlgebra, Section, conv_norm, convolve
from .cstar import (CheckConfig, cstar_suite, eh_collapse_all, matrix_sampler,
                    norm_equivalence, op_norm, structured_matrices)
from .errors import HicatError, SpecFileError
from .hypermatrix import (HypermatrixSystem, hinvol, hmul, hnorm, load_hyper,
                          save_hyper, unit)
from .involutive import validate_conjugation, validate_involution, verify_folding_laws
from .ncat import (FiniteGlobularCategory, FullDepthCategory, check_exchange,
                   check_nc_exchange, mask_levels, subset_mask, validate_full_depth,
                   validate_globular, validate_partial_category)
from .specfile import parse_section, parse_category, write_section

SCHEMA = 1


def _emit(args, payload, text_lines):
    if getattr(args, "report", "text") == "json":
        payload["schema"] = SCHEMA
        sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        for line in text_lines:
            sys.stdout.write(line + "\n")


def _gamma_levels(tok: str):
    tok = tok.strip()
    if tok in ("-", "", "{}"):
        return []
    tok = tok.strip("{}")
    return [int(t) for t in tok.split(",")]


def _parse_coeff(tok: str):
    tok = tok.strip()
    if tok in ("C", "c", "complex"):
        return ComplexField()
    if tok.lower().startswith("m"):
        try:
            return MatrixAlgebra(int(tok[1:]))
        except ValueError:
            pass
    raise SpecFileError("<args>", 0, f"unknown coefficient system {tok!r} (use C or M<d>)")


def _echo_witness(cat, violation):
    d = violation.to_dict()
    if cat.names:
        names = []
        for w in violation.witness:
            if isinstance(w, int) and 0 <= w < cat.cell_count:
                names.append(cat.names[w])
            else:
                names.append(str(w))
        d["witness_names"] = names
    return d


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    spec = parse_category(args.path)
    cat = spec.category
    reports = {}
    if isinstance(cat, FullDepthCategory):
        reports["full_depth"] = validate_full_depth(cat, budget=args.budget)
    else:
        for p in range(cat.depth):
            reports[f"partial_p{p}"] = validate_partial_category(cat, p, budget=args.budget)
        if cat.depth >= 2:
            reports["globular"] = validate_globular(cat, budget=args.budget)
    family = list(spec.involutions.values())
    for name, inv in spec.involutions.items():
        if args.hermitian and not inv.hermitian:
            from dataclasses import replace

            inv = replace(inv, hermitian=True)
        reports[f"involution_{name}"] = validate_involution(cat, inv, family=family)
    exchange_witness = None
    if args.exchange:
        if not isinstance(cat, FiniteGlobularCategory) or cat.depth < 2:
            raise SpecFileError(args.path, 0,
                                "--exchange needs a globular category of depth >= 2")
        if args.exchange == "full":
            exchange_witness = check_exchange(cat, budget=args.budget)
        elif args.exchange == "nc":
            reports["nc_exchange"] = check_nc_exchange(cat, budget=args.budget)
    if args.conjugation:
        if spec.conjugation is None:
            raise SpecFileError(args.path, 0, "--conjugation needs a [conjugation] section")
        flags = {f: True for f in spec.conj_flags if f != "unitarity"}
        reports["conjugation"] = validate_conjugation(spec.conjugation, **flags)
        fold_flags = {k: True for k in ("tensorial", "involutivity", "traciability")
                      if k in spec.conj_flags}
        reports["folding"] = verify_folding_laws(spec.conjugation, **fold_flags)
    ok = all(r.ok for r in reports.values()) and exchange_witness is None
    payload = {"command": "validate", "path": args.path, "ok": ok, "reports": {}}
    lines = []
    for name in sorted(reports):
        rep = reports[name]
        payload["reports"][name] = [_echo_witness(cat, v) for v in rep.violations]
        lines.append(f"{'PASS' if rep.ok else 'FAIL'} {name}"
                     + ("" if rep.ok else f" ({len(rep.violations)} violations,"
                        f" first: {rep.violations[0].law}@{rep.violations[0].where}"
                        f" {rep.violations[0].witness})"))
    if args.exchange == "full":
        if exchange_witness is None:
            lines.append("PASS exchange")
            payload["exchange_witness"] = None
        else:
            x, y, w, z, p, q = exchange_witness
            names = [cat.cell_name(c) for c in (x, y, w, z)]
            payload["exchange_witness"] = {"cells": [x, y, w, z], "names": names,
                                           "p": p, "q": q}
            lines.append(f"FAIL exchange (witness x={names[0]} y={names[1]} w={names[2]}"
                         f" z={names[3]} p={p} q={q})")
    _emit(args, payload, lines)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# convolve / norm
# ---------------------------------------------------------------------------

def _load_base_alg(args):
    spec = parse_category(args.base)
    coeff = _parse_coeff(args.coeff)
    alg = ConvolutionAlgebra(spec.category, coeff)
    if getattr(args, "gamma", None) is not None:
        if not isinstance(spec.category, FullDepthCategory):
            raise SpecFileError(args.base, 0, "--gamma needs a full-depth base")
        key = subset_mask(_gamma_levels(args.gamma), spec.category.directions)
    else:
        if args.depth is None:
            raise SpecFileError(args.base, 0, "need --depth (or --gamma for full-depth bases)")
        key = args.depth
        if not 0 <= key < spec.category.depth:
            raise SpecFileError(args.base, 0, f"depth {key} out of range")
    return spec, alg, key


def cmd_convolve(args) -> int:
    spec, alg, key = _load_base_alg(args)
    dim = alg.coeff.dim if isinstance(alg.coeff, MatrixAlgebra) else None
    m = alg.cell_count
    sa = Section(m, parse_section(args.sections[0], m, dim))
    sb = Section(m, parse_section(args.sections[1], m, dim))
    out = convolve(alg, key, sa, sb)
    write_section(args.output if args.output else sys.stdout, out.data)
    return 0


def cmd_norm(args) -> int:
    spec, alg, key = _load_base_alg(args)
    dim = alg.coeff.dim if isinstance(alg.coeff, MatrixAlgebra) else None
    sa = Section(alg.cell_count, parse_section(args.sections[0], alg.cell_count, dim))
    value = conv_norm(alg, key, sa)
    sys.stdout.write(f"{value!r}\n")
    return 0


# ---------------------------------------------------------------------------
# hyper
# ---------------------------------------------------------------------------

def cmd_hyper(args) -> int:
    x = load_hyper(args.files[0])
    gamma = _gamma_levels(args.gamma)
    if args.op == "mul":
        if len(args.files) != 2:
            raise SpecFileError("<args>", 0, "hyper mul needs two files")
        y = load_hyper(args.files[1])
        out = hmul(gamma, x, y)
        save_hyper(args.output or sys.stdout, out)
        return 0
    if args.op == "invol":
        out = hinvol(gamma, x)
        save_hyper(args.output or sys.stdout, out)
        return 0
    if args.op == "norm":
        sys.stdout.write(f"{hnorm(gamma, x)!r}\n")
        return 0
    raise SpecFileError("<args>", 0, f"unknown hyper op {args.op!r}")


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _suite_payload(args, name, suites):
    ok = all(s.passed for s in suites)
    payload = {"command": f"suite {name}", "ok": ok,
               "suites": [s.to_dict() for s in suites]}
    lines = []
    for s in suites:
        worst = ", ".join(f"{k}={s.worst[k]:.3e}" for k in sorted(s.worst))
        lines.append(f"{'PASS' if s.passed else 'FAIL'} {s.name} ({worst})")
        for f in s.failures[:8]:
            lines.append(f"  failure: {f}")
    return ok, payload, lines


def _hyper_gammas(args, n):
    if args.gamma == "all":
        return list(range(1 << n))
    return [subset_mask(_gamma_levels(args.gamma), n)]


def cmd_suite_cstar(args) -> int:
    cfg = CheckConfig(rel_tol=args.tol, samples=args.samples, seed=args.seed)
    suites = []
    if args.hyper:
        dims = tuple(int(t) for t in args.hyper.split(","))
        system = HypermatrixSystem(dims)
        for mask in _hyper_gammas(args, len(dims)):
            levels = list(mask_levels(mask))
            structured = [unit(levels, dims)] + [b for b in system.basis()[:8]]
            suites.append(cstar_suite(
                lambda a, b, lv=levels: hmul(lv, a, b),
                lambda a, lv=levels: hinvol(lv, a),
                lambda a, lv=levels: hnorm(lv, a),
                system.sample, cfg, structured=structured,
                name=f"cstar hyper{dims} gamma={{{','.join(map(str, levels))}}}"))
    elif args.matrix:
        d = args.matrix
        suites.append(cstar_suite(lambda a, b: a @ b, lambda a: a.conj().T, op_norm,
                                  matrix_sampler(d), cfg,
                                  structured=structured_matrices(d),
                                  name=f"cstar M{d}"))
    else:
        raise SpecFileError("<args>", 0, "suite cstar needs --hyper dims or --matrix d")
    ok, payload, lines = _suite_payload(args, "cstar", suites)
    _emit(args, payload, lines)
    return 0 if ok else 1


def cmd_suite_equivalence(args) -> int:
    if not args.hyper:
        raise SpecFileError("<args>", 0, "suite equivalence needs --hyper dims")
    dims = tuple(int(t) for t in args.hyper.split(","))
    n = len(dims)
    cfg = CheckConfig(rel_tol=args.tol, samples=args.samples, seed=args.seed)
    system = HypermatrixSystem(dims)
    norms = []
    bounds = {}
    labels = []
    for mask in range(1 << n):
        levels = list(mask_levels(mask))
        label = "{" + ",".join(map(str, levels)) + "}"
        labels.append((mask, label))
        norms.append((label, lambda x, lv=levels: hnorm(lv, x)))
    for mask_a, la in labels:
        bound = float(np.prod([dims[k - 1] for k in mask_levels(mask_a)])) if mask_a else 1.0
        for _mask_b, lb in labels:
            bounds[(la, lb)] = bound
    suite = norm_equivalence(norms, system.sample, cfg, bounds=bounds,
                             name=f"equivalence hyper{dims}")
    ok, payload, lines = _suite_payload(args, "equivalence", [suite])
    _emit(args, payload, lines)
    return 0 if ok else 1


def cmd_suite_collapse(args) -> int:
    from .fixtures import collapse_battery

    entries = []
    if args.paths:
        for path in args.paths:
            spec = parse_category(path)
            if not isinstance(spec.category, FiniteGlobularCategory):
                raise SpecFileError(path, 0, "collapse suite needs globular categories")
            entries.append((path, spec.category))
    else:
        entries = collapse_battery()
    ok = True
    results = []
    lines = []
    for name, cat in entries:
        reps = eh_collapse_all(cat)
        for rep in reps:
            results.append({"fixture": name, **rep.to_dict()})
            good = rep.ok and (rep.mode != "exchange" or rep.collapse_confirmed)
            ok = ok and good
            lines.append(f"{'PASS' if good else 'FAIL'} {name} q={rep.q} p={rep.p}"
                         f" block={len(rep.block)} mode={rep.mode}"
                         f" confirmed={rep.collapse_confirmed}")
    payload = {"command": "suite collapse", "ok": ok, "results": results}
    _emit(args, payload, lines)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="hicat", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="run table validators on a category file")
    v.add_argument("path")
    v.add_argument("--exchange", choices=["full", "nc"])
    v.add_argument("--conjugation", action="store_true")
    v.add_argument("--hermitian", action="store_true")
    v.add_argument("--budget", type=int, default=None)
    v.add_argument("--report", choices=["json", "text"], default="text")
    v.set_defaults(fn=cmd_validate)

    c = sub.add_parser("convolve", help="convolve two section files")
    c.add_argument("--base", required=True)
    c.add_argument("--coeff", required=True)
    c.add_argument("--depth", type=int)
    c.add_argument("--gamma")
    c.add_argument("-o", "--output")
    c.add_argument("sections", nargs=2)
    c.set_defaults(fn=cmd_convolve)

    nrm = sub.add_parser("norm", help="operator norm of a section via the regular representation")
    nrm.add_argument("--base", required=True)
    nrm.add_argument("--coeff", required=True)
    nrm.add_argument("--depth", type=int)
    nrm.add_argument("--gamma")
    nrm.add_argument("sections", nargs=1)
    nrm.set_defaults(fn=cmd_norm)

    h = sub.add_parser("hyper", help="hypermatrix products, involutions and norms")
    h.add_argument("op", choices=["mul", "invol", "norm"])
    h.add_argument("--gamma", required=True)
    h.add_argument("-o", "--output")
    h.add_argument("files", nargs="+")
    h.set_defaults(fn=cmd_hyper)

    s = sub.add_parser("suite", help="numeric certification suites")
    ssub = s.add_subparsers(dest="suite", required=True)

    sc = ssub.add_parser("cstar")
    sc.add_argument("--hyper")
    sc.add_argument("--gamma", default="all")
    sc.add_argument("--matrix", type=int)
    sc.add_argument("--samples", type=int, default=100)
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--tol", type=float, default=1e-9)
    sc.add_argument("--report", choices=["json", "text"], default="text")
    sc.set_defaults(fn=cmd_suite_cstar)

    se = ssub.add_parser("equivalence")
    se.add_argument("--hyper")
    se.add_argument("--samples", type=int, default=100)
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--tol", type=float, default=1e-9)
    se.add_argument("--report", choices=["json", "text"], default="text")
    se.set_defaults(fn=cmd_suite_equivalence)

    sl = ssub.add_parser("collapse")
    sl.add_argument("paths", nargs="*")
    sl.add_argument("--report", choices=["json", "text"], default="text")
    sl.set_defaults(fn=cmd_suite_collapse)

    return ap


def main(argv=None) -> int:
    _kernels.apply_thread_cap()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except SpecFileError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except HicatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
