"""Text formats for categories, involutions, conjugations and sections.

Category files are line-oriented with bracketed sections::

    [meta]
    kind = globular          # or fulldepth
    depth = 2                # directions, for fulldepth
    cells = e x y xy         # symbolic names -> dense ids, in order

    [comp]
    0: x y -> xy             # depth (or subset token): x y -> z

    [identities]
    0: e
    1: e x

    [maps]                   # optional; derived from identities when absent
    s 0 x -> e

    [involution star0]
    variance = 0             # depths; for fulldepth, subset tokens {1};{1,2}
    hermitian = true
    x -> y                   # unlisted cells stay fixed

    [conjugation]
    star = star0
    flags = unitality involutivity tensorial traciability
    bar x -> y
    R x -> phi
    Rbar x -> phi

A [builder] section (``pair_groupoid N``, ``terminal n``,
``product a.cat b.cat``) replaces the table sections; exactly one of the two
forms must be present.  Subset tokens for full-depth files look like ``{}``,
``{1}``, ``{1,3}`` and list the held-fixed directions of the composition.

Section files: header ``section <base-cells>``, then either ``cell re im``
lines (scalar coefficients) or a bare ``cell`` line followed by d rows of
2d floats (re im pairs, matrix coefficients); cells are dense ids and missing
cells default to zero.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecFileError
from .involutive import ConjugationData, InvolutionSpec
from .ncat import (FiniteGlobularCategory, FullDepthCategory, build_pair_groupoid,
                   build_product, build_terminal, subset_mask)

CONJ_FLAGS = ("unitality", "involutivity", "tensorial", "traciability", "unitarity")


@dataclass
class ParsedSpec:
    category: object
    involutions: dict = field(default_factory=dict)
    conjugation: ConjugationData | None = None
    conj_flags: tuple = ()
    path: str = ""


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_subset_token(tok: str, n: int, path, lineno) -> int:
    tok = tok.strip()
    if not (tok.startswith("{") and tok.endswith("}")):
        raise SpecFileError(path, lineno, f"expected subset token like {{1,2}}, got {tok!r}")
    inner = tok[1:-1].strip()
    if not inner:
        return 0
    try:
        levels = [int(t) for t in inner.split(",")]
    except ValueError:
        raise SpecFileError(path, lineno, f"bad subset token {tok!r}") from None
    try:
        return subset_mask(levels, n)
    except Exception as exc:
        raise SpecFileError(path, lineno, str(exc)) from None


def parse_category(path: str) -> ParsedSpec:
    with open(path) as fh:
        raw_lines = fh.readlines()
    section = None
    meta: dict = {}
    builder = None
    identities: list = []
    maps: list = []
    comps: list = []
    involutions: dict = {}
    conj_lines: list = []
    inv_order: list = []

    for lineno, raw in enumerate(raw_lines, 1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section.startswith("involution"):
                name = section.split(None, 1)[1].strip() if " " in section else "*"
                involutions[name] = {"variance": None, "hermitian": False,
                                     "covariant": None, "map": [], "name": name}
                inv_order.append(name)
                section = ("involution", name)
            continue
        if section is None:
            raise SpecFileError(path, lineno, "content before any [section]")
        if section == "meta":
            if "=" not in line:
                raise SpecFileError(path, lineno, "meta lines look like 'key = value'")
            key, val = (t.strip() for t in line.split("=", 1))
            meta[key] = val
        elif section == "builder":
            if builder is not None:
                raise SpecFileError(path, lineno, "only one builder line allowed")
            builder = (line, lineno)
        elif section == "identities":
            if ":" not in line:
                raise SpecFileError(path, lineno, "identities lines look like 'key: cells...'")
            key, val = line.split(":", 1)
            identities.append((key.strip(), val.split(), lineno))
        elif section == "maps":
            toks = line.split()
            if len(toks) != 5 or toks[0] not in ("s", "t") or toks[3] != "->":
                raise SpecFileError(path, lineno, "maps lines look like 's <key> <cell> -> <cell>'")
            maps.append((toks[0], toks[1], toks[2], toks[4], lineno))
        elif section == "comp":
            if ":" not in line:
                raise SpecFileError(path, lineno, "comp lines look like 'key: x y -> z'")
            key, val = line.split(":", 1)
            toks = val.split()
            if len(toks) != 4 or toks[2] != "->":
                raise SpecFileError(path, lineno, "comp lines look like 'key: x y -> z'")
            comps.append((key.strip(), toks[0], toks[1], toks[3], lineno))
        elif isinstance(section, tuple) and section[0] == "involution":
            spec = involutions[section[1]]
            if "=" in line and "->" not in line:
                key, val = (t.strip() for t in line.split("=", 1))
                if key in ("variance", "covariant"):
                    spec[key] = (val, lineno)
                elif key == "hermitian":
                    spec["hermitian"] = val.lower() in ("1", "true", "yes")
                else:
                    raise SpecFileError(path, lineno, f"unknown involution key {key!r}")
            else:
                toks = line.split()
                if len(toks) != 3 or toks[1] != "->":
                    raise SpecFileError(path, lineno, "involution map lines look like 'x -> y'")
                spec["map"].append((toks[0], toks[2], lineno))
        elif section == "conjugation":
            conj_lines.append((line, lineno))
        else:
            raise SpecFileError(path, lineno, f"unknown section [{section}]")

    has_tables = bool(identities or comps or maps)
    if builder is not None and has_tables:
        raise SpecFileError(path, builder[1], "builder and explicit tables are mutually exclusive")
    if builder is None and not has_tables:
        raise SpecFileError(path, 0, "need either a [builder] or table sections")

    if builder is not None:
        cat = _run_builder(builder[0], builder[1], path)
    else:
        cat = _build_tables(meta, identities, maps, comps, path)

    names = {nm: i for i, nm in enumerate(cat.names)} if cat.names else {}

    def cell_id(tok, lineno):
        if tok in names:
            return names[tok]
        try:
            v = int(tok)
        except ValueError:
            raise SpecFileError(path, lineno, f"unknown cell {tok!r}") from None
        if not 0 <= v < cat.cell_count:
            raise SpecFileError(path, lineno, f"cell id {v} out of range")
        return v

    is_full = isinstance(cat, FullDepthCategory)

    def comp_key(tok, lineno):
        if is_full:
            return _parse_subset_token(tok, cat.directions, path, lineno)
        try:
            p = int(tok)
        except ValueError:
            raise SpecFileError(path, lineno, f"bad depth {tok!r}") from None
        if not 0 <= p < cat.depth:
            raise SpecFileError(path, lineno, f"depth {p} out of range")
        return p

    specs = {}
    for name in inv_order:
        raw_spec = involutions[name]
        if raw_spec["variance"] is None:
            raise SpecFileError(path, 0, f"involution {name} needs a variance")
        var_tok, var_line = raw_spec["variance"]
        variance = _parse_variance(var_tok, cat, is_full, path, var_line)
        covariant = None
        if raw_spec["covariant"] is not None:
            cov_tok, cov_line = raw_spec["covariant"]
            covariant = _parse_variance(cov_tok, cat, is_full, path, cov_line)
        mp = np.arange(cat.cell_count, dtype=np.int64)
        for xa, ya, lineno in raw_spec["map"]:
            mp[cell_id(xa, lineno)] = cell_id(ya, lineno)
        specs[name] = InvolutionSpec(variance=frozenset(variance), map=mp,
                                     hermitian=raw_spec["hermitian"],
                                     covariant=frozenset(covariant) if covariant is not None else None,
                                     name=name)

    conj = None
    conj_flags: tuple = ()
    if conj_lines:
        conj, conj_flags = _build_conjugation(cat, specs, conj_lines, cell_id, path)

    return ParsedSpec(cat, specs, conj, conj_flags, path)


def _parse_variance(tok, cat, is_full, path, lineno):
    tok = tok.strip()
    if tok == "-" or tok == "":
        return frozenset()
    if is_full:
        return frozenset(_parse_subset_token(t, cat.directions, path, lineno)
                         for t in tok.split(";") if t.strip())
    try:
        vals = [int(t) for t in tok.split(",")]
    except ValueError:
        raise SpecFileError(path, lineno, f"bad variance {tok!r}") from None
    for v in vals:
        if not 0 <= v < cat.depth:
            raise SpecFileError(path, lineno, f"variance depth {v} out of range")
    return frozenset(vals)


def _run_builder(line, lineno, path):
    toks = line.split()
    kind = toks[0]
    if kind == "pair_groupoid" and len(toks) == 2:
        try:
            return build_pair_groupoid(int(toks[1]))
        except ValueError:
            raise SpecFileError(path, lineno, "pair_groupoid needs an integer") from None
    if kind == "terminal" and len(toks) == 2:
        try:
            return build_terminal(int(toks[1]))
        except ValueError:
            raise SpecFileError(path, lineno, "terminal needs an integer") from None
    if kind == "product" and len(toks) >= 2:
        base_dir = os.path.dirname(os.path.abspath(path))
        factors = []
        for rel in toks[1:]:
            sub = parse_category(os.path.join(base_dir, rel))
            if not isinstance(sub.category, FiniteGlobularCategory) or sub.category.depth != 1:
                raise SpecFileError(path, lineno, f"product factor {rel} must be a depth-1 category")
            factors.append(sub.category)
        return build_product(factors)
    raise SpecFileError(path, lineno, f"unknown builder {line!r}")


def _build_tables(meta, identities, maps, comps, path):
    kind = meta.get("kind", "globular")
    if kind not in ("globular", "fulldepth"):
        raise SpecFileError(path, 0, f"kind must be globular or fulldepth, got {kind!r}")
    try:
        depth = int(meta["depth"])
    except (KeyError, ValueError):
        raise SpecFileError(path, 0, "meta needs an integer depth") from None
    if "cells" not in meta:
        raise SpecFileError(path, 0, "meta needs a cells list")
    cell_names = meta["cells"].split()
    if len(set(cell_names)) != len(cell_names):
        raise SpecFileError(path, 0, "duplicate cell names")
    m = len(cell_names)
    ids = {nm: i for i, nm in enumerate(cell_names)}
    is_full = kind == "fulldepth"
    nkeys = (1 << depth) if is_full else depth

    def key_of(tok, lineno):
        if is_full:
            return _parse_subset_token(tok, depth, path, lineno)
        try:
            p = int(tok)
        except ValueError:
            raise SpecFileError(path, lineno, f"bad depth {tok!r}") from None
        if not 0 <= p < depth:
            raise SpecFileError(path, lineno, f"depth {p} out of range")
        return p

    def cid(tok, lineno):
        if tok not in ids:
            raise SpecFileError(path, lineno, f"unknown cell {tok!r}")
        return ids[tok]

    ident = np.zeros((nkeys, m), bool)
    seen_ident = set()
    for key_tok, cells, lineno in identities:
        key = key_of(key_tok, lineno)
        seen_ident.add(key)
        for tok in cells:
            ident[key, cid(tok, lineno)] = True
    if len(seen_ident) != nkeys:
        raise SpecFileError(path, 0, f"identities must cover all {nkeys} compositions")
    comp = np.full((nkeys, m, m), -1, np.int64)
    for key_tok, xa, ya, za, lineno in comps:
        key = key_of(key_tok, lineno)
        comp[key, cid(xa, lineno), cid(ya, lineno)] = cid(za, lineno)
    src = np.full((nkeys, m), -1, np.int64)
    tgt = np.full((nkeys, m), -1, np.int64)
    for st, key_tok, xa, ya, lineno in maps:
        key = key_of(key_tok, lineno)
        arr = src if st == "s" else tgt
        arr[key, cid(xa, lineno)] = cid(ya, lineno)
    # derive missing source/target entries from the tables
    for key in range(nkeys):
        id_list = np.nonzero(ident[key])[0]
        for x in range(m):
            if src[key, x] < 0:
                hits = [e for e in id_list if comp[key, x, e] == x]
                if len(hits) != 1:
                    raise SpecFileError(
                        path, 0, f"cannot derive a unique source of cell {cell_names[x]} "
                        f"at {key}; add explicit [maps] lines")
                src[key, x] = hits[0]
            if tgt[key, x] < 0:
                hits = [e for e in id_list if comp[key, e, x] == x]
                if len(hits) != 1:
                    raise SpecFileError(
                        path, 0, f"cannot derive a unique target of cell {cell_names[x]} "
                        f"at {key}; add explicit [maps] lines")
                tgt[key, x] = hits[0]
    if is_full:
        return FullDepthCategory(depth, m, ident, src, tgt, comp, tuple(cell_names))
    return FiniteGlobularCategory(depth, m, ident, src, tgt, comp, tuple(cell_names))


def _build_conjugation(cat, specs, conj_lines, cell_id, path):
    if not isinstance(cat, FiniteGlobularCategory) or cat.depth != 2:
        raise SpecFileError(path, conj_lines[0][1], "conjugation needs a depth-2 globular base")
    star_name = None
    flags: list = []
    m = cat.cell_count
    bar = np.full(m, -1, np.int64)
    runit = np.full(m, -1, np.int64)
    rcounit = np.full(m, -1, np.int64)
    for line, lineno in conj_lines:
        toks = line.split()
        if toks[0] == "star" and len(toks) == 3 and toks[1] == "=":
            star_name = toks[2]
        elif toks[0] == "flags" and toks[1] == "=":
            for f in toks[2:]:
                if f not in CONJ_FLAGS:
                    raise SpecFileError(path, lineno, f"unknown conjugation flag {f!r}")
                flags.append(f)
        elif toks[0] in ("bar", "R", "Rbar") and len(toks) == 4 and toks[2] == "->":
            arr = {"bar": bar, "R": runit, "Rbar": rcounit}[toks[0]]
            arr[cell_id(toks[1], lineno)] = cell_id(toks[3], lineno)
        else:
            raise SpecFileError(path, lineno, f"bad conjugation line {line!r}")
    if star_name is None or star_name not in specs:
        raise SpecFileError(path, 0, "conjugation needs 'star = <involution name>'")
    data = ConjugationData(cat, specs[star_name], bar, runit, rcounit)
    return data, tuple(flags)


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def write_category(path, cat, involutions=None, conjugation=None, conj_flags=()):
    is_full = isinstance(cat, FullDepthCategory)
    names = cat.names or tuple(f"c{i}" for i in range(cat.cell_count))
    from .ncat import mask_levels

    def key_tok(key):
        if is_full:
            return "{" + ",".join(str(v) for v in mask_levels(key)) + "}"
        return str(key)

    nkeys = (1 << cat.directions) if is_full else cat.depth
    lines = ["[meta]"]
    lines.append(f"kind = {'fulldepth' if is_full else 'globular'}")
    lines.append(f"depth = {cat.directions if is_full else cat.depth}")
    lines.append("cells = " + " ".join(names))
    lines.append("")
    lines.append("[identities]")
    for key in range(nkeys):
        ids = np.nonzero(cat.is_identity[key])[0]
        lines.append(f"{key_tok(key)}: " + " ".join(names[i] for i in ids))
    lines.append("")
    lines.append("[maps]")
    for key in range(nkeys):
        for x in range(cat.cell_count):
            lines.append(f"s {key_tok(key)} {names[x]} -> {names[cat.source[key, x]]}")
            lines.append(f"t {key_tok(key)} {names[x]} -> {names[cat.target[key, x]]}")
    lines.append("")
    lines.append("[comp]")
    for key in range(nkeys):
        xs, ys = np.nonzero(cat.comp[key] >= 0)
        for x, y in zip(xs, ys):
            z = cat.comp[key, x, y]
            lines.append(f"{key_tok(key)}: {names[x]} {names[y]} -> {names[z]}")
    for name, spec in (involutions or {}).items():
        lines.append("")
        lines.append(f"[involution {name}]")
        if is_full:
            var = ";".join("{" + ",".join(str(v) for v in mask_levels(k)) + "}"
                           for k in sorted(spec.variance))
            lines.append(f"variance = {var if var else '-'}")
            if spec.covariant is not None:
                cov = ";".join("{" + ",".join(str(v) for v in mask_levels(k)) + "}"
                               for k in sorted(spec.covariant))
                lines.append(f"covariant = {cov if cov else '-'}")
        else:
            var = ",".join(str(v) for v in sorted(spec.variance))
            lines.append(f"variance = {var if var else '-'}")
        if spec.hermitian:
            lines.append("hermitian = true")
        for x in range(cat.cell_count):
            if spec.map[x] != x:
                lines.append(f"{names[x]} -> {names[spec.map[x]]}")
    if conjugation is not None:
        star_key = conjugation.star.name
        for key, spec in (involutions or {}).items():
            if spec is conjugation.star or np.array_equal(spec.map, conjugation.star.map):
                star_key = key
                break
        lines.append("")
        lines.append("[conjugation]")
        lines.append(f"star = {star_key}")
        if conj_flags:
            lines.append("flags = " + " ".join(conj_flags))
        for x in range(cat.cell_count):
            if conjugation.bar[x] >= 0:
                lines.append(f"bar {names[x]} -> {names[conjugation.bar[x]]}")
            if conjugation.runit[x] >= 0:
                lines.append(f"R {names[x]} -> {names[conjugation.runit[x]]}")
            if conjugation.rcounit[x] >= 0:
                lines.append(f"Rbar {names[x]} -> {names[conjugation.rcounit[x]]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_section(path, base_cells=None, dim=None):
    """Read a section file; returns a (cells,) or (cells, d, d) complex array."""
    with open(path) as fh:
        raw = fh.readlines()
    header = None
    cells = None
    rows = {}
    current = None
    block: list = []
    d = dim

    def flush(lineno):
        nonlocal current, block, d
        if current is None:
            return
        if not block:
            raise SpecFileError(path, lineno, f"cell {current} has no matrix rows")
        if d is None:
            d = len(block)
        if len(block) != d or any(len(r) != d for r in block):
            raise SpecFileError(path, lineno, f"cell {current}: expected {d}x{d} block")
        rows[current] = np.array(block, np.complex128)
        current, block = None, []

    for lineno, rawline in enumerate(raw, 1):
        line = _strip(rawline)
        if not line:
            continue
        toks = line.split()
        if header is None:
            if toks[0] != "section" or len(toks) != 2:
                raise SpecFileError(path, lineno, "expected header 'section <base-cells>'")
            try:
                cells = int(toks[1])
            except ValueError:
                raise SpecFileError(path, lineno, "bad cell count") from None
            if base_cells is not None and cells != base_cells:
                raise SpecFileError(path, lineno,
                                    f"section is over {cells} cells, base has {base_cells}")
            header = True
            continue
        if len(toks) == 3:
            flush(lineno)
            try:
                c = int(toks[0])
                rows[c] = complex(float(toks[1]), float(toks[2]))
            except ValueError:
                raise SpecFileError(path, lineno, "bad scalar record") from None
        elif len(toks) == 1:
            flush(lineno)
            try:
                current = int(toks[0])
            except ValueError:
                raise SpecFileError(path, lineno, "bad cell id") from None
        else:
            if current is None:
                raise SpecFileError(path, lineno, "matrix row outside a cell block")
            if len(toks) % 2:
                raise SpecFileError(path, lineno, "matrix rows hold re im pairs")
            try:
                vals = [float(t) for t in toks]
            except ValueError:
                raise SpecFileError(path, lineno, "bad number in matrix row") from None
            block.append([complex(vals[2 * i], vals[2 * i + 1]) for i in range(len(vals) // 2)])
    flush(len(raw))
    if header is None:
        raise SpecFileError(path, 0, "empty section file")
    scalar = all(np.isscalar(v) or np.ndim(v) == 0 for v in rows.values())
    for c in rows:
        if not 0 <= c < cells:
            raise SpecFileError(path, 0, f"cell id {c} out of range")
    if scalar and d is None:
        out = np.zeros(cells, np.complex128)
        for c, v in rows.items():
            out[c] = v
        return out
    if d is None:
        raise SpecFileError(path, 0, "could not infer matrix dimension")
    out = np.zeros((cells, d, d), np.complex128)
    for c, v in rows.items():
        if np.ndim(v) == 0:
            raise SpecFileError(path, 0, f"cell {c}: scalar record in a matrix section")
        out[c] = v
    return out


def write_section(path_or_file, data):
    data = np.asarray(data, np.complex128)

    def emit(fh):
        fh.write(f"section {data.shape[0]}\n")
        if data.ndim == 1:
            for c, v in enumerate(data):
                if v != 0:
                    fh.write(f"{c} {float(v.real)!r} {float(v.imag)!r}\n")
        else:
            for c in range(data.shape[0]):
                blk = data[c]
                if not np.any(blk):
                    continue
                fh.write(f"{c}\n")
                for row in blk:
                    fh.write(" ".join(f"{float(v.real)!r} {float(v.imag)!r}"
                                      for v in row) + "\n")

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w") as fh:
            emit(fh)
