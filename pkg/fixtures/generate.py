#!/usr/bin/env python3
"""Regenerate the text fixtures in this directory from the library builders."""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hicat.coeff import MatrixAlgebra
from hicat.convolution import ConvolutionAlgebra, embedded_table_category
from hicat.fixtures import s3_table
from hicat.hypermatrix import Hypermatrix, save_hyper
from hicat.involutive import InvolutionSpec, group_conjugation_fixture
from hicat.ncat import build_pair_groupoid, build_terminal, suspend
from hicat.specfile import write_category

HERE = os.path.dirname(os.path.abspath(__file__))


def path(name):
    return os.path.join(HERE, name)


def main():
    with open(path("pairgroupoid3.cat"), "w") as fh:
        fh.write("[builder]\npair_groupoid 3\n")
    with open(path("pairgroupoid2.cat"), "w") as fh:
        fh.write("[builder]\npair_groupoid 2\n")
    with open(path("terminal2.cat"), "w") as fh:
        fh.write("[builder]\nterminal 2\n")
    with open(path("product22.cat"), "w") as fh:
        fh.write("[builder]\nproduct pairgroupoid2.cat pairgroupoid2.cat\n")

    # pair groupoid with a deliberately associativity-breaking entry
    pg = build_pair_groupoid(3)
    comp = np.array(pg.comp)
    comp[0, 1, 5] = 5  # (1,2) o (2,3) set to (2,3) instead of (1,3)
    from hicat.ncat import FiniteGlobularCategory

    broken = FiniteGlobularCategory(1, 9, np.array(pg.is_identity), np.array(pg.source),
                                    np.array(pg.target), comp, pg.names)
    write_category(path("broken_assoc.cat"), broken)

    # suspended pair groupoid with its two standard involutions
    s = suspend(build_pair_groupoid(2))
    i0 = InvolutionSpec(variance=frozenset({0}),
                        map=np.array([0, 2, 1, 3]), hermitian=True, name="star0")
    i1 = InvolutionSpec(variance=frozenset({1}), map=np.arange(4), hermitian=True,
                        name="star1")
    write_category(path("suspended_pg2.cat"), s, involutions={"star0": i0, "star1": i1})

    # the embedded convolution 2-category over the terminal base with M2
    # coefficients, materialized over the matrix-unit monoid
    alg = ConvolutionAlgebra(build_terminal(2), MatrixAlgebra(2))
    cat, _gens, _names = embedded_table_category(alg)
    write_category(path("conv_m2_terminal2.cat"), cat)

    # delooped symmetric group with inverse conjugates and trivial units
    table, names = s3_table()
    data = group_conjugation_fixture(table, names)
    write_category(path("s3_conjugation.cat"), data.base,
                   involutions={"star1": data.star}, conjugation=data,
                   conj_flags=("unitality", "involutivity", "tensorial", "traciability"))

    save_hyper(path("ones2.hyp"), Hypermatrix((2,), np.ones((2, 2))))
    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
