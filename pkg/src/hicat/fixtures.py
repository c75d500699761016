"""Reusable finite fixtures: group tables and exchange/collapse batteries."""

from __future__ import annotations

import itertools

import numpy as np

from .ncat import (FiniteGlobularCategory, build_double_deloop, build_pair_groupoid,
                   build_terminal, suspend)


def cyclic_table(n: int) -> np.ndarray:
    return np.array([[(i + j) % n for j in range(n)] for i in range(n)], np.int64)


def klein_table() -> np.ndarray:
    # Z2 x Z2 via xor
    return np.array([[i ^ j for j in range(4)] for i in range(4)], np.int64)


def s3_table():
    """Symmetric group on 3 letters; returns (table, names)."""
    perms = list(itertools.permutations(range(3)))

    def mul(a, b):
        return tuple(a[b[i]] for i in range(3))

    table = np.array([[perms.index(mul(a, b)) for b in perms] for a in perms], np.int64)
    names = ["".join(str(v) for v in p) for p in perms]
    return table, names


def collapse_battery() -> list[tuple[str, FiniteGlobularCategory]]:
    """Small categories with classical exchange, depths 2-3, for the
    Eckmann-Hilton collapse checks.  The double deloopings have genuinely
    non-trivial diagonal blocks (the whole commutative group)."""
    return [
        ("terminal2", build_terminal(2)),
        ("terminal3", build_terminal(3)),
        ("double_deloop_z4", build_double_deloop(cyclic_table(4))),
        ("double_deloop_z6", build_double_deloop(cyclic_table(6))),
        ("double_deloop_klein", build_double_deloop(klein_table())),
        ("suspended_pair3", suspend(build_pair_groupoid(3))),
        ("suspended_double_deloop_z4", suspend(build_double_deloop(cyclic_table(4)))),
    ]
