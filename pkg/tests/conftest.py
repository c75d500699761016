import numpy as np
import pytest

from hicat.fixtures import cyclic_table, s3_table


@pytest.fixture(scope="session")
def s3():
    return s3_table()


@pytest.fixture(scope="session")
def z4():
    return cyclic_table(4)


def rebuild_with(cat, **overrides):
    """Copy a frozen category with some arrays replaced (for mutation tests)."""
    from hicat.ncat import FiniteGlobularCategory, FullDepthCategory

    kw = dict(is_identity=np.array(cat.is_identity), source=np.array(cat.source),
              target=np.array(cat.target), comp=np.array(cat.comp), names=cat.names)
    kw.update(overrides)
    if isinstance(cat, FullDepthCategory):
        return FullDepthCategory(cat.directions, cat.cell_count, **kw)
    return FiniteGlobularCategory(cat.depth, cat.cell_count, **kw)
