import numpy as np
import pytest

from gerbechar import (
    build_group,
    coset_gset,
    make_cocycle,
    make_gerbe,
    trivial_gerbe,
    trivial_gset,
)


@pytest.fixture(scope="session")
def S3():
    return build_group("symmetric(3)")


@pytest.fixture(scope="session")
def Z4():
    return build_group("cyclic(4)")


@pytest.fixture(scope="session")
def Z22():
    return build_group("product(cyclic(2),cyclic(2))")


@pytest.fixture(scope="session")
def D4():
    return build_group("dihedral(4)")


def bilinear_point_gerbe(Z22):
    """The Z2xZ2 point gerbe with exp(g2, g1) = (g2)_2 (g1)_1 at N=2."""
    pt = trivial_gset(Z22, 1)
    exp = np.zeros((1, 4, 4), dtype=np.int64)
    for g2 in range(4):
        for g1 in range(4):
            exp[0, g2, g1] = (g2 % 2) * (g1 // 2)
    return make_gerbe(pt, None, make_cocycle(pt, 2, exp))


@pytest.fixture(scope="session")
def bilinear_gerbe(Z22):
    return bilinear_point_gerbe(Z22)


@pytest.fixture(scope="session")
def s3_coset_gerbe(S3):
    return trivial_gerbe(coset_gset(S3, [1]))


@pytest.fixture(scope="session")
def s3_point_gerbe(S3):
    return trivial_gerbe(trivial_gset(S3, 1))
