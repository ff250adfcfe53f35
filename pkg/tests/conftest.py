import pytest

from genwait import constructions as cx
from genwait.lattice import enumerate_subgroups

# built once per session; lattice enumeration of the medium groups is the
# expensive part of the suite outside the acceptance tests
_GROUPS: dict = {}
_LATTICES: dict = {}


def group(spec: str):
    if spec not in _GROUPS:
        _GROUPS[spec] = cx.build(spec)
    return _GROUPS[spec]


def lattice(spec: str):
    if spec not in _LATTICES:
        _LATTICES[spec] = enumerate_subgroups(group(spec))
    return _LATTICES[spec]


@pytest.fixture(scope="session")
def s3():
    return group("sym(3)")


@pytest.fixture(scope="session")
def s3_lattice():
    return lattice("sym(3)")


@pytest.fixture(scope="session")
def q8_lattice():
    return lattice("quaternion8()")


@pytest.fixture(scope="session")
def a4_lattice():
    return lattice("alt(4)")
