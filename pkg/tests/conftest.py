import pytest

from circleloc.cli import bundled
from circleloc.delzant import restrict_to_circle
from circleloc.fixedpoints import FixedPointDatum, FixedPointSet
from circleloc.formats import parse_input

XI = (1, 2, 4, 8)
XI_ALT = (1, 3, 9, 27)
POLYTOPES = ("simplex4", "cube4", "p2xp2")


def load(name):
    return parse_input(bundled(name + ".json"))


@pytest.fixture(scope="session")
def simplex():
    return load("simplex4")


@pytest.fixture(scope="session")
def cube():
    return load("cube4")


@pytest.fixture(scope="session")
def p2xp2():
    return load("p2xp2")


@pytest.fixture(scope="session")
def cp4(simplex):
    return restrict_to_circle(simplex, XI)


@pytest.fixture(scope="session")
def cp4_raw(simplex):
    return restrict_to_circle(simplex, XI, normalize=False)


@pytest.fixture
def cp1():
    return FixedPointSet(2, (FixedPointDatum("S", 0, (1,)), FixedPointDatum("N", 1, (-1,))))
