from importlib.resources import files

import pytest

from k0silting.homotopycat import ProjComplex, ProjMap, load_complex
from k0silting.pathalgebra import load_algebra
from k0silting.silting import SiltingCollection, load_collection, stalk_collection, verify_hom_vanishing

FIXTURES = files("k0silting") / "fixtures"


def fixture_path(name):
    return str(FIXTURES / name)


@pytest.fixture(scope="session")
def a3():
    return load_algebra(fixture_path("a3.algebra.json"))


@pytest.fixture(scope="session")
def s1(a3):
    return load_complex(a3, fixture_path("s1.complex.json"))


@pytest.fixture(scope="session")
def s3(a3):
    return load_complex(a3, fixture_path("s3.complex.json"))


@pytest.fixture(scope="session")
def x_example(a3):
    return load_complex(a3, fixture_path("x_example.complex.json"))


@pytest.fixture(scope="session")
def stalks(a3):
    return stalk_collection(a3)


@pytest.fixture(scope="session")
def rigid2(a3):
    return verify_hom_vanishing(load_collection(a3, fixture_path("rigid2.json"))).collection


@pytest.fixture(scope="session")
def mutated(a3):
    """P1 + P2 + (P3 -beta-> P2): the stalk collection mutated at vertex 3."""
    beta = a3.path_element(["beta"])
    t = ProjComplex(a3, {-1: ["3"], 0: ["2"]}, {-1: ProjMap(a3, ["3"], ["2"], {(0, 0): beta})})
    m = SiltingCollection(a3, {"P1": ProjComplex.stalk(a3, "1"), "P2": ProjComplex.stalk(a3, "2"), "C": t})
    return verify_hom_vanishing(m).collection
