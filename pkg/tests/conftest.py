from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from outerfp.automorphisms import OuterAutomorphism
from outerfp.factor_systems import build_thistle
from outerfp.graphs import build_graph
from outerfp.groups import cyclic

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

Z2, Z3 = cyclic(2), cyclic(3)

CYCLIC_IMAGES = {"v1.g1": "v2.g1", "v2.g1": "v3.g1", "v3.g1": "v1.g1"}
CYCLIC_INVERSE = {"v1.g1": "v3.g1", "v2.g1": "v1.g1", "v3.g1": "v2.g1"}
DOUBLE_SWAP = {"v1.g1": "v2.g1", "v2.g1": "v1.g1", "v3.g1": "v4.g1", "v4.g1": "v3.g1"}


def star3(lengths=None):
    return build_thistle([Z2, Z2, Z2], 0, lengths)


def star4():
    return build_thistle([Z2, Z2, Z2, Z2], 0)


def edge23(length=1):
    return build_thistle([Z2, Z3], 0, [length])


def two_spoke23(l1=Fraction(1, 2), l2=Fraction(1, 2)):
    """Z2 and Z3 hung off a free centre; fails validation (free vertex of
    degree 2) but is a perfectly good tree for length computations."""
    return build_graph({"v1": Z2, "v2": Z3, "vinf": None}, [("e1", "e1'", "v1", "vinf", l1), ("e2", "e2'", "v2", "vinf", l2)])


def rose2(center=None):
    return build_graph({"c": center}, [("x", "x'", "c", "c", 1), ("y", "y'", "c", "c", 1)])


def cyclic_auto(X=None):
    X = X or star3()
    return OuterAutomorphism.from_images(X, CYCLIC_IMAGES, CYCLIC_INVERSE)


def double_swap(X=None):
    X = X or star4()
    return OuterAutomorphism.from_images(X, DOUBLE_SWAP, DOUBLE_SWAP)


def instance_suite():
    """(name, graph, automorphism) triples used across the suite."""
    T3 = star3()
    E = edge23()
    P = build_thistle([Z2], 1)
    Q = build_thistle([Z2, Z2, Z3])
    return [
        ("cyclic-star3", T3, cyclic_auto(T3)),
        ("identity-star3", T3, OuterAutomorphism.identity(T3)),
        ("identity-edge23", E, OuterAutomorphism.identity(E)),
        ("invert-z3-edge23", E, OuterAutomorphism.from_images(E, {"v2.g1": "v2.g2"}, {"v2.g1": "v2.g2"})),
        ("twist-z2-petal", P, OuterAutomorphism.from_images(P, {"p1": "p1*v1.g1"}, {"p1": "p1*v1.g1"})),
        ("swap-z2z2z3", Q, OuterAutomorphism.from_images(Q, {"v1.g1": "v2.g1", "v2.g1": "v1.g1"}, {"v1.g1": "v2.g1", "v2.g1": "v1.g1"})),
        (
            "partial-conj-z2z2z3",
            Q,
            OuterAutomorphism.from_images(Q, {"v1.g1": "v3.g1*v1.g1*v3.g2"}, {"v1.g1": "v3.g2*v1.g1*v3.g1"}),
        ),
        ("double-swap-star4", star4(), double_swap()),
    ]


@pytest.fixture
def T3():
    return star3()


@pytest.fixture
def E():
    return edge23()


@pytest.fixture
def alpha(T3):
    return cyclic_auto(T3)
