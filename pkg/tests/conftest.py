"""
Shared fixtures: rings, small digraphs and family members
"""

import pytest

from pathchains.layers.chains import Chain
from pathchains.layers.digraph import Digraph, gen_family
from pathchains.layers.exact_linalg import Ring


@pytest.fixture
def q() -> Ring:
    return Ring.rationals()


@pytest.fixture
def z() -> Ring:
    return Ring.integers()


@pytest.fixture
def z2() -> Ring:
    return Ring.prime_field(2)


@pytest.fixture
def z3() -> Ring:
    return Ring.prime_field(3)


@pytest.fixture
def square() -> Digraph:
    """a -> b -> d and a -> c -> d"""
    return Digraph.from_edges([("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


@pytest.fixture
def square_chain(q) -> Chain:
    return Chain.path(q, "a", "b", "d") - Chain.path(q, "a", "c", "d")


@pytest.fixture
def triangle_cycle() -> Digraph:
    return Digraph.from_edges([("a", "b"), ("b", "c"), ("c", "a")])


@pytest.fixture
def trapezohedron2() -> Digraph:
    return gen_family("trapezohedron", 2)


@pytest.fixture(scope="session")
def euler3() -> Digraph:
    return gen_family("euler", 3)


@pytest.fixture(scope="session")
def multiplicity2() -> Digraph:
    return gen_family("multiplicity", 2)
