"""
Tests for chains, allowed paths, Omega bases and face maps
"""

import pytest

from pathchains.core.exceptions import ContractViolation, NotInSpanError, UndefinedEndpointsError
from pathchains.layers.chains import (
    Chain,
    allowed_paths,
    dimension_two_generators,
    face_head,
    face_tail,
    head,
    head_set,
    is_in_omega,
    magnitude_partial,
    omega_basis,
    omega_rank_by_boundary,
    omega_rank_unblocked,
    path_boundary,
    tail,
)
from pathchains.layers.digraph import Digraph, gen_family, quasi_metric, random_digraph
from pathchains.layers.exact_linalg import Ring

RING_SPECS = ["q", "z", "zp:2", "zp:3"]


def test_chain_arithmetic(q, square_chain):
    assert not square_chain + (-square_chain)
    assert square_chain.scale(2).coefficient(("a", "c", "d")) == -2
    assert len(square_chain) == 2
    assert square_chain.coefficient(("a", "b", "c")) == 0


def test_chain_rejects_wrong_dimension(q):
    with pytest.raises(ValueError):
        Chain(1, q, {("a", "b", "c"): 1})
    with pytest.raises(ValueError):
        Chain.path(q, "a", "b") + Chain.path(q, "a")


def test_chain_over_prime_field_drops_multiples_of_p(z3):
    x = Chain.path(z3, "a", "b") + Chain.path(z3, "a", "b") + Chain.path(z3, "a", "b")
    assert not x


def test_render(q, z3, square_chain):
    assert square_chain.render() == "e(a,b,d) - e(a,c,d)"
    assert (-square_chain).render() == "-e(a,b,d) + e(a,c,d)"
    assert Chain.path(z3, "a", "b", coefficient=2).render() == "-e(a,b)"
    assert Chain.path(q, "a", "b", coefficient=3).render() == "3*e(a,b)"
    assert Chain.zero(q, 1).render() == "0"


def test_normalized(square_chain):
    reference, sign = (-square_chain).normalized()
    assert reference == square_chain
    assert sign == -1


def test_to_json_uses_symmetric_residues(z3):
    x = Chain.path(z3, "a", "b", coefficient=2)
    assert x.to_json() == [{"path": ["a", "b"], "coefficient": -1}]


def test_endpoints(square_chain):
    assert head_set(square_chain) == frozenset({"d"})
    assert head(square_chain) == "d"
    assert tail(square_chain) == "a"


def test_endpoints_of_zero_chain(q):
    with pytest.raises(UndefinedEndpointsError):
        head_set(Chain.zero(q, 2))


def test_head_of_disconnected_chain(q):
    x = Chain.path(q, "a", "b") + Chain.path(q, "a", "c")
    with pytest.raises(ContractViolation):
        head(x)


def test_allowed_paths(square):
    assert allowed_paths(square, 0) == (("a",), ("b",), ("c",), ("d",))
    assert allowed_paths(square, 2) == (("a", "b", "d"), ("a", "c", "d"))
    assert allowed_paths(square, 3) == ()
    assert allowed_paths(square, -1) == ()


def test_allowed_paths_on_a_cycle(triangle_cycle):
    assert ("a", "b", "c", "a") in allowed_paths(triangle_cycle, 3)
    assert len(allowed_paths(triangle_cycle, 5)) == 3


def test_magnitude_partial(square, q):
    d = quasi_metric(square)
    x = Chain.path(q, "a", "b", "d")
    assert magnitude_partial(x, 1, d) == Chain.path(q, "a", "d")
    with pytest.raises(ValueError):
        magnitude_partial(x, 2, d)


def test_is_in_omega(square, q, square_chain):
    assert is_in_omega(square_chain, square)
    assert not is_in_omega(Chain.path(q, "a", "b", "d"), square)
    assert not is_in_omega(Chain.path(q, "a", "d"), square)


def test_path_boundary_of_an_edge(square, q):
    assert path_boundary(Chain.path(q, "a", "b"), square) == Chain.path(q, "b") - Chain.path(q, "a")


def test_path_boundary_of_a_square(square, q, square_chain):
    expected = (
        Chain.path(q, "b", "d") - Chain.path(q, "c", "d") + Chain.path(q, "a", "b") - Chain.path(q, "a", "c")
    )
    assert path_boundary(square_chain, square) == expected
    assert not path_boundary(path_boundary(square_chain, square), square)


def test_path_boundary_checks_membership(square, q):
    with pytest.raises(ContractViolation):
        path_boundary(Chain.path(q, "a", "b", "d"), square, check=True)


def test_path_boundary_drops_irregular_terms(q):
    g = Digraph.from_edges([("a", "b"), ("b", "a")])
    double = Chain.path(q, "a", "b", "a")
    assert is_in_omega(double, g)
    assert path_boundary(double, g) == Chain.path(q, "b", "a") + Chain.path(q, "a", "b")


def test_face_maps(q, square_chain):
    assert face_head(square_chain, "b") == Chain.path(q, "a", "b")
    assert face_head(square_chain, "c") == -Chain.path(q, "a", "c")
    assert face_tail(square_chain, "b") == Chain.path(q, "b", "d")
    assert not face_head(square_chain, "a")
    assert face_head(Chain.path(q, "a"), "a") == Chain.zero(q, -1)


def test_square_basis(square, q):
    basis = omega_basis(square, 2, q)
    assert basis.elements() == [Chain.path(q, "a", "b", "d") - Chain.path(q, "a", "c", "d")]
    assert list(basis.blocks) == [("a", "d")]


@pytest.mark.parametrize("spec", RING_SPECS)
def test_low_dimensions_are_vertices_and_edges(spec):
    ring = Ring.parse(spec)
    for seed in range(5):
        g = random_digraph(6, "3/10", seed)
        assert omega_basis(g, 0, ring).rank == len(g.vertices)
        assert omega_basis(g, 1, ring).rank == len(g.edges)


def test_trapezohedron_dimensions(trapezohedron2, q):
    assert [omega_basis(trapezohedron2, n, q).rank for n in range(5)] == [6, 8, 4, 1, 0]


@pytest.mark.parametrize("spec", RING_SPECS)
def test_trapezohedron_top_dimension(spec):
    for t in (2, 3, 4):
        assert omega_basis(gen_family("trapezohedron", t), 3, Ring.parse(spec)).rank == 1


@pytest.mark.parametrize("spec", ["q", "zp:2"])
def test_multisquare_chain_top_dimension(spec):
    for t in (3, 4, 5):
        assert omega_basis(gen_family("multisquare-chain", t), t, Ring.parse(spec)).rank == 2


def test_multisquare_over_z3(z3, q):
    g = gen_family("multisquare", 3)
    assert omega_basis(g, 2, z3).rank == 2
    assert omega_basis(g, 2, q).rank == 2


@pytest.mark.parametrize("spec", RING_SPECS)
def test_basis_elements_lie_in_omega(spec):
    ring = Ring.parse(spec)
    for seed in range(5):
        g = random_digraph(7, "3/10", seed)
        for n in range(5):
            assert all(is_in_omega(x, g) for x in omega_basis(g, n, ring).elements())


@pytest.mark.parametrize("spec", ["q", "zp:2", "zp:3"])
def test_rank_cross_checks(spec):
    """Blocked kernel, unblocked kernel and boundary preimage agree"""
    ring = Ring.parse(spec)
    for seed in range(4):
        g = random_digraph(6, "2/5", seed)
        for n in range(4):
            blocked = omega_basis(g, n, ring).rank
            assert blocked == omega_rank_unblocked(g, n, ring)
            assert blocked == omega_rank_by_boundary(g, n, ring)


def test_decompose(square, q, square_chain):
    basis = omega_basis(square, 2, q)
    assert basis.decompose(square_chain.scale(3)) == [(square_chain, 3)]
    assert basis.coordinates(Chain.zero(q, 2)) == [0]


def test_decompose_outside_span(square, q):
    basis = omega_basis(square, 2, q)
    with pytest.raises(NotInSpanError):
        basis.decompose(Chain.path(q, "a", "b", "d"))
    with pytest.raises(NotInSpanError):
        omega_basis(square, 1, q).decompose(Chain.path(q, "a", "d"))


def test_integer_basis_is_a_lattice_basis(z):
    """Over Z a multisquare block needs no fractional coefficients"""
    g = gen_family("multisquare", 3)
    basis = omega_basis(g, 2, z)
    x = Chain.path(z, "u", "v1", "w") - Chain.path(z, "u", "v3", "w")
    assert sum(abs(c) for _, c in basis.decompose(x)) >= 1
    assert all(isinstance(c, int) for _, c in basis.decompose(x))


def test_dimension_two_generators(square, q):
    assert dimension_two_generators(square, q) == [Chain.path(q, "a", "b", "d") - Chain.path(q, "a", "c", "d")]


def test_dimension_two_generators_include_triangles_and_double_edges(q):
    g = Digraph.from_edges([("a", "b"), ("b", "c"), ("a", "c"), ("c", "b")])
    generators = dimension_two_generators(g, q)
    assert Chain.path(q, "a", "b", "c") in generators
    assert Chain.path(q, "b", "c", "b") in generators
    assert Chain.path(q, "c", "b", "c") in generators


@pytest.fixture
def numbered_square() -> Digraph:
    """Square whose middle vertices sort differently by name and by index"""
    return Digraph.from_edges([("s", "2"), ("s", "10"), ("2", "t"), ("10", "t")])


def test_normalized_by_vertex_index(numbered_square, q):
    chain = Chain.path(q, "s", "10", "t") - Chain.path(q, "s", "2", "t")
    assert chain.normalized() == (chain, 1)
    assert chain.normalized(numbered_square.path_key) == (-chain, -1)


def test_basis_signs_follow_vertex_index(numbered_square, q, z):
    for ring in (q, z):
        (x,) = omega_basis(numbered_square, 2, ring).elements()
        assert x == Chain.path(ring, "s", "2", "t") - Chain.path(ring, "s", "10", "t")
        assert x.normalized(numbered_square.path_key) == (x, 1)


@pytest.mark.parametrize("seed", range(5))
def test_integer_and_rational_dimensions_agree(seed, q, z):
    g = random_digraph(7, "2/5", seed)
    for n in range(5):
        assert omega_basis(g, n, z).rank == omega_basis(g, n, q).rank
