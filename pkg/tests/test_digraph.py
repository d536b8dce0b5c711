"""
Tests for the digraph model, edge-list documents, families and random instances
"""

from fractions import Fraction
from itertools import product

import pytest

from pathchains.core.exceptions import DigraphParseError, DigraphValidationError, FamilyDomainError
from pathchains.layers.digraph import (
    FAMILIES,
    INFINITY,
    Digraph,
    gen_family,
    parse_digraph,
    quasi_metric,
    random_digraph,
    serialize,
)


def test_from_edges_appends_unlisted_vertices():
    g = Digraph.from_edges([("b", "c"), ("a", "b")], ["z"])
    assert g.vertices == ("z", "b", "c", "a")
    assert g.has_edge("a", "b")
    assert not g.has_edge("b", "a")


def test_loop_rejected():
    with pytest.raises(DigraphValidationError):
        Digraph.from_edges([("a", "a")])


def test_undeclared_endpoint_rejected():
    with pytest.raises(DigraphValidationError):
        Digraph(("a",), frozenset({("a", "b")}))


def test_sorted_edges_follow_vertex_order(square):
    assert square.sorted_edges() == [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
    assert square.successors("a") == ("b", "c")
    assert square.predecessors("d") == ("b", "c")


def test_parse_digraph():
    text = "# comment\n\nvertex z\na b\n  b c  \na b\n"
    g = parse_digraph(text)
    assert g.vertices == ("z", "a", "b", "c")
    assert g.edges == frozenset({("a", "b"), ("b", "c")})


def test_parse_reports_line_number():
    with pytest.raises(DigraphParseError) as excinfo:
        parse_digraph("a b\na b c\n")
    assert excinfo.value.line_number == 2
    assert "line 2" in str(excinfo.value)


def test_parse_rejects_loops():
    with pytest.raises(DigraphValidationError):
        parse_digraph("a a\n")


def test_parse_empty_document():
    g = parse_digraph("# nothing here\n")
    assert g.vertices == ()
    assert g.edges == frozenset()


def test_serialize_round_trip(square):
    g = Digraph.from_edges(square.sorted_edges(), ["d", "a", "b", "c", "lonely"])
    text = serialize(g)
    assert "vertex lonely" in text
    assert parse_digraph(text) == g


def test_serialize_skips_vertex_lines_when_edges_suffice(trapezohedron2):
    lines = serialize(trapezohedron2, header="family trapezohedron t=2").splitlines()
    assert lines[0] == "# family trapezohedron t=2"
    assert len(lines) == 9
    assert not any(line.startswith("vertex") for line in lines)
    assert parse_digraph("\n".join(lines)) == trapezohedron2


def test_quasi_metric(square):
    d = quasi_metric(square)
    assert d("a", "a") == 0
    assert d("a", "b") == 1
    assert d("a", "d") == 2
    assert d("d", "a") is INFINITY
    assert d.to_json()["d"]["a"] == "inf"


def test_infinity_ordering():
    assert INFINITY > 10**9
    assert not INFINITY < 3
    assert INFINITY + 1 is INFINITY
    assert INFINITY != 2


def test_longest_path_length(square, triangle_cycle):
    assert square.longest_path_length() == 2
    assert square.is_acyclic
    assert triangle_cycle.longest_path_length() is None


@pytest.mark.parametrize(
    "name, t, n_vertices, n_edges",
    [
        ("trapezohedron", 2, 6, 8),
        ("trapezohedron", 5, 12, 20),
        ("multisquare", 3, 5, 6),
        ("euler", 3, 20, 4 + 15 * 3),
        ("multisquare-chain", 4, 7, 9 + 2 + 1),
        ("multiplicity", 2, 16, 34),
    ],
)
def test_family_sizes(name, t, n_vertices, n_edges):
    g = gen_family(name, t)
    assert len(g.vertices) == n_vertices
    assert len(g.edges) == n_edges
    assert g.is_acyclic


def test_family_domain():
    with pytest.raises(FamilyDomainError):
        gen_family("trapezohedron", 1)
    with pytest.raises(FamilyDomainError):
        gen_family("multisquare-chain", 2)
    with pytest.raises(FamilyDomainError):
        gen_family("klein-bottle", 3)


def test_every_family_has_a_minimum():
    for name, (minimum, _) in FAMILIES.items():
        assert gen_family(name, minimum).vertices


def test_random_digraph_is_deterministic():
    first = random_digraph(7, Fraction(3, 10), seed=11)
    assert first == random_digraph(7, "3/10", seed=11)
    assert first.vertices == tuple(f"x{i}" for i in range(7))


def test_random_digraph_extremes():
    assert not random_digraph(5, 0, seed=1).edges
    assert len(random_digraph(5, 1, seed=1).edges) == 20


def test_random_digraph_rejects_bad_probability():
    with pytest.raises(ValueError):
        random_digraph(3, Fraction(3, 2), seed=0)


@pytest.mark.parametrize("seed", range(6))
def test_quasi_metric_is_a_quasi_metric(seed):
    g = random_digraph(7, "2/5", seed)
    d = quasi_metric(g)
    for u in g.vertices:
        assert d(u, u) == 0
    for u, v, w in product(g.vertices, repeat=3):
        assert d(u, w) <= d(u, v) + d(v, w)
    for u, v in g.edges:
        assert d(u, v) == 1
