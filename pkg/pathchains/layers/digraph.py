"""
Digraph Layer
Finite digraph model, quasi-metric, example families and random instances
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from pathchains.core.exceptions import DigraphParseError, DigraphValidationError, FamilyDomainError

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]
Path = Tuple[str, ...]


@dataclass(frozen=True)
class Digraph:
    """Simple digraph: ordered vertex names and a loop-free edge set"""
    vertices: Tuple[str, ...]
    edges: FrozenSet[Edge]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise DigraphValidationError("vertex names must be unique")
        declared = set(self.vertices)
        for u, v in self.edges:
            if u == v:
                raise DigraphValidationError(f"loop edge ({u}, {u}) is not allowed")
            if u not in declared or v not in declared:
                raise DigraphValidationError(f"edge ({u}, {v}) uses an undeclared vertex")

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], vertices: Sequence[str] = ()) -> "Digraph":
        """Build a digraph; vertices not listed are appended in first-appearance order"""
        order: Dict[str, None] = dict.fromkeys(vertices)
        edge_list = list(edges)
        for u, v in edge_list:
            order.setdefault(u)
            order.setdefault(v)
        return cls(tuple(order), frozenset(edge_list))

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _successors(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            out[u].append(v)
        return {u: tuple(sorted(vs, key=self.index)) for u, vs in out.items()}

    @cached_property
    def _predecessors(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            out[v].append(u)
        return {v: tuple(sorted(us, key=self.index)) for v, us in out.items()}

    def index(self, vertex: str) -> int:
        return self._index[vertex]

    def successors(self, vertex: str) -> Tuple[str, ...]:
        return self._successors[vertex]

    def predecessors(self, vertex: str) -> Tuple[str, ...]:
        return self._predecessors[vertex]

    def has_edge(self, u: str, v: str) -> bool:
        return (u, v) in self.edges

    def path_key(self, path: Path) -> Tuple[int, ...]:
        """Vertex index sequence; the lexicographic order on these is the path order"""
        return tuple(self._index[v] for v in path)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges, key=self.path_key)

    @cached_property
    def nx_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.sorted_edges())
        return graph

    @cached_property
    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.nx_graph)

    def longest_path_length(self) -> Optional[int]:
        """Length of the longest allowed path; None when cycles make it unbounded"""
        if not self.vertices or not self.is_acyclic:
            return None
        return nx.dag_longest_path_length(self.nx_graph)


class _Infinity:
    """Distance sentinel that absorbs addition and exceeds every integer"""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "inf"


INFINITY = _Infinity()
Distance = Union[int, _Infinity]


@dataclass(frozen=True)
class DistanceMatrix:
    """Directed shortest-path distances; missing pairs are unreachable"""
    vertices: Tuple[str, ...]
    finite: Dict[Edge, int]

    def __call__(self, u: str, v: str) -> Distance:
        return self.finite.get((u, v), INFINITY)

    def distance(self, u: str, v: str) -> Distance:
        return self(u, v)

    def to_json(self) -> Dict[str, Dict[str, Union[int, str]]]:
        return {u: {v: self.finite.get((u, v), "inf") for v in self.vertices} for u in self.vertices}


@lru_cache(maxsize=64)
def quasi_metric(g: Digraph) -> DistanceMatrix:
    """
    Shortest directed path lengths by breadth-first search from every vertex

    Args:
        g: Digraph

    Returns:
        DistanceMatrix with d(v, v) = 0 and INFINITY for unreachable pairs
    """
    finite: Dict[Edge, int] = {
        (source, target): length
        for source, lengths in nx.all_pairs_shortest_path_length(g.nx_graph)
        for target, length in lengths.items()
    }
    return DistanceMatrix(g.vertices, finite)


def parse_digraph(text: str) -> Digraph:
    """
    Parse an edge-list document

    Lines are `# comment`, `vertex <name>` or `<u> <v>`; blank lines are skipped.

    Args:
        text: Edge-list document

    Returns:
        Digraph with vertices in first-appearance order

    Raises:
        DigraphParseError: If a line is malformed
        DigraphValidationError: If a loop edge is declared
    """
    order: Dict[str, None] = {}
    edges: Dict[Edge, None] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise DigraphParseError(f"expected '<u> <v>' or 'vertex <name>', got {raw!r}", line_number)
        first, second = tokens
        if first == "vertex":
            order.setdefault(second)
            continue
        if first == second:
            raise DigraphValidationError(f"line {line_number}: loop edge ({first}, {first}) is not allowed")
        order.setdefault(first)
        order.setdefault(second)
        edges.setdefault((first, second))
    g = Digraph(tuple(order), frozenset(edges))
    logger.debug(f"Parsed digraph with {len(g.vertices)} vertices and {len(g.edges)} edges")
    return g


def serialize(g: Digraph, header: Optional[str] = None) -> str:
    """
    Edge-list document for a digraph

    Vertex declarations are written only when the edges alone would not
    reproduce the vertex order (isolated vertices or a different first
    appearance order).

    Args:
        g: Digraph to serialize
        header: Optional comment placed on the first line

    Returns:
        str: Text that parse_digraph maps back to g
    """
    edges = g.sorted_edges()
    appearance = tuple(dict.fromkeys(v for edge in edges for v in edge))
    lines = []
    if header:
        lines.extend(f"# {part}" for part in header.splitlines())
    if appearance != g.vertices:
        lines.extend(f"vertex {v}" for v in g.vertices)
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def _cyclic(modulus: int) -> Callable[[int], int]:
    """1-based index arithmetic modulo `modulus`"""
    return lambda i: (i - 1) % modulus + 1


def _trapezohedron(t: int) -> Digraph:
    wrap = _cyclic(t)
    vertices = ["T"] + [f"u{i}" for i in range(1, t + 1)] + [f"v{i}" for i in range(1, t + 1)] + ["H"]
    edges = []
    for i in range(1, t + 1):
        edges += [("T", f"u{i}"), (f"u{i}", f"v{i}"), (f"u{i}", f"v{wrap(i + 1)}"), (f"v{i}", "H")]
    return Digraph.from_edges(edges, vertices)


def _multiplicity(t: int) -> Digraph:
    wrap = _cyclic(2 * t)
    span = range(1, 2 * t + 1)
    vertices = (
        ["T", "uA1", "uA2", "uB", "vA1", "vA2"]
        + [f"vB{i}" for i in span]
        + ["wA"]
        + [f"wB{i}" for i in span]
        + ["H"]
    )
    edges = [
        ("T", "uA1"), ("T", "uA2"), ("T", "uB"),
        ("uA1", "vA1"), ("uA1", "vA2"), ("uA2", "vA1"), ("uA2", "vA2"),
        ("vA1", "wA"), ("vA2", "wA"), ("wA", "H"),
    ]
    for i in span:
        edges += [
            ("uB", f"vB{i}"),
            ("uA1", f"vB{wrap(2 * i + 1)}"),
            ("uA2", f"vB{wrap(2 * i)}"),
            (f"vB{i}", f"wB{i}"),
            (f"vB{i}", f"wB{wrap(i + 1)}"),
            ("vA1", f"wB{wrap(2 * i)}"),
            ("vA2", f"wB{wrap(2 * i + 1)}"),
            (f"wB{i}", "H"),
        ]
    return Digraph.from_edges(edges, vertices)


def _euler(t: int) -> Digraph:
    wrap = _cyclic(t)
    span = range(1, t + 1)
    vertices = (
        ["T", "uA1", "uA2"]
        + [f"uC{i}" for i in span]
        + ["vA"]
        + [f"vB1_{i}" for i in span]
        + [f"vB2_{i}" for i in span]
        + [f"vC{i}" for i in span]
        + [f"w{i}" for i in span]
        + ["H"]
    )
    edges = [("T", "uA1"), ("T", "uA2"), ("uA1", "vA"), ("uA2", "vA")]
    for i in span:
        edges += [
            ("T", f"uC{i}"), ("T", f"vC{i}"),
            ("uA1", f"vB1_{i}"), ("uA2", f"vB2_{i}"),
            (f"uC{i}", f"vB1_{i}"), (f"uC{i}", f"vB2_{i}"), (f"uC{i}", f"vC{i}"),
            ("vA", f"w{i}"),
            (f"vB1_{i}", f"w{wrap(i + 1)}"), (f"vB2_{i}", f"w{i}"),
            (f"vC{i}", f"w{i}"), (f"vC{i}", f"w{wrap(i + 1)}"),
            (f"vB1_{i}", "H"), (f"vB2_{i}", "H"), (f"w{i}", "H"),
        ]
    return Digraph.from_edges(edges, vertices)


def _multisquare_chain(t: int) -> Digraph:
    middle = [f"v1_{j}" for j in (1, 2, 3)]
    vertices = ["v0"] + middle + [f"v{i}" for i in range(2, t + 1)]
    edges = []
    for m in middle:
        edges += [("v0", m), (m, "v2"), (m, "v3")]
    edges += [(f"v{i}", f"v{i + 1}") for i in range(2, t)]
    edges += [(f"v{i}", f"v{i + 2}") for i in range(2, t - 1)]
    return Digraph.from_edges(edges, vertices)


def _multisquare(t: int) -> Digraph:
    middle = [f"v{j}" for j in range(1, t + 1)]
    edges = [("u", m) for m in middle] + [(m, "w") for m in middle]
    return Digraph.from_edges(edges, ["u"] + middle + ["w"])


# family tag -> (minimum t, builder)
FAMILIES: Dict[str, Tuple[int, Callable[[int], Digraph]]] = {
    "trapezohedron": (2, _trapezohedron),
    "multiplicity": (2, _multiplicity),
    "euler": (2, _euler),
    "multisquare-chain": (3, _multisquare_chain),
    "multisquare": (2, _multisquare),
}


def gen_family(name: str, t: int) -> Digraph:
    """
    Build a member of one of the example families

    Args:
        name: Family tag (see FAMILIES)
        t: Family parameter

    Returns:
        Digraph with the family's vertex and edge sets

    Raises:
        FamilyDomainError: If the family is unknown or t is below its minimum
    """
    if name not in FAMILIES:
        raise FamilyDomainError(f"Unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    minimum, builder = FAMILIES[name]
    if t < minimum:
        raise FamilyDomainError(f"family {name!r} needs t >= {minimum}, got {t}")
    return builder(t)


def random_digraph(n_vertices: int, edge_probability: Union[Fraction, str, int], seed: int) -> Digraph:
    """
    Random digraph including each ordered pair independently

    Args:
        n_vertices: Number of vertices, named x0, x1, ...
        edge_probability: Rational probability in [0, 1]
        seed: Seed for the pseudo-random generator

    Returns:
        Digraph; identical arguments give identical digraphs
    """
    probability = Fraction(edge_probability)
    if not 0 <= probability <= 1:
        raise ValueError(f"edge probability must lie in [0, 1], got {probability}")
    rng = random.Random(seed)
    vertices = [f"x{i}" for i in range(n_vertices)]
    edges = [
        (u, v)
        for u in vertices
        for v in vertices
        if u != v and rng.randrange(probability.denominator) < probability.numerator
    ]
    return Digraph.from_edges(edges, vertices)
