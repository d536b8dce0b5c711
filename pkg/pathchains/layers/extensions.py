"""
Extensions Layer
Upper/lower extensions, face multihypergraphs, properness and completeness,
mutations and strong connectedness
"""

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, permutations, product
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from pathchains.core.config import settings
from pathchains.core.exceptions import ContractViolation, FaceGraphError, InvariantViolation, MutationCapExceeded
from pathchains.layers.chains import Chain, face_head, face_tail, head_set, is_in_omega, tail_set
from pathchains.layers.digraph import Digraph

logger = logging.getLogger(__name__)

Member = Tuple[int, int]  # (graph vertex index, decomposition index k)
VertexOrder = Callable[[str], int]


class Direction(str, Enum):
    UPPER = "upper"
    LOWER = "lower"


def face(x: Chain, u: str, direction: Direction) -> Chain:
    return face_head(x, u) if direction == Direction.UPPER else face_tail(x, u)


def endpoint_set(x: Chain, direction: Direction):
    return head_set(x) if direction == Direction.UPPER else tail_set(x)


def adjacent(u: str, v: str, g: Digraph, direction: Direction) -> bool:
    """Whether an extension by v keeps a path through anchor u allowed"""
    return g.has_edge(u, v) if direction == Direction.UPPER else g.has_edge(v, u)


def face_anchors(x: Chain, direction: Direction, order: Optional[VertexOrder] = None) -> List[str]:
    """Vertices u with a nonzero face of x, in vertex order (by name when no order is given)"""
    if x.dimension < 1:
        return []
    position = -2 if direction == Direction.UPPER else 1
    candidates = sorted({path[position] for path in x.terms}, key=order)
    return [u for u in candidates if face(x, u, direction)]


def upper_extension(x: Chain, v: str, g: Digraph) -> Chain:
    """Append v to every term whose head has an edge to v; drop the rest"""
    return Chain(x.dimension + 1, x.ring, {path + (v,): c for path, c in x.items() if g.has_edge(path[-1], v)})


def lower_extension(x: Chain, u: str, g: Digraph) -> Chain:
    """Prepend u to every term whose tail receives an edge from u; drop the rest"""
    return Chain(x.dimension + 1, x.ring, {(u,) + path: c for path, c in x.items() if g.has_edge(u, path[0])})


def extend(x: Chain, v: str, g: Digraph, direction: Direction) -> Chain:
    return upper_extension(x, v, g) if direction == Direction.UPPER else lower_extension(x, v, g)


@dataclass(frozen=True)
class FaceSlot:
    vertex: int
    anchor: str
    k: int = 0


@dataclass(frozen=True)
class Hyperedge:
    """Hyperedge anchored at a digraph vertex, joining decomposition slots"""
    anchor: str
    members: Tuple[Member, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    @classmethod
    def between(cls, anchor: str, *members: Union[int, Member]) -> "Hyperedge":
        """Members are vertex indices (slot k=0) or (vertex, k) pairs"""
        return cls(anchor, tuple(m if isinstance(m, tuple) else (m, 0) for m in members))

    @property
    def size(self) -> int:
        return len(self.members)

    def slots(self) -> List[FaceSlot]:
        return [FaceSlot(i, self.anchor, k) for i, k in self.members]

    def sort_key(self) -> Tuple[str, Tuple[Member, ...]]:
        return (self.anchor, self.members)


@dataclass(frozen=True)
class FaceMultihypergraph:
    """
    Labeled multihypergraph on chains x_1..x_m of one dimension

    decompositions maps (vertex index, anchor) to the ordered parts of the
    face of that vertex at that anchor; hyperedges join parts that cancel.
    order ranks digraph vertices for anchors and sign normalization.
    """
    direction: Direction
    labels: Tuple[Chain, ...]
    decompositions: Mapping[Tuple[int, str], Tuple[Chain, ...]]
    hyperedges: Tuple[Hyperedge, ...] = ()
    _cache: Dict[str, object] = field(default_factory=dict, repr=False, compare=False)
    order: Optional[VertexOrder] = field(default=None, repr=False, compare=False)

    @classmethod
    def build(
        cls,
        labels: Sequence[Chain],
        hyperedges: Iterable[Hyperedge] = (),
        direction: Direction = Direction.UPPER,
        decompositions: Optional[Mapping[Tuple[int, str], Sequence[Chain]]] = None,
        order: Optional[VertexOrder] = None,
    ) -> "FaceMultihypergraph":
        """
        Build a face multihypergraph; faces without an explicit decomposition
        get the single-part decomposition [face]
        """
        parts: Dict[Tuple[int, str], Tuple[Chain, ...]] = {}
        for i, x in enumerate(labels):
            for u in face_anchors(x, direction, order):
                parts[(i, u)] = (face(x, u, direction),)
        for key, chains in (decompositions or {}).items():
            parts[key] = tuple(chains)
        ordered = sorted(hyperedges, key=Hyperedge.sort_key)
        return cls(Direction(direction), tuple(labels), parts, tuple(ordered), order=order)

    @property
    def size(self) -> int:
        return len(self.labels)

    def part(self, vertex: int, anchor: str, k: int) -> Chain:
        return self.decompositions[(vertex, anchor)][k]

    def path_key(self, path: Tuple[str, ...]) -> tuple:
        return tuple(map(self.order, path)) if self.order else path

    def total(self) -> Chain:
        if not self.labels:
            raise ContractViolation("face multihypergraph has no vertices")
        result = self.labels[0]
        for x in self.labels[1:]:
            result = result + x
        return result

    def covered_slots(self) -> Dict[FaceSlot, int]:
        covered: Dict[FaceSlot, int] = {}
        for index, edge in enumerate(self.hyperedges):
            for slot in edge.slots():
                covered[slot] = index
        return covered

    def with_hyperedges(self, hyperedges: Iterable[Hyperedge]) -> "FaceMultihypergraph":
        return FaceMultihypergraph(
            self.direction,
            self.labels,
            self.decompositions,
            tuple(sorted(hyperedges, key=Hyperedge.sort_key)),
            order=self.order,
        )

    # -- validation -----------------------------------------------------

    def hyperedge_error(self, anchor: str, members: Sequence[Member]) -> Optional[str]:
        """Reason a hyperedge is invalid, or None (slot reuse is not checked here)"""
        if len(members) < 2:
            return "hyperedge needs at least two slots"
        chains = []
        for i, k in members:
            parts = self.decompositions.get((i, anchor))
            if parts is None or not 0 <= k < len(parts):
                return f"slot ({i}, {anchor}, {k}) does not exist"
            chains.append(parts[k])
        vertices = {i for i, _ in members}
        if len(members) == 2:
            if len(vertices) != 2:
                return "an edge must join distinct vertices"
            if chains[0] != -chains[1]:
                return "edge faces must be negatives of each other"
            return None
        order = chains[0].ring.additive_order
        if order is None or order == 2:
            return f"hyperedges of size {len(members)} do not exist over {chains[0].ring}"
        if len(vertices) == 1:
            return "hyperedge slots all lie on one vertex"
        if any(c != chains[0] for c in chains[1:]):
            return "hyperedge faces must be equal"
        if chains[0].scale(len(members)):
            return f"{len(members)} copies of the face do not sum to zero"
        return None

    def validate(self) -> "FaceMultihypergraph":
        """
        Check the defining conditions

        Raises:
            FaceGraphError: On the first violated condition
        """
        for i, j in combinations(range(self.size), 2):
            if self.labels[i] == -self.labels[j]:
                raise FaceGraphError(f"vertices {i} and {j} are negatives of each other")
        for (i, u), parts in self.decompositions.items():
            if not 0 <= i < self.size:
                raise FaceGraphError(f"decomposition refers to missing vertex {i}")
            expected = face(self.labels[i], u, self.direction)
            total = Chain.zero(expected.ring, expected.dimension)
            for part in parts:
                total = total + part
            if total != expected:
                raise FaceGraphError(f"decomposition of vertex {i} at {u} does not sum to its face")
            if _has_zero_subsum(parts):
                raise FaceGraphError(f"decomposition of vertex {i} at {u} has a sub-sequence summing to zero")
        seen: Dict[FaceSlot, int] = {}
        for index, edge in enumerate(self.hyperedges):
            reason = self.hyperedge_error(edge.anchor, edge.members)
            if reason:
                raise FaceGraphError(f"hyperedge {index}: {reason}")
            for slot in edge.slots():
                if slot in seen:
                    raise FaceGraphError(f"slot {slot} lies in hyperedges {seen[slot]} and {index}")
                seen[slot] = index
        return self

    # -- connectivity ---------------------------------------------------

    def components(self) -> List[List[int]]:
        """Vertex sets of the connected components, ordered by smallest member"""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.size))
        for edge in self.hyperedges:
            vertices = sorted({i for i, _ in edge.members})
            graph.add_edges_from(zip(vertices, vertices[1:]))
        return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])

    def is_connected(self) -> bool:
        return self.size <= 1 or len(self.components()) == 1

    def subgraph(self, vertices: Sequence[int]) -> "FaceMultihypergraph":
        """Induced face multihypergraph on a union of components"""
        index = {old: new for new, old in enumerate(vertices)}
        decompositions = {(index[i], u): parts for (i, u), parts in self.decompositions.items() if i in index}
        hyperedges = []
        for edge in self.hyperedges:
            inside = [i in index for i, _ in edge.members]
            if any(inside) and not all(inside):
                raise ContractViolation("subgraph would cut a hyperedge")
            if all(inside):
                hyperedges.append(Hyperedge(edge.anchor, tuple((index[i], k) for i, k in edge.members)))
        return FaceMultihypergraph(
            self.direction,
            tuple(self.labels[i] for i in vertices),
            decompositions,
            tuple(sorted(hyperedges, key=Hyperedge.sort_key)),
            order=self.order,
        )

    # -- canonical form -------------------------------------------------

    def _vertex_types(self) -> List[tuple]:
        types = []
        for i, x in enumerate(self.labels):
            parts = tuple(
                sorted((u, tuple(p.sort_key() for p in chains)) for (j, u), chains in self.decompositions.items() if j == i)
            )
            types.append((x.sort_key(), parts))
        return types

    def canonical_key(self) -> tuple:
        """
        Encoding equal for label-preserving isomorphic graphs

        Vertices are bucketed by label, decomposition and a neighbourhood
        signature; vertices that stay tied are permuted exhaustively while the
        number of orderings is within settings.canonical_permutation_limit.
        """
        if "canonical" in self._cache:
            return self._cache["canonical"]
        types = self._vertex_types()
        type_rank = {t: r for r, t in enumerate(sorted(set(types)))}
        signature: List[list] = [[] for _ in range(self.size)]
        for edge in self.hyperedges:
            for position, (i, k) in enumerate(edge.members):
                others = edge.members[:position] + edge.members[position + 1:]
                signature[i].append((edge.anchor, k, tuple(sorted((type_rank[types[j]], kj) for j, kj in others))))
        keys = [(type_rank[types[i]], tuple(sorted(signature[i]))) for i in range(self.size)]
        groups: Dict[tuple, List[int]] = {}
        for i in sorted(range(self.size), key=lambda i: keys[i]):
            groups.setdefault(keys[i], []).append(i)
        buckets = [groups[key] for key in sorted(groups)]

        orderings = 1
        for bucket in buckets:
            orderings *= factorial(len(bucket))
        choices = (
            [list(permutations(bucket)) for bucket in buckets]
            if orderings <= settings.canonical_permutation_limit
            else [[tuple(bucket)] for bucket in buckets]
        )
        best = None
        for choice in product(*choices):
            order = [i for bucket in choice for i in bucket]
            position = {old: new for new, old in enumerate(order)}
            encoding = tuple(
                sorted((edge.anchor, tuple(sorted((position[i], k) for i, k in edge.members))) for edge in self.hyperedges)
            )
            if best is None or encoding < best:
                best = encoding
        ordered_types = tuple(types[i] for bucket in buckets for i in bucket)
        key = (self.direction.value, ordered_types, best or ())
        self._cache["canonical"] = key
        return key

    # -- output ---------------------------------------------------------

    def render(self) -> str:
        lines = [f"{self.direction.value} face multihypergraph on {self.size} vertices"]
        for i, x in enumerate(self.labels):
            reference, sign = x.normalized(self.path_key)
            lines.append(f"  [{i}] {'+' if sign > 0 else '-'}({reference.render()})")
        for edge in self.hyperedges:
            first = edge.members[0]
            label = self.part(first[0], edge.anchor, first[1]).render()
            joined = " -- ".join(f"{i}" if k == 0 else f"{i}.{k}" for i, k in edge.members)
            lines.append(f"  {joined}  [{label}] @ {edge.anchor}")
        return "\n".join(lines)

    def to_json(self) -> Dict[str, object]:
        vertices = []
        for i, x in enumerate(self.labels):
            reference, sign = x.normalized(self.path_key)
            vertices.append({"index": i, "sign": sign, "reference": reference.to_json(), "label": x.render()})
        decompositions = [
            {"vertex": i, "anchor": u, "parts": [p.to_json() for p in parts]}
            for (i, u), parts in sorted(self.decompositions.items())
        ]
        hyperedges = [
            {
                "anchor": edge.anchor,
                "slots": [[i, k] for i, k in edge.members],
                "face": self.part(edge.members[0][0], edge.anchor, edge.members[0][1]).render(),
            }
            for edge in self.hyperedges
        ]
        return {
            "direction": self.direction.value,
            "vertices": vertices,
            "decompositions": decompositions,
            "hyperedges": hyperedges,
        }


def _has_zero_subsum(parts: Sequence[Chain]) -> bool:
    """Whether some nonempty sub-sequence of the parts sums to zero"""
    if not parts:
        return False
    if len(parts) <= settings.subset_check_limit:
        sums: List[Chain] = [Chain.zero(parts[0].ring, parts[0].dimension)]
        for mask in range(1, 1 << len(parts)):
            low = (mask & -mask).bit_length() - 1
            current = sums[mask & (mask - 1)] + parts[low]
            if not current:
                return True
            sums.append(current)
        return False
    rng = random.Random(settings.seed)
    zero = Chain.zero(parts[0].ring, parts[0].dimension)
    for _ in range(settings.subset_samples):
        chosen = [p for p in parts if rng.random() < 0.5]
        if chosen:
            total = zero
            for p in chosen:
                total = total + p
            if not total:
                return True
    return False


def _require_extension_defined(f: FaceMultihypergraph, v: str, g: Digraph):
    for i, x in enumerate(f.labels):
        for w in endpoint_set(x, f.direction):
            if not adjacent(w, v, g, f.direction):
                raise ContractViolation(f"extension by {v} is undefined: vertex {i} has endpoint {w} not adjacent to {v}")


def is_proper(f: FaceMultihypergraph, v: str, g: Digraph) -> bool:
    """Every hyperedge anchor is distinct from v and not adjacent to it"""
    _require_extension_defined(f, v, g)
    return all(edge.anchor != v and not adjacent(edge.anchor, v, g, f.direction) for edge in f.hyperedges)


def is_complete(f: FaceMultihypergraph, v: str, g: Digraph) -> bool:
    """Proper, and every face slot at an anchor not adjacent to v is covered"""
    if not is_proper(f, v, g):
        return False
    covered = f.covered_slots()
    for i, x in enumerate(f.labels):
        for u in face_anchors(x, f.direction, g.index):
            if u == v or adjacent(u, v, g, f.direction):
                continue
            parts = f.decompositions.get((i, u))
            if parts is None:
                return False
            if any(FaceSlot(i, u, k) not in covered for k in range(len(parts))):
                return False
    return True


def extend_over(f: FaceMultihypergraph, v: str, g: Digraph) -> Chain:
    """
    Extension of the sum of the vertex labels by v

    Raises:
        ContractViolation: If f is not v-complete
        InvariantViolation: If the extension is not in Omega_{n+1}
    """
    if not is_complete(f, v, g):
        raise ContractViolation(f"face multihypergraph is not {v}-complete")
    y = extend(f.total(), v, g, f.direction)
    if not is_in_omega(y, g):
        logger.error(f"Extension by {v} left Omega: {y.render()}")
        raise InvariantViolation(f"extension by {v} over a complete face multihypergraph is not in Omega")
    return y


def _edge_reshuffles(f: FaceMultihypergraph) -> Iterator[FaceMultihypergraph]:
    edges = list(enumerate(f.hyperedges))
    for (a, first), (b, second) in combinations(edges, 2):
        if first.size != 2 or second.size != 2 or first.anchor != second.anchor:
            continue
        s1, s2 = first.members
        s3, s4 = second.members
        rest = [e for i, e in edges if i not in (a, b)]
        for pair in (((s1, s4), (s2, s3)), ((s1, s3), (s2, s4))):
            if all(f.hyperedge_error(first.anchor, members) is None for members in pair):
                yield f.with_hyperedges(rest + [Hyperedge(first.anchor, members) for members in pair])


def _hyperedge_splits(f: FaceMultihypergraph) -> Iterator[FaceMultihypergraph]:
    edges = list(enumerate(f.hyperedges))
    for (a, first), (b, second) in combinations(edges, 2):
        if first.anchor != second.anchor or first.size != second.size or first.size < 3:
            continue
        rest = [e for i, e in edges if i not in (a, b)]
        for image in permutations(second.members):
            pairs = [(x, y) for x, y in zip(first.members, image)]
            if all(f.hyperedge_error(first.anchor, pair) is None for pair in pairs):
                yield f.with_hyperedges(rest + [Hyperedge(first.anchor, pair) for pair in pairs])


def _hyperedge_merges(f: FaceMultihypergraph) -> Iterator[FaceMultihypergraph]:
    if not f.labels:
        return
    order = f.labels[0].ring.additive_order
    if order is None or order == 2:
        return
    by_anchor: Dict[str, List[int]] = {}
    for index, edge in enumerate(f.hyperedges):
        if edge.size == 2:
            by_anchor.setdefault(edge.anchor, []).append(index)
    for anchor, indices in by_anchor.items():
        for t in range(order, len(indices) + 1, order):
            if t < 3:
                continue
            for chosen in combinations(indices, t):
                rest = [e for i, e in enumerate(f.hyperedges) if i not in chosen]
                # the first edge's orientation is fixed; flipping all gives the same pair
                for flips in product((0, 1), repeat=t - 1):
                    sides = (0,) + flips
                    left = [f.hyperedges[i].members[s] for i, s in zip(chosen, sides)]
                    right = [f.hyperedges[i].members[1 - s] for i, s in zip(chosen, sides)]
                    if f.hyperedge_error(anchor, left) is None and f.hyperedge_error(anchor, right) is None:
                        yield f.with_hyperedges(rest + [Hyperedge(anchor, tuple(left)), Hyperedge(anchor, tuple(right))])


def _hyperedge_exchanges(f: FaceMultihypergraph) -> Iterator[FaceMultihypergraph]:
    edges = list(enumerate(f.hyperedges))
    for (a, first), (b, second) in combinations(edges, 2):
        if first.anchor != second.anchor or first.size != second.size or first.size < 3:
            continue
        t = first.size
        pool = first.members + second.members
        rest = [e for i, e in edges if i not in (a, b)]
        original = {first.members, second.members}
        for chosen in combinations(range(1, 2 * t), t - 1):
            left_idx = (0,) + chosen
            left = tuple(sorted(pool[i] for i in left_idx))
            right = tuple(sorted(pool[i] for i in range(2 * t) if i not in left_idx))
            if {left, right} == original:
                continue
            if f.hyperedge_error(first.anchor, left) is None and f.hyperedge_error(first.anchor, right) is None:
                yield f.with_hyperedges(rest + [Hyperedge(first.anchor, left), Hyperedge(first.anchor, right)])


def mutations(f: FaceMultihypergraph) -> List[FaceMultihypergraph]:
    """
    All face multihypergraphs one mutation move away from f

    Moves: reshuffling two same-anchor edges, splitting two size-t hyperedges
    into t edges (or merging t edges back), and redistributing the contents of
    two size-t hyperedges. Results are deduplicated by canonical key.
    """
    results: Dict[tuple, FaceMultihypergraph] = {}
    for move in (_edge_reshuffles, _hyperedge_splits, _hyperedge_merges, _hyperedge_exchanges):
        for candidate in move(f):
            results.setdefault(candidate.canonical_key(), candidate)
    return list(results.values())


def find_disconnected_mutation(f: FaceMultihypergraph, cap: Optional[int] = None) -> Optional[FaceMultihypergraph]:
    """
    Breadth-first search of the mutation closure for a disconnected member

    Returns:
        The first disconnected member found (possibly f itself), or None

    Raises:
        MutationCapExceeded: If more than `cap` canonical forms are reached
    """
    cap = settings.mutation_cap if cap is None else cap
    seen = {f.canonical_key()}
    queue = deque([f])
    while queue:
        current = queue.popleft()
        if not current.is_connected():
            return current
        for candidate in mutations(current):
            key = candidate.canonical_key()
            if key in seen:
                continue
            if len(seen) >= cap:
                raise MutationCapExceeded(cap)
            seen.add(key)
            queue.append(candidate)
    logger.debug(f"Mutation closure exhausted after {len(seen)} forms")
    return None


def is_strongly_connected(f: FaceMultihypergraph, cap: Optional[int] = None) -> bool:
    """Every member of the mutation closure is connected"""
    return find_disconnected_mutation(f, cap) is None
