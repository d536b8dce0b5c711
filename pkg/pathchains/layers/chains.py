"""
Chains Layer
Allowed paths, magnitude and path differentials, bigraded bases of the path
chain modules, and the head/tail face maps
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from types import MappingProxyType
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from pathchains.core.config import settings
from pathchains.core.exceptions import ContractViolation, NotInSpanError, UndefinedEndpointsError
from pathchains.layers.digraph import Digraph, DistanceMatrix, Path, quasi_metric
from pathchains.layers.exact_linalg import (
    BasisSolver,
    ExactMatrix,
    Ring,
    Scalar,
    Vector,
    hermite_kernel,
    kernel_basis,
    rank,
)

logger = logging.getLogger(__name__)

Block = Tuple[str, str]


class Chain:
    """
    Finite linear combination of elementary n-paths with nonzero coefficients

    A chain of dimension n has terms on (n+1)-vertex tuples. Dimension -1 is
    allowed for the zero chain that faces of 0-chains land in.
    """

    __slots__ = ("dimension", "ring", "_terms")

    def __init__(self, dimension: int, ring: Ring, terms: Optional[Mapping[Path, Scalar]] = None):
        cleaned: Dict[Path, Scalar] = {}
        for path, coefficient in (terms or {}).items():
            path = tuple(path)
            if len(path) != dimension + 1:
                raise ValueError(f"path {path} does not have dimension {dimension}")
            value = ring.coerce(coefficient)
            if value != 0:
                cleaned[path] = value
        self.dimension = dimension
        self.ring = ring
        self._terms = cleaned

    @classmethod
    def path(cls, ring: Ring, *vertices: str, coefficient: Scalar = 1) -> "Chain":
        """Elementary chain c * e_{v_0,...,v_n}"""
        return cls(len(vertices) - 1, ring, {tuple(vertices): coefficient})

    @classmethod
    def zero(cls, ring: Ring, dimension: int) -> "Chain":
        return cls(dimension, ring)

    @classmethod
    def _trusted(cls, dimension: int, ring: Ring, terms: Dict[Path, Scalar]) -> "Chain":
        chain = cls.__new__(cls)
        chain.dimension = dimension
        chain.ring = ring
        chain._terms = terms
        return chain

    @property
    def terms(self) -> Mapping[Path, Scalar]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[Tuple[Path, Scalar]]:
        return iter(self._terms.items())

    def coefficient(self, path: Sequence[str]) -> Scalar:
        return self._terms.get(tuple(path), self.ring.zero)

    def _combine(self, other: "Chain", factor: Scalar) -> "Chain":
        if other.dimension != self.dimension:
            raise ValueError(f"cannot combine dimensions {self.dimension} and {other.dimension}")
        ring = self.ring
        terms = dict(self._terms)
        for path, value in other._terms.items():
            total = ring.add(terms.get(path, ring.zero), ring.mul(factor, value))
            if total == 0:
                terms.pop(path, None)
            else:
                terms[path] = total
        return Chain._trusted(self.dimension, ring, terms)

    def __add__(self, other: "Chain") -> "Chain":
        return self._combine(other, self.ring.one)

    def __sub__(self, other: "Chain") -> "Chain":
        return self._combine(other, self.ring.neg(self.ring.one))

    def __neg__(self) -> "Chain":
        return self.scale(self.ring.neg(self.ring.one))

    def scale(self, factor: Scalar) -> "Chain":
        factor = self.ring.coerce(factor)
        terms = {p: self.ring.mul(factor, c) for p, c in self._terms.items()}
        return Chain._trusted(self.dimension, self.ring, {p: c for p, c in terms.items() if c != 0})

    def change_ring(self, ring: Ring) -> "Chain":
        return Chain(self.dimension, ring, self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.dimension == other.dimension and self.ring == other.ring and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dimension, frozenset(self._terms.items())))

    def sort_key(self) -> Tuple[Tuple[Path, Scalar], ...]:
        return tuple(sorted(self._terms.items()))

    def leading_path(self, key: Optional[Callable[[Path], object]] = None) -> Path:
        if not self._terms:
            raise UndefinedEndpointsError("zero chain has no leading path")
        return min(self._terms, key=key)

    def normalized(self, key: Optional[Callable[[Path], object]] = None) -> Tuple["Chain", int]:
        """Sign-normalized reference (leading path positive) and the sign relating it to self"""
        if not self._terms:
            return self, 1
        if self.ring.is_negative(self._terms[self.leading_path(key)]):
            return -self, -1
        return self, 1

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for path, value in sorted(self._terms.items()):
            value = self.ring.symmetric(value)
            sign = "-" if value < 0 else "+"
            magnitude = -value if value < 0 else value
            prefix = "" if magnitude == 1 else f"{magnitude}*"
            parts.append(f"{sign} {prefix}e({','.join(path)})")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {"path": list(path), "coefficient": self.ring.to_json(value)}
            for path, value in sorted(self._terms.items())
        ]

    def __repr__(self) -> str:
        return f"Chain[{self.dimension}, {self.ring}]({self.render()})"


def head_set(x: Chain) -> FrozenSet[str]:
    """Final vertices over the nonzero terms"""
    if not x:
        raise UndefinedEndpointsError("head set of the zero chain is undefined")
    return frozenset(path[-1] for path in x.terms)


def tail_set(x: Chain) -> FrozenSet[str]:
    """Initial vertices over the nonzero terms"""
    if not x:
        raise UndefinedEndpointsError("tail set of the zero chain is undefined")
    return frozenset(path[0] for path in x.terms)


def is_connected(x: Chain) -> bool:
    return len(head_set(x)) == 1 and len(tail_set(x)) == 1


def head(x: Chain) -> str:
    heads = head_set(x)
    if len(heads) != 1:
        raise ContractViolation(f"chain has {len(heads)} heads; a connected chain is required")
    return next(iter(heads))


def tail(x: Chain) -> str:
    tails = tail_set(x)
    if len(tails) != 1:
        raise ContractViolation(f"chain has {len(tails)} tails; a connected chain is required")
    return next(iter(tails))


@lru_cache(maxsize=256)
def allowed_paths(g: Digraph, n: int) -> Tuple[Path, ...]:
    """
    All allowed n-paths, in lexicographic order of vertex index sequences

    Args:
        g: Digraph
        n: Path length (number of edges)

    Returns:
        Tuple of vertex tuples; n=0 gives one path per vertex
    """
    if n < 0:
        return ()
    paths: List[Path] = [(v,) for v in g.vertices]
    for _ in range(n):
        paths = [path + (w,) for path in paths for w in g.successors(path[-1])]
    return tuple(paths)


def magnitude_partial(x: Chain, i: int, d: DistanceMatrix) -> Chain:
    """
    Component i of the diagonal magnitude differential

    Drops vertex i of each term when d(v_{i-1}, v_{i+1}) = 2 and kills the
    term otherwise. The result is a formal combination of n-tuples.
    """
    n = x.dimension
    if not 1 <= i <= n - 1:
        raise ValueError(f"index {i} outside 1..{n - 1}")
    ring = x.ring
    terms: Dict[Path, Scalar] = {}
    for path, value in x.items():
        if d(path[i - 1], path[i + 1]) == 2:
            target = path[:i] + path[i + 1:]
            terms[target] = ring.add(terms.get(target, ring.zero), value)
    return Chain(n - 1, ring, terms)


def magnitude_differential(x: Chain, d: DistanceMatrix) -> Chain:
    """Alternating sum of the magnitude partials"""
    total = Chain.zero(x.ring, x.dimension - 1)
    for i in range(1, x.dimension):
        partial = magnitude_partial(x, i, d)
        total = total - partial if i % 2 else total + partial
    return total


def is_in_omega(x: Chain, g: Digraph) -> bool:
    """Every term allowed and every individual magnitude partial zero"""
    for path in x.terms:
        if any(not g.has_edge(a, b) for a, b in zip(path, path[1:])):
            return False
    d = quasi_metric(g)
    return all(not magnitude_partial(x, i, d) for i in range(1, x.dimension))


def path_boundary(x: Chain, g: Digraph, check: Optional[bool] = None) -> Chain:
    """
    Path boundary: alternating sum of vertex deletions, irregular terms dropped

    The sign convention is the one of the alternating sum, so e_{u,v} maps to
    e_v - e_u.

    Args:
        x: Element of Omega_n
        g: Ambient digraph
        check: Verify x lies in Omega_n first (defaults to settings.debug_checks)

    Returns:
        Chain of dimension n-1

    Raises:
        ContractViolation: If checking is on and x is not in Omega_n
    """
    if settings.debug_checks if check is None else check:
        if not is_in_omega(x, g):
            raise ContractViolation("path_boundary called on a chain outside Omega_n")
    n = x.dimension
    ring = x.ring
    if n <= 0:
        return Chain.zero(ring, n - 1)
    terms: Dict[Path, Scalar] = {}
    for path, value in x.items():
        for i in range(n + 1):
            face = path[:i] + path[i + 1:]
            if 0 < i < n and face[i - 1] == face[i]:
                continue
            signed = value if i % 2 == 0 else ring.neg(value)
            terms[face] = ring.add(terms.get(face, ring.zero), signed)
    return Chain(n - 1, ring, terms)


def face_head(x: Chain, v: str) -> Chain:
    """Terms whose second-to-last vertex is v, with the last vertex removed"""
    if x.dimension <= 0:
        return Chain.zero(x.ring, x.dimension - 1)
    return Chain(x.dimension - 1, x.ring, {path[:-1]: c for path, c in x.items() if path[-2] == v})


def face_tail(x: Chain, v: str) -> Chain:
    """Terms whose second vertex is v, with the first vertex removed"""
    if x.dimension <= 0:
        return Chain.zero(x.ring, x.dimension - 1)
    return Chain(x.dimension - 1, x.ring, {path[1:]: c for path, c in x.items() if path[1] == v})


def _magnitude_matrix(paths: Sequence[Path], d: DistanceMatrix, ring: Ring) -> ExactMatrix:
    # columns are the interned path ids; rows are the distinct targets of the partials
    row_ids: Dict[Path, int] = {}
    entries: Dict[Tuple[int, int], int] = {}
    for col, path in enumerate(paths):
        for i in range(1, len(path) - 1):
            if d(path[i - 1], path[i + 1]) == 2:
                target = path[:i] + path[i + 1:]
                row = row_ids.setdefault(target, len(row_ids))
                entries[(row, col)] = entries.get((row, col), 0) + (-1 if i % 2 else 1)
    return ExactMatrix.from_entries(len(row_ids), len(paths), entries, ring)


def _kernel_vectors(m: ExactMatrix, ring: Ring) -> List[Vector]:
    return kernel_basis(m, ring) if ring.is_field else hermite_kernel(m)


def _block_chains(paths: Sequence[Path], d: DistanceMatrix, ring: Ring) -> List[Chain]:
    dimension = len(paths[0]) - 1
    chains = []
    for vector in _kernel_vectors(_magnitude_matrix(paths, d, ring), ring):
        terms = {paths[c]: v for c, v in vector.entries.items()}
        chain = Chain(dimension, ring, terms)
        # columns are in path order, so the smallest column holds the leading path
        if ring.is_negative(chain.coefficient(paths[min(vector.entries)])):
            chain = -chain
        chains.append(chain)
    return chains


@dataclass
class OmegaBasis:
    """
    Bigraded basis of Omega_n: blocks (tail, head) -> independent connected chains

    Blocks are kept in (tail index, head index) order and empty blocks are
    omitted. Solvers for coordinate extraction are built lazily per block.
    """
    dimension: int
    ring: Ring
    blocks: Dict[Block, Tuple[Chain, ...]]
    _solvers: Dict[Block, Tuple[BasisSolver, Dict[Path, int]]] = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def empty(cls, dimension: int, ring: Ring) -> "OmegaBasis":
        return cls(dimension, ring, {})

    @classmethod
    def from_chains(cls, g: Digraph, dimension: int, ring: Ring, chains: Iterable[Chain]) -> "OmegaBasis":
        """Group connected chains into blocks ordered by the digraph's vertex order"""
        grouped: Dict[Block, List[Chain]] = {}
        for chain in chains:
            grouped.setdefault((tail(chain), head(chain)), []).append(chain)
        order = sorted(grouped, key=lambda b: (g.index(b[0]), g.index(b[1])))
        return cls(dimension, ring, {b: tuple(grouped[b]) for b in order})

    def elements(self) -> List[Chain]:
        return [chain for block in self.blocks.values() for chain in block]

    @property
    def rank(self) -> int:
        return sum(len(block) for block in self.blocks.values())

    def __len__(self) -> int:
        return self.rank

    def block(self, tail_vertex: str, head_vertex: str) -> Tuple[Chain, ...]:
        return self.blocks.get((tail_vertex, head_vertex), ())

    def block_ranks(self) -> Dict[Block, int]:
        return {b: len(chains) for b, chains in self.blocks.items()}

    def _solver(self, key: Block) -> Tuple[BasisSolver, Dict[Path, int]]:
        if key not in self._solvers:
            basis = self.blocks[key]
            paths = sorted({path for chain in basis for path in chain.terms})
            ids = {path: i for i, path in enumerate(paths)}
            vectors = [Vector(len(paths), {ids[p]: c for p, c in chain.items()}) for chain in basis]
            self._solvers[key] = (BasisSolver(vectors, self.ring, length=len(paths)), ids)
        return self._solvers[key]

    def decompose(self, chain: Chain) -> List[Tuple[Chain, Scalar]]:
        """
        Nonzero (basis element, coefficient) pairs summing to the chain

        Raises:
            NotInSpanError: If the chain is not in the span of the basis
        """
        if chain.dimension != self.dimension:
            raise ValueError(f"chain of dimension {chain.dimension} against a basis of dimension {self.dimension}")
        grouped: Dict[Block, Dict[Path, Scalar]] = {}
        for path, value in chain.items():
            grouped.setdefault((path[0], path[-1]), {})[path] = value
        result: List[Tuple[Chain, Scalar]] = []
        for key in (b for b in self.blocks if b in grouped):
            solver, ids = self._solver(key)
            terms = grouped.pop(key)
            if any(path not in ids for path in terms):
                raise NotInSpanError(f"chain uses paths outside block {key}")
            coefficients = solver.solve(Vector(len(ids), {ids[p]: c for p, c in terms.items()}))
            result.extend((b, c) for b, c in zip(self.blocks[key], coefficients) if c != 0)
        if grouped:
            raise NotInSpanError(f"chain has terms in empty blocks {sorted(grouped)}")
        return result

    def coordinates(self, chain: Chain) -> List[Scalar]:
        """Coefficients against elements(), in order"""
        position = {}
        offset = 0
        for key, chains in self.blocks.items():
            for k in range(len(chains)):
                position[(key, k)] = offset + k
            offset += len(chains)
        coords = [self.ring.zero] * offset
        if not chain:
            return coords
        for basis_chain, value in self.decompose(chain):
            key = (tail(basis_chain), head(basis_chain))
            coords[position[(key, self.blocks[key].index(basis_chain))]] = value
        return coords

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {"tail": key[0], "head": key[1], "terms": chain.to_json()}
            for key, chains in self.blocks.items()
            for chain in chains
        ]


@lru_cache(maxsize=128)
def omega_basis(g: Digraph, n: int, ring: Ring) -> OmegaBasis:
    """
    Bigraded basis of Omega_n as the kernel of the diagonal magnitude differential

    Allowed n-paths are split by (tail, head); the differential preserves
    endpoints, so each block is an independent kernel problem.

    Args:
        g: Digraph
        n: Dimension
        ring: Coefficient ring

    Returns:
        OmegaBasis with sign-normalized chains
    """
    if n < 0:
        return OmegaBasis.empty(n, ring)
    grouped: Dict[Block, List[Path]] = {}
    for path in allowed_paths(g, n):
        grouped.setdefault((path[0], path[-1]), []).append(path)
    d = quasi_metric(g)
    blocks: Dict[Block, Tuple[Chain, ...]] = {}
    for key in sorted(grouped, key=lambda b: (g.index(b[0]), g.index(b[1]))):
        chains = _block_chains(grouped[key], d, ring)
        if chains:
            blocks[key] = tuple(chains)
    basis = OmegaBasis(n, ring, blocks)
    logger.info(f"Omega_{n} over {ring}: rank {basis.rank} from {len(grouped)} endpoint blocks")
    return basis


def omega_rank_unblocked(g: Digraph, n: int, ring: Ring) -> int:
    """Kernel dimension of the full, unblocked magnitude matrix"""
    paths = allowed_paths(g, n)
    if not paths:
        return 0
    m = _magnitude_matrix(paths, quasi_metric(g), ring)
    return m.n_cols - rank(m, ring)


def omega_rank_by_boundary(g: Digraph, n: int, ring: Ring) -> int:
    """
    Dimension of {x in A_n : boundary(x) in A_{n-1}}

    This is the preimage definition of the path chain module, kept as a
    cross-check for the kernel computation.
    """
    paths = allowed_paths(g, n)
    if not paths:
        return 0
    row_ids: Dict[Path, int] = {}
    entries: Dict[Tuple[int, int], int] = {}
    for col, path in enumerate(paths):
        for i in range(len(path)):
            face = path[:i] + path[i + 1:]
            if any(a == b for a, b in zip(face, face[1:])):
                continue
            if all(g.has_edge(a, b) for a, b in zip(face, face[1:])):
                continue
            row = row_ids.setdefault(face, len(row_ids))
            entries[(row, col)] = entries.get((row, col), 0) + (-1 if i % 2 else 1)
    m = ExactMatrix.from_entries(len(row_ids), len(paths), entries, ring)
    return m.n_cols - rank(m, ring)


def dimension_two_generators(g: Digraph, ring: Ring) -> List[Chain]:
    """
    Double edges, directed triangles and directed squares of a digraph

    Squares are all differences e_{u,a,w} - e_{u,b,w} of 2-paths between a
    non-adjacent pair u != w.
    """
    generators: List[Chain] = []
    routes: Dict[Block, List[str]] = {}
    for u, v, w in allowed_paths(g, 2):
        if u == w or g.has_edge(u, w):
            generators.append(Chain.path(ring, u, v, w))
        else:
            routes.setdefault((u, w), []).append(v)
    for (u, w), middles in routes.items():
        for a, b in combinations(middles, 2):
            generators.append(Chain.path(ring, u, a, w) - Chain.path(ring, u, b, w))
    return generators
