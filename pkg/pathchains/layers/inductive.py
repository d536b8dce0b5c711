"""
Inductive Layer
Extraction of inductive structures from path chain basis elements and
assembly of inductive generating sets level by level
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pathchains.core.config import settings
from pathchains.core.exceptions import ContractViolation, InvariantViolation, MutationCapExceeded
from pathchains.layers.chains import Block, Chain, OmegaBasis, head, omega_basis, tail
from pathchains.layers.digraph import Digraph, Path
from pathchains.layers.exact_linalg import ExactMatrix, Ring, Scalar, hermite_normal_form, rank
from pathchains.layers.extensions import (
    Direction,
    FaceMultihypergraph,
    Hyperedge,
    Member,
    adjacent,
    extend_over,
    face,
    face_anchors,
    find_disconnected_mutation,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelSource:
    """Structure label as sign times the summed inductive pieces of a basis element one dimension down"""
    sign: int
    pieces: Tuple["InductiveElement", ...]

    def total(self) -> Chain:
        result = self.pieces[0].chain
        for piece in self.pieces[1:]:
            result = result + piece.chain
        return result if self.sign > 0 else -result


@dataclass(frozen=True)
class InductiveElement:
    """
    Connected chain obtained as an extension over a complete face multihypergraph

    strongly_connected is None when the mutation cap stopped the check.
    provenance holds one LabelSource per structure label once an
    InductiveExtractor has grounded the labels in the level below.
    """
    chain: Chain
    direction: Direction
    structure: FaceMultihypergraph
    extension_vertex: str
    strongly_connected: Optional[bool] = True
    provenance: Tuple[LabelSource, ...] = field(default=(), compare=False, repr=False)

    @property
    def dimension(self) -> int:
        return self.chain.dimension

    def to_ring(self, ring: Ring, converted: Optional[Dict[int, "InductiveElement"]] = None) -> "InductiveElement":
        """Same element over another ring; pieces shared between labels are converted once"""
        converted = {} if converted is None else converted
        if id(self) in converted:
            return converted[id(self)]
        s = self.structure
        structure = FaceMultihypergraph(
            s.direction,
            tuple(x.change_ring(ring) for x in s.labels),
            {key: tuple(p.change_ring(ring) for p in parts) for key, parts in s.decompositions.items()},
            s.hyperedges,
            order=s.order,
        )
        provenance = tuple(
            LabelSource(source.sign, tuple(p.to_ring(ring, converted) for p in source.pieces))
            for source in self.provenance
        )
        result = InductiveElement(
            self.chain.change_ring(ring),
            self.direction,
            structure,
            self.extension_vertex,
            self.strongly_connected,
            provenance,
        )
        converted[id(self)] = result
        return result


@dataclass(frozen=True)
class BlockCertificate:
    """Rank comparison for one (tail, head) block of Omega_n"""
    tail: str
    head: str
    omega_rank: int
    generator_rank: int
    lattice_equal: Optional[bool] = None
    inductive_basis: bool = True

    @property
    def spans(self) -> bool:
        if self.lattice_equal is not None:
            return self.lattice_equal
        return self.generator_rank == self.omega_rank


@dataclass
class GeneratingSet:
    """
    Inductive generators of Omega_n with a basis selection and per-block certificates

    basis holds indices into elements; blocks whose certificate has
    inductive_basis=False contribute their kernel basis through basis_chains().
    """
    dimension: int
    ring: Ring
    direction: Direction
    elements: List[InductiveElement]
    basis: List[int]
    certificates: List[BlockCertificate]
    omega: OmegaBasis = field(repr=False)

    @property
    def spans(self) -> bool:
        return all(c.spans for c in self.certificates)

    @property
    def inductive_basis(self) -> bool:
        return all(c.inductive_basis for c in self.certificates)

    @property
    def rank(self) -> int:
        return sum(c.generator_rank for c in self.certificates)

    def undetermined(self) -> List[int]:
        """Indices of elements whose strong connectedness the mutation cap left open"""
        return [i for i, e in enumerate(self.elements) if e.strongly_connected is None]

    def chains(self) -> List[Chain]:
        return [e.chain for e in self.elements]

    def basis_chains(self) -> List[Chain]:
        chosen = [self.elements[i].chain for i in self.basis]
        for c in self.certificates:
            if not c.inductive_basis:
                chosen.extend(self.omega.block(c.tail, c.head))
        return chosen


def _multiplicity(value: Scalar, ring: Ring) -> int:
    """Signed copy count of a coefficient (symmetric residue over Z_p)"""
    value = ring.symmetric(value)
    if isinstance(value, Fraction):
        if value.denominator != 1:
            raise ContractViolation(f"coefficient {value} is not integral; extract over Z instead")
        return int(value)
    return int(value)


def _expanded(chain: Chain, basis: OmegaBasis) -> List[Chain]:
    """Decompose in the basis and expand k*b into |k| signed copies of b"""
    copies: List[Chain] = []
    for element, value in basis.decompose(chain):
        k = _multiplicity(value, chain.ring)
        copies.extend([element if k > 0 else -element] * abs(k))
    return copies


def _pair_slots(
    slots: Sequence[Tuple[Member, Chain]], anchor: str, ring: Ring, key: Callable[[Path], tuple]
) -> List[Hyperedge]:
    """
    Match cancelling parts at one anchor

    Parts are grouped by sign-normalized reference; positive copies pair with
    negative ones in slot order. Over Z_2 equal parts pair with each other and
    over Z_p (p >= 3) a leftover of p equal parts becomes one hyperedge.
    """
    groups: Dict[tuple, Tuple[List[Member], List[Member]]] = {}
    for member, part in slots:
        reference, sign = part.normalized(key)
        plus, minus = groups.setdefault(reference.sort_key(), ([], []))
        (plus if sign > 0 else minus).append(member)
    order = ring.additive_order
    hyperedges: List[Hyperedge] = []
    for group in sorted(groups):
        plus, minus = groups[group]
        if order == 2:
            pool = sorted(plus + minus)
            if len(pool) % 2:
                raise InvariantViolation(f"odd number of equal faces at {anchor} over Z_2")
            hyperedges.extend(Hyperedge(anchor, (pool[i], pool[i + 1])) for i in range(0, len(pool), 2))
            continue
        plus.sort()
        minus.sort()
        matched = min(len(plus), len(minus))
        hyperedges.extend(Hyperedge(anchor, (plus[i], minus[i])) for i in range(matched))
        residue = plus[matched:] or minus[matched:]
        if not residue:
            continue
        if order is None or len(residue) % order:
            raise InvariantViolation(f"{len(residue)} unmatched faces at {anchor} over {ring}")
        hyperedges.extend(Hyperedge(anchor, tuple(residue[i:i + order])) for i in range(0, len(residue), order))
    return hyperedges


def _refine(f: FaceMultihypergraph, cap: int) -> List[Tuple[FaceMultihypergraph, Optional[bool]]]:
    """Split a connected piece along disconnected members of its mutation closure"""
    try:
        split = find_disconnected_mutation(f, cap)
    except MutationCapExceeded:
        logger.warning(f"⚠️ Mutation closure of a {f.size}-vertex structure exceeded {cap} forms")
        return [(f, None)]
    if split is None:
        return [(f, True)]
    pieces = []
    for component in split.components():
        pieces.extend(_refine(split.subgraph(component), cap))
    return pieces


def inductive_structure(
    x: Chain,
    basis_nm1: OmegaBasis,
    basis_nm2: OmegaBasis,
    direction: Direction,
    g: Digraph,
    cap: Optional[int] = None,
) -> List[InductiveElement]:
    """
    Split a connected element of Omega_n into inductive elements

    Args:
        x: Connected element of Omega_n, n >= 1
        basis_nm1: Basis of Omega_{n-1} respecting the bigrading
        basis_nm2: Basis of Omega_{n-2} respecting the bigrading
        direction: UPPER extends by the head, LOWER by the tail
        g: Digraph
        cap: Mutation closure cap (settings.mutation_cap by default)

    Returns:
        Inductive elements whose chains sum to x

    Raises:
        NotInSpanError: If a face is outside the span of a basis
        InvariantViolation: If faces cannot be matched or the pieces do not sum to x
    """
    direction = Direction(direction)
    cap = settings.mutation_cap if cap is None else cap
    if x.dimension < 1:
        raise ContractViolation("inductive structures start at dimension 1")
    v_star = head(x) if direction == Direction.UPPER else tail(x)

    labels: List[Chain] = []
    for v in face_anchors(x, direction, g.index):
        labels.extend(_expanded(face(x, v, direction), basis_nm1))

    decompositions: Dict[Tuple[int, str], Tuple[Chain, ...]] = {}
    slots_by_anchor: Dict[str, List[Tuple[Member, Chain]]] = {}
    for i, label in enumerate(labels):
        for u in face_anchors(label, direction, g.index):
            if u == v_star or adjacent(u, v_star, g, direction):
                continue
            parts = tuple(_expanded(face(label, u, direction), basis_nm2))
            decompositions[(i, u)] = parts
            for k, part in enumerate(parts):
                slots_by_anchor.setdefault(u, []).append(((i, k), part))

    hyperedges: List[Hyperedge] = []
    for u in sorted(slots_by_anchor, key=g.index):
        hyperedges.extend(_pair_slots(slots_by_anchor[u], u, x.ring, g.path_key))

    structure = FaceMultihypergraph.build(labels, hyperedges, direction, decompositions, g.index).validate()
    pieces: List[Tuple[FaceMultihypergraph, Optional[bool]]] = []
    for component in structure.components():
        pieces.extend(_refine(structure.subgraph(component), cap))

    elements = []
    total = Chain.zero(x.ring, x.dimension)
    for piece, strong in pieces:
        chain = extend_over(piece, v_star, g)
        total = total + chain
        elements.append(InductiveElement(chain, direction, piece, v_star, strong))
    if total != x:
        logger.error(f"❌ Inductive pieces of {x.render()} sum to {total.render()}")
        raise InvariantViolation("inductive pieces do not reconstruct the chain")
    logger.debug(f"Split a {x.dimension}-chain into {len(elements)} inductive elements")
    return elements


def _vertex_elements(g: Digraph, ring: Ring, direction: Direction) -> List[InductiveElement]:
    empty = FaceMultihypergraph.build((), direction=direction, order=g.index)
    return [InductiveElement(Chain.path(ring, v), direction, empty, v, True) for v in g.vertices]


def _block_coordinates(chains: Sequence[Chain], omega: OmegaBasis, key: Block) -> List[List[Scalar]]:
    basis = omega.block(*key)
    position = {chain: k for k, chain in enumerate(basis)}
    rows = []
    for chain in chains:
        row = [omega.ring.zero] * len(basis)
        for element, value in omega.decompose(chain):
            row[position[element]] = value
        rows.append(row)
    return rows


def _independent_rows(rows: Sequence[Sequence[Scalar]], ring: Ring) -> List[int]:
    """Indices of a greedily chosen independent subset (over Q when ring is Z)"""
    chosen: List[int] = []
    for i, row in enumerate(rows):
        trial = [rows[j] for j in chosen] + [row]
        if rank(ExactMatrix.from_dense(trial, ring), ring) == len(trial):
            chosen.append(i)
    return chosen


def _grounded(element: InductiveElement, below: Dict[tuple, Tuple[InductiveElement, ...]]) -> InductiveElement:
    """
    Attach to each structure label the pieces its basis element split into one level down

    Raises:
        InvariantViolation: If a label is not a signed basis element of that level
            or its pieces do not sum to it
    """
    sources = []
    for label in element.structure.labels:
        if label.sort_key() in below:
            source = LabelSource(1, below[label.sort_key()])
        elif (-label).sort_key() in below:
            source = LabelSource(-1, below[(-label).sort_key()])
        else:
            raise InvariantViolation(f"label {label.render()} is not a basis element of the level below")
        if source.total() != label:
            raise InvariantViolation(f"pieces of label {label.render()} do not sum to it")
        sources.append(source)
    return replace(element, provenance=tuple(sources))


class InductiveExtractor:
    """
    Level-by-level builder of inductive generating sets for one digraph

    Each level's generators are extracted from the kernel basis of Omega_k,
    deduplicated up to sign, and reduced against that basis block by block.
    The pieces every basis element split into are kept per level, so the
    labels of the next level carry their inductive provenance down to the
    vertices.
    """

    def __init__(self, g: Digraph, ring: Ring, direction: Direction = Direction.UPPER, cap: Optional[int] = None):
        self.g = g
        self.ring = ring
        self.direction = Direction(direction)
        self.cap = settings.mutation_cap if cap is None else cap
        self._levels: Dict[int, GeneratingSet] = {}
        self._pieces: Dict[int, Dict[tuple, Tuple[InductiveElement, ...]]] = {}

    def level(self, k: int) -> GeneratingSet:
        if k not in self._levels:
            if k > 0:
                self.level(k - 1)
            self._levels[k] = self._build(k)
        return self._levels[k]

    def pieces(self, k: int, x: Chain) -> Tuple[InductiveElement, ...]:
        """Inductive elements a basis element of Omega_k was split into"""
        self.level(k)
        return self._pieces[k][x.sort_key()]

    def _generators(self, k: int, omega: OmegaBasis) -> List[InductiveElement]:
        if k == 0:
            vertices = {e.extension_vertex: e for e in _vertex_elements(self.g, self.ring, self.direction)}
            self._pieces[0] = {x.sort_key(): (vertices[x.leading_path()[0]],) for x in omega.elements()}
            return list(vertices.values())
        basis_nm1 = omega_basis(self.g, k - 1, self.ring)
        basis_nm2 = omega_basis(self.g, k - 2, self.ring)
        below = self._pieces[k - 1]
        split: Dict[tuple, Tuple[InductiveElement, ...]] = {}
        seen: Dict[tuple, InductiveElement] = {}
        for x in omega.elements():
            elements = tuple(
                _grounded(element, below)
                for element in inductive_structure(x, basis_nm1, basis_nm2, self.direction, self.g, self.cap)
            )
            split[x.sort_key()] = elements
            for element in elements:
                reference, _ = element.chain.normalized(self.g.path_key)
                seen.setdefault(reference.sort_key(), element)
        self._pieces[k] = split
        return list(seen.values())

    def _build(self, k: int) -> GeneratingSet:
        omega = omega_basis(self.g, k, self.ring)
        result = _certified(k, self.direction, self._generators(k, omega), omega)
        logger.info(
            f"✅ Level {k} over {self.ring}: {len(result.elements)} inductive generators, "
            f"rank {result.rank} of {omega.rank}"
        )
        return result


def _certified(
    k: int, direction: Direction, elements: List[InductiveElement], omega: OmegaBasis
) -> GeneratingSet:
    """Select a basis block by block and certify it against Omega_k"""
    ring = omega.ring
    by_block: Dict[Block, List[int]] = {}
    for index, element in enumerate(elements):
        by_block.setdefault((tail(element.chain), head(element.chain)), []).append(index)

    basis: List[int] = []
    certificates: List[BlockCertificate] = []
    for key, chains in omega.blocks.items():
        indices = by_block.get(key, [])
        rows = _block_coordinates([elements[i].chain for i in indices], omega, key)
        picked = _independent_rows(rows, ring)
        chosen = [indices[j] for j in picked]
        if ring.is_field:
            certificates.append(BlockCertificate(key[0], key[1], len(chains), len(chosen)))
            basis.extend(chosen)
            continue
        # kernel blocks are lattice bases, so the Omega lattice is the identity in coordinates
        identity = [[int(i == j) for j in range(len(chains))] for i in range(len(chains))]
        spans = hermite_normal_form(rows) == identity
        is_basis = spans and len(chosen) == len(chains) and hermite_normal_form([rows[j] for j in picked]) == identity
        if is_basis:
            basis.extend(chosen)
        else:
            logger.warning(f"⚠️ Block {key} of Omega_{k} over Z has no inductive lattice basis")
        certificates.append(BlockCertificate(key[0], key[1], len(chains), len(chosen), spans, is_basis))
    return GeneratingSet(k, ring, direction, elements, sorted(basis), certificates, omega)


def inductive_generators(
    g: Digraph,
    n: int,
    ring: Ring,
    direction: Direction = Direction.UPPER,
    cap: Optional[int] = None,
) -> GeneratingSet:
    """
    Inductive generating set of Omega_n with span certificates

    Rationals are handled by extracting over Z and mapping into Q, so the
    face multiplicities stay integral.

    Args:
        g: Digraph
        n: Dimension (n >= 0)
        ring: Coefficient ring
        direction: Extension direction
        cap: Mutation closure cap

    Returns:
        GeneratingSet for level n
    """
    if n < 0:
        raise ValueError("dimension must be non-negative")
    if ring.kind != "rationals":
        return InductiveExtractor(g, ring, direction, cap).level(n)

    integral = InductiveExtractor(g, Ring.integers(), direction, cap).level(n)
    converted: Dict[int, InductiveElement] = {}
    elements = [e.to_ring(ring, converted) for e in integral.elements]
    return _certified(n, Direction(direction), elements, omega_basis(g, n, ring))
