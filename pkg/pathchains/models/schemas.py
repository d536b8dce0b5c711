"""
Pydantic models for CLI output and the API
"""

from dataclasses import asdict
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator

from pathchains.core.config import settings
from pathchains.layers.digraph import Digraph
from pathchains.layers.exact_linalg import Ring
from pathchains.layers.extensions import Direction
from pathchains.layers.homology import HomologyReport
from pathchains.layers.inductive import GeneratingSet, InductiveElement


class ChainTerm(BaseModel):
    """One elementary path with its coefficient"""
    path: List[str]
    coefficient: Union[int, str]


class DigraphModel(BaseModel):
    """Vertex list and sorted edge list"""
    vertices: List[str]
    edges: List[Tuple[str, str]]

    @classmethod
    def from_digraph(cls, g: Digraph) -> "DigraphModel":
        return cls(vertices=list(g.vertices), edges=g.sorted_edges())


class BoundaryMatrixModel(BaseModel):
    """Boundary matrix with its column and row basis manifests"""
    dimension: int
    shape: Tuple[int, int]
    entries: List[List[Union[int, str]]]
    columns: List[List[ChainTerm]]
    rows: List[List[ChainTerm]]


class FaceVertexModel(BaseModel):
    """Structure vertex: sign times a sign-normalized reference chain"""
    index: int
    sign: int
    reference: List[ChainTerm]
    label: str


class DecompositionModel(BaseModel):
    """Ordered parts of one face"""
    vertex: int
    anchor: str
    parts: List[List[ChainTerm]]


class HyperedgeModel(BaseModel):
    """Hyperedge as (vertex, part) slots at an anchor"""
    anchor: str
    slots: List[Tuple[int, int]]
    face: str


class FaceGraphModel(BaseModel):
    """Face multihypergraph"""
    direction: Direction
    vertices: List[FaceVertexModel]
    decompositions: List[DecompositionModel]
    hyperedges: List[HyperedgeModel]


class PieceModel(BaseModel):
    """Inductive piece one dimension down"""
    rendered: str
    extension_vertex: str


class LabelSourceModel(BaseModel):
    """Structure vertex as sign times the sum of its pieces"""
    vertex: int
    sign: int
    pieces: List[PieceModel]


class InductiveElementModel(BaseModel):
    """Inductive element with its structure and the provenance of its labels"""
    chain: List[ChainTerm]
    rendered: str
    direction: Direction
    extension_vertex: str
    strongly_connected: Optional[bool]
    structure: FaceGraphModel
    provenance: List[LabelSourceModel] = Field(default_factory=list)

    @classmethod
    def from_element(cls, element: InductiveElement) -> "InductiveElementModel":
        return cls(
            chain=element.chain.to_json(),
            rendered=element.chain.render(),
            direction=element.direction,
            extension_vertex=element.extension_vertex,
            strongly_connected=element.strongly_connected,
            structure=element.structure.to_json(),
            provenance=[
                LabelSourceModel(
                    vertex=i,
                    sign=source.sign,
                    pieces=[
                        PieceModel(rendered=p.chain.render(), extension_vertex=p.extension_vertex)
                        for p in source.pieces
                    ],
                )
                for i, source in enumerate(element.provenance)
            ],
        )


class BlockCertificateModel(BaseModel):
    """Rank comparison for one (tail, head) block"""
    tail: str
    head: str
    omega_rank: int
    generator_rank: int
    lattice_equal: Optional[bool] = None
    inductive_basis: bool = True


class GeneratingSetResponse(BaseModel):
    """Inductive generating set with certificates"""
    digraph: DigraphModel
    ring: str
    dimension: int
    direction: Direction
    spans: bool
    inductive_basis: bool
    rank: int
    omega_rank: int
    basis: List[int]
    elements: List[InductiveElementModel]
    certificates: List[BlockCertificateModel]

    @classmethod
    def from_generating_set(cls, g: Digraph, generators: GeneratingSet) -> "GeneratingSetResponse":
        return cls(
            digraph=DigraphModel.from_digraph(g),
            ring=generators.ring.spec,
            dimension=generators.dimension,
            direction=generators.direction,
            spans=generators.spans,
            inductive_basis=generators.inductive_basis,
            rank=generators.rank,
            omega_rank=generators.omega.rank,
            basis=generators.basis,
            elements=[InductiveElementModel.from_element(e) for e in generators.elements],
            certificates=[BlockCertificateModel(**asdict(c)) for c in generators.certificates],
        )


class HomologyReportResponse(BaseModel):
    """Path homology report"""
    digraph: DigraphModel
    ring: str
    max_dim: Optional[int]
    truncated: bool
    omega_dims: List[int]
    betti: List[int]
    torsion: Optional[List[List[int]]] = None
    euler: Optional[int] = None
    boundaries: Optional[List[BoundaryMatrixModel]] = None
    generators: Optional[GeneratingSetResponse] = None

    def to_payload(self) -> Dict[str, Any]:
        """JSON-ready dict; the optional sections appear only when computed"""
        payload = self.model_dump(mode="json")
        for key in ("boundaries", "generators"):
            if payload[key] is None:
                del payload[key]
        return payload

    @classmethod
    def from_report(
        cls, g: Digraph, report: HomologyReport, generators: Optional[GeneratingSet] = None
    ) -> "HomologyReportResponse":
        return cls(
            digraph=DigraphModel.from_digraph(g),
            ring=report.ring.spec,
            max_dim=report.max_dim,
            truncated=report.truncated,
            omega_dims=report.omega_dims,
            betti=report.betti,
            torsion=report.torsion,
            euler=report.euler,
            boundaries=[BoundaryMatrixModel(**b.to_json()) for b in report.boundaries] or None,
            generators=GeneratingSetResponse.from_generating_set(g, generators) if generators else None,
        )


class ComputeRequest(BaseModel):
    """Request body for a homology computation"""
    edges: List[Tuple[str, str]] = Field(default_factory=list)
    vertices: List[str] = Field(default_factory=list)
    ring: str = settings.default_ring
    max_dim: Optional[int] = Field(default=None, ge=0)
    boundaries: bool = False

    @field_validator("ring")
    @classmethod
    def check_ring(cls, value: str) -> str:
        return Ring.parse(value).spec


class InductiveRequest(BaseModel):
    """Request body for inductive generators"""
    edges: List[Tuple[str, str]] = Field(default_factory=list)
    vertices: List[str] = Field(default_factory=list)
    ring: str = settings.default_ring
    dim: int = Field(ge=0)
    direction: Direction = Direction.UPPER
    mutation_cap: Optional[int] = Field(default=None, ge=1)

    @field_validator("ring")
    @classmethod
    def check_ring(cls, value: str) -> str:
        return Ring.parse(value).spec


class FamilyResponse(BaseModel):
    """Generated family member"""
    family: str
    t: int
    digraph: DigraphModel
    document: str


class RunConfig(BaseModel):
    """Validated CLI invocation"""
    command: Literal["compute", "gen", "inductive", "verify"]
    input: Optional[str] = None
    ring: str = settings.default_ring
    max_dim: Optional[int] = Field(default=settings.max_dim, ge=0)
    emit: Literal["json", "csv"] = settings.emit
    seed: int = settings.seed
    mutation_cap: int = Field(default=settings.mutation_cap, ge=1)
    family: Optional[str] = None
    t: Optional[int] = None
    dim: Optional[int] = Field(default=None, ge=0)
    direction: Direction = Direction.UPPER
    boundaries: bool = False

    @field_validator("ring")
    @classmethod
    def check_ring(cls, value: str) -> str:
        return Ring.parse(value).spec

    @property
    def ring_value(self) -> Ring:
        return Ring.parse(self.ring)


class CheckRow(BaseModel):
    """One acceptance check result"""
    criterion: int
    name: str
    expected: str
    actual: str
    passed: bool


class ErrorResponse(BaseModel):
    """Error response"""
    error: str
    detail: Optional[str] = None
    status_code: int

