"""
API routes for pathchains
"""

import logging
from typing import Dict, Sequence, Tuple

from fastapi import APIRouter, HTTPException

from pathchains.core.config import settings
from pathchains.core.exceptions import (
    DigraphValidationError,
    FamilyDomainError,
    MaxDimRequiredError,
    MutationCapExceeded,
)
from pathchains.layers.digraph import Digraph, gen_family, serialize
from pathchains.layers.exact_linalg import Ring
from pathchains.layers.homology import homology_report
from pathchains.layers.inductive import inductive_generators
from pathchains.models.schemas import (
    ComputeRequest,
    DigraphModel,
    FamilyResponse,
    GeneratingSetResponse,
    HomologyReportResponse,
    InductiveRequest,
)

logger = logging.getLogger(__name__)
router = APIRouter(prefix="/api", tags=["homology"])


def build_digraph(edges: Sequence[Tuple[str, str]], vertices: Sequence[str]) -> Digraph:
    """
    Build a digraph from a request body

    Vertices named only in edges are appended in order of first appearance.

    Raises:
        DigraphValidationError: On loops or duplicate vertex names
    """
    if len(set(vertices)) != len(vertices):
        raise DigraphValidationError("duplicate vertex names")
    return Digraph.from_edges(edges, vertices)


@router.get("/health")
async def health() -> Dict[str, str]:
    """Liveness check"""
    return {"status": "ok"}


@router.post("/compute", response_model=HomologyReportResponse)
async def compute(request: ComputeRequest):
    """
    Path homology report for a digraph

    Args:
        request: Edges, optional vertex order, ring spec and max_dim

    Returns:
        Omega dimensions, Betti numbers, torsion and Euler characteristic
    """
    try:
        g = build_digraph(request.edges, request.vertices)
        logger.info(f"Compute request: {len(g.vertices)} vertices, {len(g.edges)} edges over {request.ring}")
        report = homology_report(g, request.max_dim, Ring.parse(request.ring), include_boundaries=request.boundaries)
        return HomologyReportResponse.from_report(g, report)
    except HTTPException:
        raise
    except (DigraphValidationError, MaxDimRequiredError) as e:
        logger.warning(f"Rejected compute request: {str(e)}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing homology: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"Error computing homology: {str(e)}")


@router.post("/inductive", response_model=GeneratingSetResponse)
async def inductive(request: InductiveRequest):
    """
    Inductive generating set of Omega_dim with structures and certificates
    """
    try:
        g = build_digraph(request.edges, request.vertices)
        logger.info(f"Inductive request: dimension {request.dim} over {request.ring}, {request.direction.value}")
        cap = request.mutation_cap or settings.mutation_cap
        generators = inductive_generators(g, request.dim, Ring.parse(request.ring), request.direction, cap)
        if generators.undetermined():
            raise MutationCapExceeded(cap)
        return GeneratingSetResponse.from_generating_set(g, generators)
    except HTTPException:
        raise
    except MutationCapExceeded as e:
        logger.warning(f"⚠️ {str(e)}")
        raise HTTPException(status_code=507, detail=str(e))
    except (DigraphValidationError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error extracting generators: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"Error extracting generators: {str(e)}")


@router.get("/families/{name}", response_model=FamilyResponse)
async def family(name: str, t: int):
    """
    Edge list of an example family member

    Args:
        name: Family tag
        t: Family parameter
    """
    try:
        g = gen_family(name, t)
    except FamilyDomainError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return FamilyResponse(
        family=name,
        t=t,
        digraph=DigraphModel.from_digraph(g),
        document=serialize(g, header=f"family {name} t={t}"),
    )
