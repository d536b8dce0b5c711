"""
Homology Layer
Boundary matrices in Omega bases, Betti numbers, torsion and path Euler
characteristics
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from pathchains.core.exceptions import InvariantViolation, MaxDimRequiredError, NotInSpanError
from pathchains.layers.chains import Chain, OmegaBasis, allowed_paths, omega_basis, path_boundary
from pathchains.layers.digraph import Digraph
from pathchains.layers.exact_linalg import ExactMatrix, Ring, Vector, rank, smith_normal_form

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryMatrix:
    """Matrix of the boundary from Omega_n to Omega_{n-1} with its basis manifests"""
    dimension: int
    matrix: ExactMatrix
    columns: List[Chain] = field(default_factory=list)
    rows: List[Chain] = field(default_factory=list)

    def to_json(self) -> Dict[str, object]:
        ring = self.matrix.ring
        return {
            "dimension": self.dimension,
            "shape": [self.matrix.n_rows, self.matrix.n_cols],
            "entries": [[ring.to_json(v) for v in row] for row in self.matrix.to_dense()],
            "columns": [c.to_json() for c in self.columns],
            "rows": [r.to_json() for r in self.rows],
        }


def boundary_matrix(g: Digraph, n: int, ring: Ring, basis_n: OmegaBasis, basis_nm1: OmegaBasis) -> ExactMatrix:
    """
    Matrix of the path boundary in the given bases

    Column j holds the coordinates of the boundary of the j-th element of
    basis_n against basis_nm1.

    Raises:
        InvariantViolation: If a boundary falls outside the span of basis_nm1
    """
    columns = basis_n.elements()
    n_rows = basis_nm1.rank
    if n <= 0 or not columns:
        return ExactMatrix.zero(n_rows, len(columns), ring)
    vectors = []
    for j, chain in enumerate(columns):
        try:
            coords = basis_nm1.coordinates(path_boundary(chain, g))
        except NotInSpanError as e:
            logger.error(f"❌ Boundary of Omega_{n} element {j} left Omega_{n - 1}: {e}")
            raise InvariantViolation(f"boundary of an Omega_{n} basis element is outside Omega_{n - 1}") from e
        vectors.append(Vector(n_rows, {i: v for i, v in enumerate(coords) if v != 0}))
    return ExactMatrix.from_columns(vectors, n_rows, ring)


@dataclass
class HomologyReport:
    """Omega dimensions, boundary ranks, Betti numbers and torsion up to max_dim"""
    ring: Ring
    max_dim: Optional[int]
    omega_dims: List[int]
    ranks: List[int]
    betti: List[int]
    truncated: bool = False
    torsion: Optional[List[List[int]]] = None
    euler: Optional[int] = None
    boundaries: List[BoundaryMatrix] = field(default_factory=list)


def homology_report(
    g: Digraph,
    max_dim: Optional[int] = None,
    ring: Optional[Ring] = None,
    include_boundaries: bool = False,
) -> HomologyReport:
    """
    Path homology of a digraph up to max_dim

    Args:
        g: Digraph
        max_dim: Top dimension N; defaults to the longest path length of an acyclic digraph
        ring: Coefficient ring (Q by default)
        include_boundaries: Attach boundary matrices with basis manifests

    Returns:
        HomologyReport; betti_N uses the rank of the boundary out of Omega_{N+1}

    Raises:
        MaxDimRequiredError: If the digraph has a directed cycle and max_dim is None
    """
    ring = ring or Ring.rationals()
    if not g.vertices:
        if ring.is_field:
            return HomologyReport(ring, max_dim, [], [], [], euler=0)
        return HomologyReport(ring, max_dim, [], [], [], torsion=[])
    if max_dim is None:
        max_dim = g.longest_path_length()
        if max_dim is None:
            raise MaxDimRequiredError("digraph has a directed cycle; supply max_dim")
    if max_dim < 0:
        raise ValueError("max_dim must be non-negative")

    logger.info(f"Computing path homology over {ring} up to dimension {max_dim}")
    bases = [omega_basis(g, n, ring) for n in range(max_dim + 2)]
    boundaries: List[BoundaryMatrix] = []
    for n, basis in enumerate(bases):
        below = bases[n - 1] if n else OmegaBasis.empty(-1, ring)
        matrix = boundary_matrix(g, n, ring, basis, below)
        boundaries.append(BoundaryMatrix(n, matrix, basis.elements(), below.elements()))
    omega_dims = [b.rank for b in bases[:max_dim + 1]]
    ranks = [rank(b.matrix, ring) for b in boundaries]
    betti = [omega_dims[n] - ranks[n] - ranks[n + 1] for n in range(max_dim + 1)]
    if any(b < 0 for b in betti):
        raise InvariantViolation(f"negative Betti numbers {betti}")
    truncated = bool(allowed_paths(g, max_dim + 1))

    torsion = None
    if not ring.is_field:
        torsion = [[d for d in smith_normal_form(boundaries[n + 1].matrix) if d > 1] for n in range(max_dim + 1)]
    euler = None
    if ring.is_field and not truncated:
        euler = sum((-1) ** i * d for i, d in enumerate(omega_dims))

    logger.info(f"✅ Omega dims {omega_dims}, Betti {betti} over {ring}")
    return HomologyReport(
        ring,
        max_dim,
        omega_dims,
        ranks[:max_dim + 1],
        betti,
        truncated,
        torsion,
        euler,
        boundaries[1:] if include_boundaries else [],
    )
