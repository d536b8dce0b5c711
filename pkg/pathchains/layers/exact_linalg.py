"""
Exact Linear Algebra Layer
Sparse matrices over Q, Z and Z_p backed by sympy's DomainMatrix, with kernel,
rank, solve and the Hermite and Smith normal forms
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple, Union

from sympy import factorint
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form as _hermite_columns
from sympy.polys.matrices.normalforms import invariant_factors

from pathchains.core.config import settings
from pathchains.core.exceptions import ContractViolation, NotInSpanError, RingSpecError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
RingKind = Literal["rationals", "integers", "prime_field"]


def is_prime(n: int) -> bool:
    """Trial division primality check"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Ring:
    """
    Coefficient ring: the rationals, the integers or a prime field

    Scalars are Fraction over Q, int over Z and int in [0, p) over Z_p.
    """
    kind: RingKind
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "prime_field":
            if self.p is None or not is_prime(self.p):
                raise RingSpecError(f"Z_p requires a prime p, got {self.p}")
        elif self.p is not None:
            raise RingSpecError(f"{self.kind} takes no modulus")

    @classmethod
    def rationals(cls) -> "Ring":
        return cls("rationals")

    @classmethod
    def integers(cls) -> "Ring":
        return cls("integers")

    @classmethod
    def prime_field(cls, p: int) -> "Ring":
        return cls("prime_field", p)

    @classmethod
    def parse(cls, spec: str) -> "Ring":
        """
        Parse a ring specification

        Args:
            spec: 'q', 'z' or 'zp:<prime>' (case-insensitive)

        Returns:
            Ring: The parsed ring

        Raises:
            RingSpecError: If the specification is malformed or p is not prime
        """
        text = (spec or "").strip().lower()
        if text == "q":
            return cls.rationals()
        if text == "z":
            return cls.integers()
        if text.startswith("zp:"):
            modulus = text[3:]
            if not modulus.isdigit():
                raise RingSpecError(f"Invalid prime in ring spec: {spec!r}")
            return cls.prime_field(int(modulus))
        raise RingSpecError(f"Unknown ring spec {spec!r}; expected q, z or zp:<prime>")

    @property
    def spec(self) -> str:
        if self.kind == "rationals":
            return "q"
        if self.kind == "integers":
            return "z"
        return f"zp:{self.p}"

    @property
    def is_field(self) -> bool:
        return self.kind != "integers"

    @property
    def additive_order(self) -> Optional[int]:
        """Order of nonzero elements in the additive group; None when torsion-free"""
        return self.p if self.kind == "prime_field" else None

    @property
    def domain(self) -> Domain:
        """The sympy domain matrices over this ring are computed in"""
        return _sympy_domain(self.kind, self.p)

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.kind == "rationals" else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.kind == "rationals" else 1

    def coerce(self, value: Scalar) -> Scalar:
        """Map an int or Fraction into this ring"""
        if self.kind == "rationals":
            return Fraction(value)
        if isinstance(value, int):
            return value % self.p if self.kind == "prime_field" else value
        if self.kind == "integers":
            value = Fraction(value)
            if value.denominator != 1:
                raise ArithmeticError(f"{value} is not an integer")
            return int(value)
        value = Fraction(value)
        if value.denominator % self.p == 0:
            raise ArithmeticError(f"{value} has no image in Z_{self.p}")
        return (value.numerator * pow(value.denominator, -1, self.p)) % self.p

    def to_element(self, value: Scalar):
        """Scalar as an element of the sympy domain"""
        value = self.coerce(value)
        if self.kind == "rationals":
            return QQ(value.numerator, value.denominator)
        return self.domain(int(value))

    def from_element(self, element) -> Scalar:
        """Sympy domain element back as a scalar of this ring"""
        value = self.domain.to_sympy(element)
        if self.kind == "rationals":
            return Fraction(int(value.p), int(value.q))
        return self.coerce(int(value))

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "prime_field":
            return (a + b) % self.p
        return a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "prime_field":
            return (a - b) % self.p
        return a - b

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "prime_field":
            return (a * b) % self.p
        return a * b

    def neg(self, a: Scalar) -> Scalar:
        if self.kind == "prime_field":
            return (-a) % self.p
        return -a

    def inv(self, a: Scalar) -> Scalar:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.kind == "prime_field":
            return pow(a, self.p - 2, self.p)
        if self.kind == "integers":
            if a not in (1, -1):
                raise ArithmeticError(f"{a} is not a unit in Z")
            return a
        return 1 / Fraction(a)

    def is_zero(self, a: Scalar) -> bool:
        return a == 0

    def symmetric(self, a: Scalar) -> Scalar:
        """Representative closest to zero (only differs from `a` over Z_p)"""
        if self.kind == "prime_field" and a > self.p // 2:
            return a - self.p
        return a

    def is_negative(self, a: Scalar) -> bool:
        return self.symmetric(a) < 0

    def to_json(self, a: Scalar) -> Union[int, str]:
        a = self.symmetric(a)
        if isinstance(a, Fraction):
            return int(a) if a.denominator == 1 else str(a)
        return int(a)

    def __str__(self) -> str:
        return {"rationals": "Q", "integers": "Z"}.get(self.kind, f"Z_{self.p}")


@lru_cache(maxsize=None)
def _sympy_domain(kind: RingKind, p: Optional[int]) -> Domain:
    if kind == "rationals":
        return QQ
    if kind == "integers":
        return ZZ
    return GF(p)


@dataclass(frozen=True)
class Vector:
    """Sparse vector: length plus index -> nonzero scalar"""
    length: int
    entries: Dict[int, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        for index, value in self.entries.items():
            if not 0 <= index < self.length:
                raise IndexError(f"index {index} out of range for length {self.length}")
            if value == 0:
                raise ValueError("Vector entries must be nonzero")

    @classmethod
    def from_dense(cls, values: Sequence[Scalar], ring: Ring) -> "Vector":
        coerced = {i: ring.coerce(v) for i, v in enumerate(values)}
        return cls(len(values), {i: v for i, v in coerced.items() if v != 0})

    def __getitem__(self, index: int) -> Scalar:
        return self.entries.get(index, 0)

    def to_dense(self) -> List[Scalar]:
        return [self.entries.get(i, 0) for i in range(self.length)]

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class ExactMatrix:
    """Sparse matrix stored as row index -> {column index -> nonzero scalar}"""
    n_rows: int
    n_cols: int
    rows: Dict[int, Dict[int, Scalar]]
    ring: Ring

    @classmethod
    def from_entries(
        cls,
        n_rows: int,
        n_cols: int,
        entries: Union[Mapping[Tuple[int, int], Scalar], Iterable[Tuple[Tuple[int, int], Scalar]]],
        ring: Ring,
    ) -> "ExactMatrix":
        """
        Build a matrix from (row, col) -> value pairs; repeated positions are summed

        Args:
            n_rows: Number of rows
            n_cols: Number of columns
            entries: Mapping or iterable of ((row, col), value)
            ring: Ambient ring for the entries

        Returns:
            ExactMatrix with zero entries dropped
        """
        items = entries.items() if isinstance(entries, Mapping) else entries
        rows: Dict[int, Dict[int, Scalar]] = {}
        for (r, c), value in items:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise IndexError(f"entry ({r}, {c}) outside {n_rows}x{n_cols}")
            row = rows.setdefault(r, {})
            _accumulate(row, c, ring.coerce(value), ring)
        return cls(n_rows, n_cols, {r: row for r, row in rows.items() if row}, ring)

    @classmethod
    def from_dense(cls, values: Sequence[Sequence[Scalar]], ring: Ring) -> "ExactMatrix":
        n_rows = len(values)
        n_cols = len(values[0]) if values else 0
        entries = {(r, c): v for r, row in enumerate(values) for c, v in enumerate(row) if v != 0}
        return cls.from_entries(n_rows, n_cols, entries, ring)

    @classmethod
    def from_columns(cls, columns: Sequence[Vector], n_rows: int, ring: Ring) -> "ExactMatrix":
        entries = {(r, c): v for c, col in enumerate(columns) for r, v in col.entries.items()}
        return cls.from_entries(n_rows, len(columns), entries, ring)

    @classmethod
    def identity(cls, size: int, ring: Ring) -> "ExactMatrix":
        return cls.from_entries(size, size, {(i, i): 1 for i in range(size)}, ring)

    @classmethod
    def zero(cls, n_rows: int, n_cols: int, ring: Ring) -> "ExactMatrix":
        return cls(n_rows, n_cols, {}, ring)

    @classmethod
    def from_domain_matrix(cls, dm: DomainMatrix, ring: Ring) -> "ExactMatrix":
        n_rows, n_cols = dm.shape
        entries = {(r, c): ring.from_element(e) for r, row in dm.to_sparse().rep.items() for c, e in row.items()}
        return cls.from_entries(n_rows, n_cols, entries, ring)

    def to_domain_matrix(self, ring: Optional[Ring] = None) -> DomainMatrix:
        """Sparse DomainMatrix over the sympy domain of `ring` (default: the matrix ring)"""
        ring = ring or self.ring
        rows = {}
        for r, row in self.rows.items():
            converted = {c: ring.to_element(v) for c, v in row.items()}
            converted = {c: e for c, e in converted.items() if not ring.domain.is_zero(e)}
            if converted:
                rows[r] = converted
        return DomainMatrix(rows, (self.n_rows, self.n_cols), ring.domain)

    def get(self, r: int, c: int) -> Scalar:
        return self.rows.get(r, {}).get(c, self.ring.zero)

    def entries(self) -> Dict[Tuple[int, int], Scalar]:
        return {(r, c): v for r, row in self.rows.items() for c, v in row.items()}

    def to_dense(self) -> List[List[Scalar]]:
        zero = self.ring.zero
        return [[self.rows.get(r, {}).get(c, zero) for c in range(self.n_cols)] for r in range(self.n_rows)]

    def column(self, c: int) -> Vector:
        return Vector(self.n_rows, {r: row[c] for r, row in self.rows.items() if c in row})

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_entries(
            self.n_cols, self.n_rows, {(c, r): v for (r, c), v in self.entries().items()}, self.ring
        )

    def matvec(self, v: Vector) -> Vector:
        if v.length != self.n_cols:
            raise ValueError(f"length {v.length} does not match {self.n_cols} columns")
        return self.matmul(ExactMatrix.from_columns([v], v.length, self.ring)).column(0)

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError(f"cannot multiply {self.n_rows}x{self.n_cols} by {other.n_rows}x{other.n_cols}")
        if not self.rows or not other.rows:
            return ExactMatrix.zero(self.n_rows, other.n_cols, self.ring)
        product = self.to_domain_matrix() * other.to_domain_matrix(self.ring)
        return ExactMatrix.from_domain_matrix(product, self.ring)

    def is_zero(self) -> bool:
        return not self.rows


def _accumulate(row: Dict[int, Scalar], col: int, value: Scalar, ring: Ring):
    total = ring.add(row.get(col, ring.zero), value)
    if total == 0:
        row.pop(col, None)
    else:
        row[col] = total


def _shaped(dm: DomainMatrix) -> DomainMatrix:
    """Dense storage for narrow matrices, sparse elimination beyond settings.dense_column_limit"""
    return dm.to_dense() if dm.shape[1] <= settings.dense_column_limit else dm


def reduced_row_echelon(m: ExactMatrix, ring: Optional[Ring] = None) -> Dict[int, Dict[int, Scalar]]:
    """
    Reduced row echelon form over a field

    Args:
        m: Matrix to reduce
        ring: Field to work over (defaults to the matrix ring)

    Returns:
        Mapping pivot column -> normalized pivot row (1 at the pivot, 0 at other pivots)
    """
    ring = ring or m.ring
    if not ring.is_field:
        raise ContractViolation("row reduction needs a field; use hermite_kernel over Z")
    if not m.rows:
        return {}
    reduced, _ = _shaped(m.to_domain_matrix(ring)).rref()
    pivots: Dict[int, Dict[int, Scalar]] = {}
    for row in reduced.to_sparse().rep.values():
        values = {c: ring.from_element(e) for c, e in row.items()}
        values = {c: v for c, v in values.items() if v != 0}
        if values:
            pivots[min(values)] = values
    return pivots


def kernel_basis(m: ExactMatrix, ring: Optional[Ring] = None) -> List[Vector]:
    """
    Basis of the right kernel over a field, one vector per free column

    Args:
        m: Matrix whose kernel is wanted
        ring: Rationals or a prime field (defaults to the matrix ring)

    Returns:
        List of Vector in reduced echelon form with respect to the free columns
    """
    ring = ring or m.ring
    if not ring.is_field:
        raise ContractViolation("kernel_basis requires a field; route integers through hermite_kernel")
    pivots = reduced_row_echelon(m, ring)
    basis = []
    for free in (c for c in range(m.n_cols) if c not in pivots):
        entries = {free: ring.one}
        for pivot_col, row in pivots.items():
            value = row.get(free)
            if value:
                entries[pivot_col] = ring.neg(value)
        basis.append(Vector(m.n_cols, entries))
    return basis


def rank(m: ExactMatrix, ring: Optional[Ring] = None) -> int:
    """Rank over the field, or over Q for an integer matrix"""
    ring = ring or m.ring
    if not ring.is_field:
        ring = Ring.rationals()
    if not m.rows:
        return 0
    return _shaped(m.to_domain_matrix(ring)).rank()


def _integer_matrix(rows: Sequence[Sequence[int]], n_cols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), n_cols), ZZ)


def hermite_normal_form(vectors: Sequence[Sequence[int]]) -> List[List[int]]:
    """
    Row Hermite normal form of the lattice spanned by integer vectors

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    and zero rows are dropped, so equal lattices give equal output.
    """
    a = [[int(x) for x in row] for row in vectors if any(row)]
    if not a:
        return []
    n = len(a[0])
    # sympy reduces columns from the bottom row up; feeding coordinates in
    # reverse puts the pivot of each returned row at its leading entry
    stacked = _integer_matrix([[row[n - 1 - i] for row in a] for i in range(n)], len(a))
    columns = _hermite_columns(stacked).to_Matrix().tolist()
    width = len(columns[0]) if columns else 0
    return [[int(columns[n - 1 - i][j]) for i in range(n)] for j in reversed(range(width))]


def _primitive(v: Vector) -> List[int]:
    """Integer multiple of a rational vector with coprime entries"""
    scale = lcm(*(Fraction(x).denominator for x in v.entries.values()))
    row = [int(Fraction(x) * scale) for x in v.to_dense()]
    divisor = gcd(*row)
    return [x // divisor for x in row]


def _saturate(rows: List[List[int]]) -> List[List[int]]:
    """
    Basis of the integer points in the rational span of independent rows

    For each prime p dividing the lattice index, a relation c with c.B = 0
    mod p replaces the row at the relation's free index by (c.B) / p.
    """
    if not rows:
        return rows
    rows = [list(row) for row in rows]
    n = len(rows[0])
    index = prod(abs(int(d)) for d in invariant_factors(_integer_matrix(rows, n)) if d)
    for p in sorted(factorint(index)):
        field = Ring.prime_field(p)
        while True:
            relations = kernel_basis(ExactMatrix.from_dense(rows, field).transpose(), field)
            if not relations:
                break
            c = relations[0]
            j = max(c.entries)
            combined = [sum(c.entries[i] * rows[i][t] for i in c.entries) for t in range(n)]
            rows[j] = [x // p for x in combined]
            logger.debug(f"Saturated kernel row {j} at prime {p}")
    return rows


def hermite_kernel(m: ExactMatrix) -> List[Vector]:
    """
    Saturated Z-basis of the integer kernel

    The rational kernel is scaled to primitive integer vectors, saturated
    prime by prime against the invariant factors of the lattice, and returned
    in row Hermite normal form.

    Args:
        m: Integer matrix

    Returns:
        List of Vector with exact integer entries
    """
    n = m.n_cols
    if n == 0:
        return []
    rows = [_primitive(v) for v in kernel_basis(m, Ring.rationals())]
    lattice = hermite_normal_form(_saturate(rows))
    return [Vector(n, {i: v for i, v in enumerate(row) if v != 0}) for row in lattice]


def smith_normal_form(m: ExactMatrix) -> Tuple[int, ...]:
    """
    Nonzero invariant factors d_1 | d_2 | ... of an integer matrix

    Args:
        m: Integer matrix

    Returns:
        Tuple of positive integers
    """
    if not m.rows:
        return ()
    factors = invariant_factors(m.to_domain_matrix(Ring.integers()).to_dense())
    return tuple(sorted(abs(int(d)) for d in factors if d))


class BasisSolver:
    """
    Fixed list of independent vectors, reused for many solves

    The basis is restricted to a set of coordinates where it is invertible;
    a solve multiplies by that inverse and checks the result on every
    coordinate. Over Z the work is done over Q and integrality is checked on
    the way out.
    """

    def __init__(self, basis: Sequence[Vector], ring: Ring, length: Optional[int] = None):
        self.ring = ring
        self.size = len(basis)
        self.length = basis[0].length if basis else (length or 0)
        self._work = ring if ring.is_field else Ring.rationals()
        self._columns = ExactMatrix.from_columns(basis, self.length, self._work)
        self._coordinates: List[int] = []
        self._inverse: Optional[DomainMatrix] = None
        if not basis:
            return
        pivots = reduced_row_echelon(self._columns.transpose(), self._work)
        if len(pivots) < self.size:
            raise ContractViolation(f"{self.size - len(pivots)} basis vectors are linearly dependent on the others")
        self._coordinates = sorted(pivots)
        square = ExactMatrix.from_entries(
            self.size,
            self.size,
            {(i, j): self._columns.get(c, j) for i, c in enumerate(self._coordinates) for j in range(self.size)},
            self._work,
        )
        self._inverse = square.to_domain_matrix().to_dense().inv().to_sparse()

    def solve(self, v: Vector) -> List[Scalar]:
        """
        Coefficients c with v = sum c_i b_i

        Raises:
            NotInSpanError: If v is outside the span (or the Z-span over Z)
        """
        if v.length != self.length:
            raise ValueError(f"length {v.length} does not match basis length {self.length}")
        work = self._work
        target = ExactMatrix.from_columns([v], v.length, work)
        if self._inverse is None:
            if not target.is_zero():
                raise NotInSpanError("nonzero vector against an empty basis")
            return []
        picked = ExactMatrix.from_entries(
            self.size, 1, {(i, 0): v[c] for i, c in enumerate(self._coordinates) if v[c]}, work
        )
        coeffs = ExactMatrix.from_domain_matrix(self._inverse * picked.to_domain_matrix(), work)
        if self._columns.matmul(coeffs).rows != target.rows:
            raise NotInSpanError("vector has a residue outside the span")
        result = [coeffs.get(i, 0) for i in range(self.size)]
        if self.ring.is_field:
            return [work.coerce(c) for c in result]
        if any(Fraction(c).denominator != 1 for c in result):
            raise NotInSpanError("vector lies in the rational span but not the integer span")
        return [int(c) for c in result]


def express_in_basis(v: Vector, basis: Sequence[Vector], ring: Ring) -> List[Scalar]:
    """
    Unique coefficient list with v = sum c_i b_i

    Args:
        v: Vector to express
        basis: Linearly independent vectors of the same length
        ring: Coefficient ring

    Returns:
        List of scalars, one per basis vector
    """
    return BasisSolver(basis, ring, length=v.length).solve(v)
