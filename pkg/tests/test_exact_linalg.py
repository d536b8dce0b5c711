"""
Tests for rings, sparse matrices and the exact normal forms
"""

import random
from fractions import Fraction
from math import lcm

import pytest

from pathchains.core.config import settings
from pathchains.core.exceptions import ContractViolation, NotInSpanError, RingSpecError
from pathchains.layers.exact_linalg import (
    BasisSolver,
    ExactMatrix,
    Ring,
    Vector,
    express_in_basis,
    hermite_kernel,
    hermite_normal_form,
    is_prime,
    kernel_basis,
    rank,
    smith_normal_form,
)


@pytest.mark.parametrize(
    "spec, expected",
    [("q", Ring.rationals()), ("Z", Ring.integers()), ("zp:2", Ring.prime_field(2)), (" zp:7 ", Ring.prime_field(7))],
)
def test_ring_parse(spec, expected):
    assert Ring.parse(spec) == expected


@pytest.mark.parametrize("spec", ["", "r", "zp:", "zp:4", "zp:1", "zp:x", "z:3"])
def test_ring_parse_rejects(spec):
    with pytest.raises(RingSpecError):
        Ring.parse(spec)


def test_ring_spec_round_trip():
    for spec in ("q", "z", "zp:3"):
        assert Ring.parse(spec).spec == spec


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_prime_field_arithmetic():
    """Scalars live in [0, p); rendering uses the symmetric residue"""
    z5 = Ring.prime_field(5)
    assert z5.coerce(-1) == 4
    assert z5.symmetric(4) == -1
    assert z5.is_negative(3)
    assert not z5.is_negative(2)
    assert z5.to_json(4) == -1
    assert z5.inv(2) == 3
    assert Ring.prime_field(3).coerce(Fraction(1, 2)) == 2


def test_coerce_rejects_non_integral():
    with pytest.raises(ArithmeticError):
        Ring.integers().coerce(Fraction(1, 2))
    with pytest.raises(ArithmeticError):
        Ring.prime_field(3).coerce(Fraction(1, 3))


def test_additive_order():
    assert Ring.rationals().additive_order is None
    assert Ring.integers().additive_order is None
    assert Ring.prime_field(3).additive_order == 3


def test_from_entries_sums_repeated_positions(q):
    m = ExactMatrix.from_entries(2, 2, [((0, 0), 1), ((0, 0), -1), ((1, 1), 2)], q)
    assert m.entries() == {(1, 1): 2}


def test_from_entries_out_of_range(q):
    with pytest.raises(IndexError):
        ExactMatrix.from_entries(1, 1, {(1, 0): 1}, q)


def test_vector_rejects_zero_entries():
    with pytest.raises(ValueError):
        Vector(2, {0: 0})


def test_matmul(z):
    a = ExactMatrix.from_dense([[1, 2], [0, 1]], z)
    b = ExactMatrix.from_dense([[1, -2], [0, 1]], z)
    assert a.matmul(b).to_dense() == [[1, 0], [0, 1]]


def test_rank_depends_on_field(q, z2):
    m = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert rank(ExactMatrix.from_dense(m, q)) == 3
    assert rank(ExactMatrix.from_dense(m, z2)) == 2


def test_rank_over_integers_uses_rationals(z):
    assert rank(ExactMatrix.from_dense([[2, 4], [1, 2]], z)) == 1


def test_kernel_basis(q):
    kernel = kernel_basis(ExactMatrix.from_dense([[1, 1]], q))
    assert len(kernel) == 1
    assert kernel[0].entries == {0: -1, 1: 1}


def test_kernel_basis_requires_field(z):
    with pytest.raises(ContractViolation):
        kernel_basis(ExactMatrix.from_dense([[1, 1]], z))


def test_hermite_normal_form():
    assert hermite_normal_form([[2, 0], [0, 3], [2, 3]]) == [[2, 0], [0, 3]]
    assert hermite_normal_form([[1, 1], [0, 1]]) == [[1, 0], [0, 1]]
    assert hermite_normal_form([[0, 0]]) == []


def test_hermite_kernel(z):
    kernel = hermite_kernel(ExactMatrix.from_dense([[1, 1]], z))
    assert [v.entries for v in kernel] == [{0: 1, 1: -1}]


def test_hermite_kernel_is_saturated(z):
    """2x + 4y = 0 has kernel lattice spanned by (2, -1), not a multiple of it"""
    kernel = hermite_kernel(ExactMatrix.from_dense([[2, 4]], z))
    assert [v.entries for v in kernel] == [{0: 2, 1: -1}]


def test_hermite_kernel_of_empty_rows(z):
    kernel = hermite_kernel(ExactMatrix.zero(0, 2, z))
    assert [v.entries for v in kernel] == [{0: 1}, {1: 1}]


def test_smith_normal_form(z):
    assert smith_normal_form(ExactMatrix.from_dense([[2, 0], [0, 3]], z)) == (1, 6)
    assert smith_normal_form(ExactMatrix.from_dense([[2, 4], [6, 8]], z)) == (2, 4)
    assert smith_normal_form(ExactMatrix.zero(2, 2, z)) == ()


def test_basis_solver_over_integers(z):
    basis = [Vector.from_dense([1, 1], z), Vector.from_dense([0, 2], z)]
    solver = BasisSolver(basis, z)
    assert solver.solve(Vector.from_dense([1, 3], z)) == [1, 1]
    with pytest.raises(NotInSpanError):
        solver.solve(Vector.from_dense([0, 1], z))


def test_basis_solver_outside_span(q):
    with pytest.raises(NotInSpanError):
        express_in_basis(Vector.from_dense([0, 1], q), [Vector.from_dense([1, 0], q)], q)


def test_basis_solver_rejects_dependent_basis(q):
    with pytest.raises(ContractViolation):
        BasisSolver([Vector.from_dense([1, 2], q), Vector.from_dense([2, 4], q)], q)


def test_express_in_basis_over_prime_field(z3):
    basis = [Vector.from_dense([1, 1], z3), Vector.from_dense([0, 1], z3)]
    assert express_in_basis(Vector.from_dense([2, 0], z3), basis, z3) == [2, 1]


def test_hermite_normal_form_is_canonical():
    """Different generating sets of one lattice give one normal form"""
    first = hermite_normal_form([[4, 2, 0], [0, 3, 3], [4, 5, 3]])
    second = hermite_normal_form([[4, 5, 3], [-4, -2, 0], [4, 8, 6]])
    assert first == second
    for i, row in enumerate(first):
        lead = next(c for c, v in enumerate(row) if v)
        assert row[lead] > 0
        assert all(0 <= other[lead] < row[lead] for other in first[:i])


def _random_rows(seed: int, n_rows: int, n_cols: int, inner: int, bound: int = 3):
    """Integer matrix of rank at most `inner`, as a product of two random factors"""
    rng = random.Random(seed)
    left = [[rng.randint(-bound, bound) for _ in range(inner)] for _ in range(n_rows)]
    right = [[rng.randint(-bound, bound) for _ in range(n_cols)] for _ in range(inner)]
    return [[sum(left[r][k] * right[k][c] for k in range(inner)) for c in range(n_cols)] for r in range(n_rows)]


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("spec", ["q", "zp:2", "zp:3", "zp:7"])
def test_kernel_and_rank_agree(seed, spec):
    ring = Ring.parse(spec)
    m = ExactMatrix.from_dense(_random_rows(seed, 5, 7, 3), ring)
    kernel = kernel_basis(m)
    assert len(kernel) + rank(m) == m.n_cols
    for v in kernel:
        assert m.matvec(v).is_zero()
    assert rank(ExactMatrix.from_columns(kernel, m.n_cols, ring)) == len(kernel)


@pytest.mark.parametrize("seed", range(8))
def test_hermite_kernel_is_saturated_on_random_matrices(seed, z, q):
    m = ExactMatrix.from_dense(_random_rows(seed, 6, 6, 3, bound=4), z)
    kernel = hermite_kernel(m)
    assert len(kernel) == 6 - rank(m)
    for v in kernel:
        assert m.matvec(v).is_zero()
    rows = [v.to_dense() for v in kernel]
    for prime in (2, 3, 5, 7, 11, 13):
        # a dependency mod p would make some combination divisible by p
        assert rank(ExactMatrix.from_dense(rows, Ring.prime_field(prime))) == len(rows)
    for v in kernel_basis(ExactMatrix.from_dense(m.to_dense(), q)):
        denominator = lcm(*(Fraction(x).denominator for x in v.entries.values()))
        integral = Vector(6, {i: int(x * denominator) for i, x in v.entries.items()})
        assert len(express_in_basis(integral, kernel, z)) == len(kernel)


@pytest.mark.parametrize("seed", range(4))
def test_sparse_elimination_matches_dense(seed, q, monkeypatch):
    m = ExactMatrix.from_dense(_random_rows(seed, 6, 9, 4), q)
    dense = [v.entries for v in kernel_basis(m)]
    monkeypatch.setattr(settings, "dense_column_limit", 0)
    assert [v.entries for v in kernel_basis(m)] == dense
    assert rank(m) == 9 - len(dense)


def test_wide_matrix_uses_sparse_elimination(q):
    n = settings.dense_column_limit + 6
    m = ExactMatrix.from_entries(2, n, {(0, 0): 1, (0, n - 1): -1, (1, 1): 2, (1, 2): 2}, q)
    kernel = kernel_basis(m)
    assert len(kernel) == n - 2
    assert all(m.matvec(v).is_zero() for v in kernel)


def test_smith_normal_form_of_rank_deficient_matrix(z):
    assert smith_normal_form(ExactMatrix.from_dense([[2, 4, 6], [1, 2, 3], [0, 0, 0]], z)) == (1,)
    assert smith_normal_form(ExactMatrix.from_dense([[0, 2], [0, 0]], z)) == (2,)
