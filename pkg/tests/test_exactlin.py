import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quiverflow.errors import ZeroLattice, ZeroVector
from quiverflow.exactlin import (
    INFINITE,
    IntMatrix,
    Sublattice,
    cokernel_order,
    divisibility,
    hermite_rows,
    index_in_saturation,
    intersect,
    kernel_basis,
    lattice_sum_index,
    matrix_rank,
    quotient_cokernel_order,
    saturate,
    smith_normal_form,
)
from quiverflow.oracle import bareiss_det, brute_cokernel

small = st.integers(-9, 9)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [draw(st.lists(small, min_size=c, max_size=c)) for _ in range(r)]


@st.composite
def sublattices(draw, n=None, max_gens=4):
    n = n or draw(st.integers(1, 4))
    k = draw(st.integers(1, max_gens))
    gens = [tuple(draw(st.lists(small, min_size=n, max_size=n))) for _ in range(k)]
    return Sublattice(n, tuple(gens))


def test_snf_examples():
    assert smith_normal_form([[2, 0], [0, 3]]).diagonal == (1, 6)
    assert smith_normal_form([[1, 0], [0, 1]]).diagonal == (1, 1)
    assert smith_normal_form([[2, 4], [6, 8]]).diagonal == (2, 4)


def test_snf_zero_and_rectangular():
    assert smith_normal_form([[0, 0, 0]]).diagonal == (0,)
    assert smith_normal_form([[2], [4], [6]]).diagonal == (2,)
    assert smith_normal_form(IntMatrix([], ncols=3)).diagonal == ()


@settings(max_examples=300, deadline=None)
@given(matrices())
def test_snf_reconstructs_with_unimodular_transforms(m):
    snf = smith_normal_form(m)
    mat = IntMatrix(m)
    prod = snf.left @ mat @ snf.right
    nr, nc = mat.shape
    for i in range(nr):
        for j in range(nc):
            assert prod.rows[i][j] == (snf.diagonal[i] if i == j else 0)
    assert abs(bareiss_det(snf.left.rows)) == 1
    assert abs(bareiss_det(snf.right.rows)) == 1
    d = snf.diagonal
    assert all(a >= 0 for a in d)
    nonzero = [a for a in d if a]
    assert d[: len(nonzero)] == tuple(nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert smith_normal_form(m, transforms=False).diagonal == d


def test_cokernel_order_examples():
    assert cokernel_order([[2, 0], [0, 3]]) == 6
    assert cokernel_order([[1, 0], [0, 1]]) == 1
    assert cokernel_order([[1], [0]]) is INFINITE


@settings(max_examples=300, deadline=None)
@given(matrices(max_rows=4, max_cols=5))
def test_cokernel_order_matches_brute_force(m):
    expected = brute_cokernel(m, bound=10**6)
    got = cokernel_order(m)
    if expected == "infinite":
        assert got is INFINITE
    else:
        assert got == expected


def test_kernel_examples():
    assert kernel_basis([[1, 1]]).basis() == ((1, -1),)
    assert kernel_basis([[1, 0], [0, 1]]).generators == ()
    assert kernel_basis([[2, -2]]).basis() == ((1, 1),)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_kernel_is_saturated_and_annihilated(m):
    mat = IntMatrix(m)
    ker = kernel_basis(mat)
    assert ker.rank == mat.ncols - matrix_rank(mat)
    for v in ker.generators:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in mat.rows)
    if ker.generators:
        assert index_in_saturation(ker) == 1


def test_saturate_examples():
    assert saturate(Sublattice(2, ((2, 4),))) == Sublattice(2, ((1, 2),))
    assert saturate(Sublattice(2, ((1, 0), (0, 1)))) == Sublattice(2, ((1, 0), (0, 1)))
    assert saturate(Sublattice(2, ((2, -2), (1, 0)))) == Sublattice(2, ((1, 0), (0, 1)))


@settings(max_examples=200, deadline=None)
@given(sublattices())
def test_saturate_idempotent(s):
    sat = saturate(s)
    assert saturate(sat) == sat
    assert sat.rank == s.rank
    for g in s.generators:
        assert sat.contains(g)
    if s.rank:
        assert index_in_saturation(sat) == 1


def test_index_in_saturation_examples():
    assert index_in_saturation(Sublattice(2, ((-4, 2),))) == 2
    assert index_in_saturation(Sublattice(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))) == 1
    assert index_in_saturation(Sublattice(2, ((2, -2), (1, 0)))) == 2
    with pytest.raises(ZeroLattice):
        index_in_saturation(Sublattice(2, ((0, 0),)))


def test_lattice_sum_index_examples():
    assert lattice_sum_index(Sublattice(2, ((0, 1),)), Sublattice(2, ((-2, 1),))) == 2
    assert lattice_sum_index(Sublattice(2, ((1, 0),)), Sublattice(2, ((0, 1),))) == 1
    assert lattice_sum_index(Sublattice(2, ((1, 0),)), Sublattice(2, ((2, 0),))) is INFINITE


def _relative_index(big: Sublattice, small: Sublattice) -> int:
    """|big / small| for lattices of equal full rank, by solving for coordinates."""
    basis = big.basis()
    n = big.ambient_rank
    coords = []
    for g in small.generators:
        # solve sum_k x_k basis[k] = g over Q; basis is echelon so back-substitute
        x = [Fraction(0)] * len(basis)
        rest = [Fraction(a) for a in g]
        for k, b in enumerate(basis):
            piv = next(i for i in range(n) if b[i])
            x[k] = rest[piv] / b[piv]
            rest = [r - x[k] * c for r, c in zip(rest, b)]
        assert not any(rest)
        assert all(v.denominator == 1 for v in x)
        coords.append([int(v) for v in x])
    return quotient_cokernel_order(IntMatrix.from_columns(coords, len(basis)))


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(sublattices(n), sublattices(n))))
def test_lattice_sum_index_factorises_through_saturations(pair):
    a, b = pair
    n = a.ambient_rank
    total = lattice_sum_index(a, b)
    if total is INFINITE:
        return
    sat_a, sat_b = saturate(a), saturate(b)
    outer = lattice_sum_index(sat_a, sat_b)
    inner = _relative_index(sat_a + sat_b, a + b)
    assert total == outer * inner


def test_divisibility_examples():
    assert divisibility((-4, 2)) == 2
    assert divisibility((2, 4, 6)) == 2
    assert divisibility((1, 0, 0)) == 1
    with pytest.raises(ZeroVector):
        divisibility((0, 0))


def test_quotient_cokernel_examples():
    assert quotient_cokernel_order([[1, 0], [0, 1]], []) == 1
    assert quotient_cokernel_order(IntMatrix.from_columns([], 2), [(2, -2)]) is INFINITE
    gluing = [[1, 0, -1, 0], [0, 1, 0, -1], [0, 0, 1, 0], [0, 0, 0, 1], [0, 1, 0, 0]]
    assert quotient_cokernel_order(gluing, [(2, -2, 0, 0, 0)]) == 2


@settings(max_examples=200, deadline=None)
@given(sublattices())
def test_hermite_basis_is_canonical(s):
    rng = random.Random(repr(s.generators))
    gens = list(s.generators)
    rng.shuffle(gens)
    # unimodular recombination of the generators
    if len(gens) > 1:
        q = rng.randint(-3, 3)
        gens[0] = tuple(a + q * b for a, b in zip(gens[0], gens[1]))
    other = Sublattice(s.ambient_rank, tuple(gens))
    assert other == s
    assert hash(other) == hash(s)
    assert hermite_rows(other.generators, s.ambient_rank) == s.basis()


def test_intersection_example():
    a = Sublattice(2, ((2, 0), (0, 1)))
    b = Sublattice(2, ((3, 0), (0, 2)))
    assert intersect(a, b) == Sublattice(2, ((6, 0), (0, 2)))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(sublattices(n), sublattices(n))))
def test_intersection_lies_in_both(pair):
    a, b = pair
    meet = intersect(a, b)
    for g in meet.generators:
        assert a.contains(g) and b.contains(g)
    # rank of the intersection from dimensions of the rational spans
    assert meet.rank == a.rank + b.rank - (a + b).rank


def test_snf_benchmark_sparse_200():
    rng = random.Random(2024)
    n = 200
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = rng.choice([1, 2, 3, -1])
        for _ in range(3):
            m[i][rng.randrange(n)] = rng.randint(-5, 5)
    start = time.perf_counter()
    snf = smith_normal_form(m, transforms=False)
    elapsed = time.perf_counter() - start
    assert snf.rank == matrix_rank(m)
    assert elapsed < 1.0, f"SNF of a 200x200 sparse matrix took {elapsed:.2f}s"
