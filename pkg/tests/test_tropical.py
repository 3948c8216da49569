import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quiverflow.errors import InfiniteCokernel, RankViolation
from quiverflow.exactlin import Sublattice
from quiverflow.flowtree import enumerate_attractor_trees
from quiverflow.quiver import Quiver, SkewForm, skew_form_from_quiver
from quiverflow.tropical import (
    FaceType,
    child_lattices,
    gluing_cokernel,
    gluing_matrix,
    k_coefficient,
    log_gw,
    outgoing_lattice,
    product_formula,
    psi_cokernel,
    psi_vertex_product,
    random_face,
    rho_coefficient,
    tangent_lattice,
    tropical_summary,
    vertex_product_multiplicity,
)

K1 = skew_form_from_quiver(Quiver.kronecker(1))
K2 = skew_form_from_quiver(Quiver.kronecker(2))
E1, E2 = (1, 0), (0, 1)
WORKED = FaceType(((1, 2), 3), (E1, E2, E2), K2)


def test_face_structure():
    assert WORKED.vertices == ((1, 2, 3), (1, 2))
    assert WORKED.edges == (((1, 2), (1, 2, 3)),)
    assert len(WORKED.edges) == len(WORKED.parts) - 2
    assert WORKED.u((1, 2)) == (2, -2)
    assert WORKED.u_out == (4, -2)
    assert WORKED.is_trivalent()
    assert FaceType.from_json(WORKED.to_json()) == WORKED


def test_worked_face():
    n, tangent = gluing_cokernel(WORKED)
    assert n == 2 and tangent.rank == 0
    assert k_coefficient(WORKED, tangent) == 2
    assert product_formula(WORKED) == 4
    assert psi_cokernel(WORKED) == 2
    assert tropical_summary(WORKED) == {"N_trop": 2, "k_sigma": 2, "product_formula": 4, "psi_coker": 2}


def test_worked_gluing_matrix():
    g, relations = gluing_matrix(WORKED)
    assert [list(r) for r in g.rows] == [
        [1, 0, -1, 0],
        [0, 1, 0, -1],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [0, 1, 0, 0],
    ]
    assert relations == [(2, -2, 0, 0, 0)]


def test_worked_child_lattices():
    lat = child_lattices(WORKED)
    assert lat[(1, 2, 3)] == (Sublattice(2, ((2, -2),)), Sublattice(2, ((1, 0),)))
    assert lat[(1, 2)] == (Sublattice(2, ((0, 1),)), Sublattice(2, ((1, 0),)))
    assert psi_vertex_product(WORKED) == 2
    assert vertex_product_multiplicity(WORKED) == 2


@pytest.mark.parametrize(
    "parts,expected",
    [((E1, E2), 1), ((E1, (1, 2)), 2)],
)
def test_two_leaf_multiplicities(parts, expected):
    n, _ = gluing_cokernel(FaceType((1, 2), parts, K2))
    assert n == expected


def test_k_is_one_for_primitive_outgoing_direction():
    face = FaceType((1, 2), (E1, E2), K1)
    assert face.u_out == (1, -1)
    assert k_coefficient(face) == 1


def test_product_formula_examples():
    assert product_formula(FaceType((1, 2), (E1, (0, 2)), K2)) == 2
    assert product_formula(FaceType((1, 2), (E2, (0, 2)), K2)) == 0


def test_single_vertex_psi_is_trivial():
    assert psi_cokernel(FaceType((1, 2), (E1, E2), K2)) == 1


def test_proportional_children_rejected():
    face = FaceType((1, 2), ((0, 1), (0, 2)), SkewForm(((0, 1), (-1, 0))))
    with pytest.raises(InfiniteCokernel):
        gluing_cokernel(face)
    with pytest.raises(RankViolation):
        k_coefficient(face)
    with pytest.raises(RankViolation):
        psi_cokernel(face)


def test_non_trivalent_rejected():
    star = FaceType((1, 2, 3), (E1, E2, E2), K2)
    assert not star.is_trivalent()
    with pytest.raises(ValueError):
        gluing_cokernel(star)
    with pytest.raises(ValueError):
        product_formula(star)


def test_log_gw_examples():
    enum = enumerate_attractor_trees((2, -1), (E1, E2, E2), K2)
    ((h, embs),) = enum.fibers.items()
    faces = [FaceType(e.topology.shape, (E1, E2, E2), K2) for e in embs]
    assert log_gw(h, faces, (E1, E2, E2), K2) == (2, 2)
    assert log_gw(h, [], (E1, E2, E2), K2) == (0, 2)
    assert rho_coefficient(h, (E1, E2, E2), K2) == 2
    assert tangent_lattice(FaceType(h.shape(), (E1, E2, E2), K2)).rank == 0

    enum = enumerate_attractor_trees((1, -1), (E1, E2), K2)
    ((h, embs),) = enum.fibers.items()
    faces = [FaceType(e.topology.shape, (E1, E2), K2) for e in embs]
    assert log_gw(h, faces, (E1, E2), K2) == (1, 2)


def _faces(seed, n):
    rng = random.Random(seed)
    return [random_face(rng, max_d=5, max_r=6) for _ in range(n)]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_product_formulas_on_random_faces(seed):
    for face in _faces(seed, 3):
        n, tangent = gluing_cokernel(face)
        assert tangent.rank == face.dim - 2
        k = k_coefficient(face, tangent)
        assert product_formula(face) == k * n
        assert vertex_product_multiplicity(face) == n
        assert psi_cokernel(face) == psi_vertex_product(face)
        projected = tuple(v[: face.dim] for v in tangent.generators)
        assert outgoing_lattice(face) == Sublattice(face.dim, projected + (face.u_out,))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([2, 3]))
def test_product_formula_rescaling_invariance(seed, t):
    face = _faces(seed, 1)[0]
    # gamma_i -> t gamma_i and omega -> omega / t, realised on t * omega to stay integral
    coarse = FaceType(face.shape, face.parts, face.omega.scaled(t))
    fine = FaceType(face.shape, tuple(tuple(t * a for a in p) for p in face.parts), face.omega)
    assert product_formula(coarse) == product_formula(fine)
    assert isinstance(product_formula(fine), Fraction)
