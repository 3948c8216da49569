"""Lattice invariants of tropical faces.

A face type is a rooted tree (its root vertex is the one adjacent to the
outgoing leg) with leaves decorated by classes gamma_i in N. Every edge or
leg E carries the class gamma_E (sum of the parts below it) and the
weighted direction ``u_E = -iota_{gamma_E} omega`` pointing towards the
root.

Computed here:

* the gluing map of a face and its cokernel order (the tropical
  multiplicity) together with its kernel (the integral tangent space);
* the coefficient k: index of ``p(T) + Z u_out`` in its saturation;
* the omega-product formula for ``k * N``;
* the vertex-product formula for N via the child lattices L_{1,v}, L_{2,v};
* the map Psi on combinatorial tangent lattices and its cokernel;
* the toric invariant of an attractor tree from the correspondence
  ``k_rho * N_toric = sum_sigma k_sigma * N_sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, InfiniteCokernel, QuiverflowError, RankViolation
from .exactlin import (
    INFINITE,
    IntMatrix,
    Sublattice,
    divisibility,
    index_in_saturation,
    intersect,
    kernel_basis,
    lattice_sum_index,
    matrix_rank,
    quotient_cokernel_order,
    saturate,
)
from .flowtree import AttractorTree, _insertions, canonical_shape, leaves_of, shape_from_json, shape_to_json
from .quiver import DimVec, SkewForm, contract, require_contractions, vsum


@dataclass(frozen=True)
class FaceType:
    """Combinatorial type of a tropical face.

    ``vertices`` holds node keys (sorted leaf labels) in pre-order, so index 0
    is the vertex adjacent to the outgoing leg. ``children[key]`` lists the
    children as ``("leg", i)`` or ``("vertex", key)``.
    """

    shape: tuple
    parts: tuple
    omega: SkewForm
    vertices: tuple = field(init=False, repr=False, compare=False)
    children: dict = field(init=False, repr=False, compare=False)
    edges: tuple = field(init=False, repr=False, compare=False)
    legs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        shape = canonical_shape(self.shape)
        if isinstance(shape, int):
            raise ValueError("a face needs at least one vertex")
        parts = tuple(tuple(int(a) for a in p) for p in self.parts)
        if leaves_of(shape) != tuple(range(1, len(parts) + 1)):
            raise ValueError("tree leaves must be labeled 1..r with one part per leaf")
        for p in parts:
            if len(p) != self.omega.dim:
                raise DimensionMismatch(f"part {p} does not live in Z^{self.omega.dim}")
        require_contractions(self.omega, parts)
        vertices, children, edges, legs = [], {}, [], []

        def walk(node):
            key = leaves_of(node)
            vertices.append(key)
            kids = []
            for c in node:
                if isinstance(c, int):
                    kids.append(("leg", c))
                    legs.append((c, key))
                else:
                    kids.append(("vertex", leaves_of(c)))
                    edges.append((leaves_of(c), key))
                    walk(c)
            children[key] = tuple(kids)

        walk(shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "legs", tuple(sorted(legs)))

    # -- basic data

    @property
    def dim(self) -> int:
        return self.omega.dim

    @property
    def root(self) -> tuple:
        return self.vertices[0]

    @property
    def gamma(self) -> DimVec:
        return vsum(self.parts, self.dim)

    def is_trivalent(self) -> bool:
        return all(len(k) == 2 for k in self.children.values())

    def class_of(self, labels: Sequence[int]) -> DimVec:
        return vsum([self.parts[i - 1] for i in labels], self.dim)

    def child_class(self, child) -> DimVec:
        kind, x = child
        return self.parts[x - 1] if kind == "leg" else self.class_of(x)

    def u(self, labels: Sequence[int]) -> DimVec:
        """Weighted direction -iota_{gamma_E} omega of the edge or leg above ``labels``."""
        return tuple(-a for a in contract(self.omega, self.class_of(labels)))

    @property
    def u_out(self) -> DimVec:
        return self.u(self.root)

    def index(self, key) -> int:
        return self.vertices.index(key)

    # -- serialisation

    @classmethod
    def from_json(cls, obj) -> "FaceType":
        return cls(
            shape_from_json(obj["tree"]),
            tuple(tuple(p) for p in obj["parts"]),
            SkewForm(tuple(tuple(r) for r in obj["skew_form"])),
        )

    def to_json(self) -> dict:
        return {
            "tree": shape_to_json(self.shape),
            "parts": [list(p) for p in self.parts],
            "skew_form": [list(r) for r in self.omega.matrix],
        }


def _require_trivalent(face: FaceType):
    if not face.is_trivalent():
        raise ValueError("operation defined for trivalent faces only")


def gluing_matrix(face: FaceType) -> tuple[IntMatrix, list[tuple[int, ...]]]:
    """Integer matrix of the gluing map and the relation vectors of its codomain.

    Columns: one block of d coordinates per vertex. Rows: a block of d rows
    per internal edge (modulo the relation ``u_E`` in that block), then one
    row per leg i given by ``x -> <x, gamma_i> / |gamma_i|``.
    """
    d = face.dim
    ncols = d * len(face.vertices)
    rows, relations = [], []
    nedge_rows = d * len(face.edges)
    for k, (child, parent) in enumerate(face.edges):
        pc, cc = face.index(parent) * d, face.index(child) * d
        for j in range(d):
            row = [0] * ncols
            row[pc + j] += 1
            row[cc + j] -= 1
            rows.append(row)
        rel = [0] * (nedge_rows + len(face.legs))
        rel[k * d : (k + 1) * d] = face.u(child)
        relations.append(tuple(rel))
    for i, vertex in face.legs:
        g = face.parts[i - 1]
        c = divisibility(g)
        row = [0] * ncols
        off = face.index(vertex) * d
        row[off : off + d] = [a // c for a in g]
        rows.append(row)
    return IntMatrix(rows, ncols=ncols), relations


def tangent_lattice(face: FaceType) -> Sublattice:
    """Kernel of the gluing map, inside the product of one M per vertex."""
    g, relations = gluing_matrix(face)
    n = g.ncols
    augmented = g.hstack(IntMatrix.from_columns(relations, g.nrows)) if relations else g
    gens = [v[:n] for v in kernel_basis(augmented).generators]
    return Sublattice(n, tuple(gens))


def gluing_cokernel(face: FaceType) -> tuple[int, Sublattice]:
    """``(N_trop, T)``: cokernel order of the gluing map and its kernel."""
    _require_trivalent(face)
    g, relations = gluing_matrix(face)
    order = quotient_cokernel_order(g, relations)
    if order is INFINITE:
        raise InfiniteCokernel("gluing map is not of finite cokernel for this face")
    return order, tangent_lattice(face)


def _root_projection(face: FaceType, tangent: Sublattice) -> list[tuple[int, ...]]:
    d = face.dim
    return [v[:d] for v in tangent.generators if any(v[:d])]


def k_coefficient(face: FaceType, tangent: Sublattice | None = None) -> int:
    """Index of ``p(T) + Z u_out`` in its saturation (p: projection to the root vertex)."""
    if tangent is None:
        tangent = tangent_lattice(face)
    d = face.dim
    projected = _root_projection(face, tangent)
    rank_p = matrix_rank(IntMatrix.from_columns(projected, d)) if projected else 0
    lattice = Sublattice(d, tuple(projected) + (face.u_out,))
    if lattice.rank != rank_p + 1:
        raise RankViolation("u_out lies in the projected tangent space")
    if lattice.rank != d - 1:
        raise RankViolation(f"p(T) + Z u_out has rank {lattice.rank}, expected {d - 1}")
    return index_in_saturation(lattice)


def product_formula(face: FaceType) -> Fraction:
    """``(|gamma| / prod |gamma_i|) * prod_v |omega(gamma_{E1,v}, gamma_{E2,v})|``."""
    _require_trivalent(face)
    value = Fraction(divisibility(face.gamma))
    for p in face.parts:
        value /= divisibility(p)
    for key in face.vertices:
        a, b = (face.child_class(c) for c in face.children[key])
        value *= abs(face.omega(a, b))
    return value


def _perp(face: FaceType, classes) -> Sublattice:
    return kernel_basis(IntMatrix(classes, ncols=face.dim))


def check_tangent_data(face: FaceType) -> None:
    """Raise RankViolation unless every vertex has a rank d-2 tangent lattice
    transverse to the direction of its parent edge."""
    d = face.dim
    for key in face.vertices:
        classes = [face.child_class(c) for c in face.children[key]]
        if _perp(face, classes).rank != d - 2:
            raise RankViolation(f"children classes at vertex {key} do not span a plane")
        if all(face.omega(face.class_of(key), g) == 0 for g in classes):
            raise RankViolation(f"parent direction at vertex {key} is tangent to the vertex locus")


def psi_cokernel(face: FaceType) -> int:
    """Cokernel order of ``Psi: prod_v Lambda_v x prod_E Z -> prod_E gamma_E^perp``.

    ``Lambda_v`` is the intersection of the orthogonals of the children
    classes of v; ``(m_v, l_E) -> (m_{parent(E)} - m_{child(E)} + l_E u_E)_E``.
    """
    check_tangent_data(face)
    d = face.dim
    nE = len(face.edges)
    if nE == 0:
        return 1
    block = {child: k for k, (child, _parent) in enumerate(face.edges)}
    parent_of = {child: parent for child, parent in face.edges}
    images = []
    for key in face.vertices:
        lam = _perp(face, [face.child_class(c) for c in face.children[key]])
        for b in lam.generators:
            vec = [0] * (d * nE)
            for child, parent in face.edges:
                if parent == key:
                    k = block[child]
                    for j in range(d):
                        vec[k * d + j] += b[j]
            if key in parent_of:
                k = block[key]
                for j in range(d):
                    vec[k * d + j] -= b[j]
            images.append(tuple(vec))
    for child, _parent in face.edges:
        vec = [0] * (d * nE)
        k = block[child]
        vec[k * d : (k + 1) * d] = face.u(child)
        images.append(tuple(vec))
    image = Sublattice(d * nE, tuple(images))
    if image.rank != (d - 1) * nE:
        raise InfiniteCokernel("Psi is not of finite cokernel")
    return index_in_saturation(image)


def child_lattices(face: FaceType) -> dict:
    """``{vertex: (L_1, L_2)}`` built recursively from the leaves.

    A leg child contributes ``gamma_i^perp``; an edge child with lower vertex w
    contributes ``L_{1,w} & L_{2,w} + Z u_E``.
    """
    _require_trivalent(face)
    out: dict = {}

    def lattice_for(child) -> Sublattice:
        kind, x = child
        if kind == "leg":
            return _perp(face, [face.parts[x - 1]])
        l1, l2 = visit(x)
        meet = intersect(l1, l2)
        return Sublattice(face.dim, meet.generators + (face.u(x),))

    def visit(key):
        if key not in out:
            out[key] = tuple(lattice_for(c) for c in face.children[key])
        return out[key]

    for key in reversed(face.vertices):
        visit(key)
    return out


def outgoing_lattice(face: FaceType) -> Sublattice:
    """``L_1 & L_2 + Z u_out`` at the root vertex."""
    l1, l2 = child_lattices(face)[face.root]
    return Sublattice(face.dim, intersect(l1, l2).generators + (face.u_out,))


def vertex_product_multiplicity(face: FaceType) -> int:
    """``prod_v |M / (L_{1,v} + L_{2,v})|``."""
    out = 1
    for l1, l2 in child_lattices(face).values():
        idx = lattice_sum_index(l1, l2)
        if idx is INFINITE:
            raise RankViolation("child lattices do not span M at some vertex")
        out *= idx
    return out


def psi_vertex_product(face: FaceType) -> int:
    """``prod_v |(L_1^sat + L_2^sat) / (L_1 + L_2)|``."""
    out = 1
    for l1, l2 in child_lattices(face).values():
        full = lattice_sum_index(l1, l2)
        sat = lattice_sum_index(saturate(l1), saturate(l2))
        if full is INFINITE or sat is INFINITE:
            raise RankViolation("child lattices do not span M at some vertex")
        assert full % sat == 0
        out *= full // sat
    return out


def tropical_summary(face: FaceType) -> dict:
    """N_trop, k_sigma, the product formula and |coker Psi| of a trivalent face."""
    n, tangent = gluing_cokernel(face)
    return {
        "N_trop": n,
        "k_sigma": k_coefficient(face, tangent),
        "product_formula": product_formula(face),
        "psi_coker": psi_cokernel(face),
    }


def contracted_face(h: AttractorTree, parts, omega: SkewForm) -> FaceType:
    return FaceType(h.shape(), tuple(parts), omega)


def rho_coefficient(h: AttractorTree, parts, omega: SkewForm) -> int:
    """k_rho of the face of curves with the (contracted) type of h through linear constraints."""
    face = contracted_face(h, parts, omega)
    tangent = tangent_lattice(face)
    if tangent.rank != omega.dim - 2:
        raise RankViolation(
            f"tangent space of the attractor-tree family has rank {tangent.rank}, "
            f"expected {omega.dim - 2}"
        )
    return k_coefficient(face, tangent)


def log_gw(h: AttractorTree, fibers: Sequence[FaceType], parts, omega: SkewForm) -> tuple[Fraction, int]:
    """``(N_toric, k_rho)`` with ``k_rho * N_toric = sum_sigma k_sigma * N_sigma``."""
    k_rho = rho_coefficient(h, parts, omega)
    total = 0
    for face in fibers:
        n, tangent = gluing_cokernel(face)
        total += k_coefficient(face, tangent) * n
    return Fraction(total, k_rho), k_rho


def face_is_valid(face: FaceType) -> bool:
    """Trivalent, nonzero omega on the children of every vertex, and tangent data of the right ranks."""
    if not face.is_trivalent():
        return False
    for key in face.vertices:
        a, b = (face.child_class(c) for c in face.children[key])
        if face.omega(a, b) == 0:
            return False
    try:
        check_tangent_data(face)
    except RankViolation:
        return False
    return True


def random_face(rng, max_d: int = 5, max_r: int = 6, max_entry: int = 2, max_form: int = 3) -> FaceType:
    """A random valid trivalent face; ``rng`` is a :class:`random.Random`."""
    while True:
        d = rng.randint(2, max_d)
        r = rng.randint(2, max_r)
        upper = [[rng.randint(-max_form, max_form) for _ in range(d)] for _ in range(d)]
        matrix = tuple(
            tuple(upper[i][j] if i < j else -upper[j][i] if i > j else 0 for j in range(d))
            for i in range(d)
        )
        parts = []
        while len(parts) < r:
            v = tuple(rng.randint(0, max_entry) for _ in range(d))
            if any(v):
                parts.append(v)
        shape = 1
        for leaf in range(2, r + 1):
            shape = rng.choice(list(_insertions(shape, leaf)))
        try:
            face = FaceType(shape, tuple(parts), SkewForm(matrix))
        except ValueError:
            continue
        except QuiverflowError:
            continue
        if face_is_valid(face):
            return face
