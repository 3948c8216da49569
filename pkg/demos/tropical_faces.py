"""Lattice data of a few tropical faces.

For each face we print the gluing cokernel order, the saturation index of the
outgoing direction, and check both product formulas.
"""
from __future__ import annotations

import random

from quiverflow import FaceType, Quiver, skew_form_from_quiver
from quiverflow.tropical import (
    child_lattices,
    gluing_matrix,
    psi_vertex_product,
    random_face,
    tropical_summary,
)

k2 = skew_form_from_quiver(Quiver.kronecker(2))
face = FaceType(((1, 2), 3), ((1, 0), (0, 1), (0, 1)), k2)

g, relations = gluing_matrix(face)
print("gluing matrix:")
for row in g.rows:
    print("  ", list(row))
print("relations:", relations)

print("\nlattices at each vertex:")
for v, (left, right) in child_lattices(face).items():
    print(f"  {v}: {left.generators} | {right.generators}")
print("per-vertex product:", psi_vertex_product(face))
print("summary:", tropical_summary(face))

# random faces: the two sides of each identity agree
rng = random.Random(3)
print("\nrandom faces:")
for _ in range(5):
    f = random_face(rng, max_d=4, max_r=5)
    s = tropical_summary(f)
    print(f"  d={f.dim} r={len(f.parts)}  k*N = {s['k_sigma'] * s['N_trop']}  formula = {s['product_formula']}")
