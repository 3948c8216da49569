"""Walk through the 2-Kronecker quiver at dimension vector (1, 2).

Every step of the reconstruction is printed: the perturbed constraint, the
flows that survive, the attractor tree they collapse to, and the final
integer invariant.
"""
from __future__ import annotations

from quiverflow import (
    AttractorData,
    PerturbationSpec,
    Quiver,
    enumerate_attractor_trees,
    reconstruct_dt,
    skew_form_from_quiver,
)
from quiverflow.flowtree import perturb

omega = skew_form_from_quiver(Quiver.kronecker(2))
theta = (2, -1)
parts = ((1, 0), (0, 1), (0, 1))
print("skew form:", omega.matrix)

# a small generic perturbation of theta and of the leaf hyperplanes
spec = PerturbationSpec(seed=7)
theta_tilde, constraint = perturb(theta, parts, omega, spec)
print("perturbed theta:", [str(t) for t in theta_tilde])
print("leaf constants :", [str(e) for e in constraint.eps])

enum = enumerate_attractor_trees(theta, parts, omega, spec)
for h, flows in enum.fibers.items():
    print(f"\nattractor tree {h.encoding}")
    for emb in flows:
        print(f"  flow {emb.topology.encoding} with weight {emb.weight}")
        for key, t in emb.lengths.items():
            print(f"    edge {key}: length {t}")

# the integer invariant is the sum over decompositions of gamma
res = reconstruct_dt(omega, (1, 2), theta, AttractorData.simples(2))
print("\ndecompositions of (1, 2):")
for d in res.decompositions:
    print(f"  {d.parts}: F={d.F} aut={d.aut} attractor={d.attractor_product} -> {d.contribution}")
print("rational invariant:", res.omega_bar)
print("integer invariant :", res.omega)
