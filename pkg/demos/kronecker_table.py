"""Table of invariants at (1, k) for small Kronecker quivers.

Starting from attractor invariants equal to 1 on the two simple
representations, the reconstructed invariants are binomial coefficients in
one chamber and vanish in the other.
"""
from __future__ import annotations

from math import comb

from quiverflow import AttractorData, Quiver, reconstruct_dt, skew_form_from_quiver
from quiverflow.dt import correspondence_factor, tree_coefficients

att = AttractorData.simples(2)
print(" m  k  Omega(+)  Omega(-)  C(m,k)")
for m in range(1, 6):
    omega = skew_form_from_quiver(Quiver.kronecker(m))
    for k in range(1, min(m, 4) + 1):
        plus = reconstruct_dt(omega, (1, k), (k, -1), att).omega
        minus = reconstruct_dt(omega, (1, k), (-k, 1), att).omega
        print(f"{m:2d} {k:2d} {plus:8d} {minus:9d} {comb(m, k):7d}")

# the flow count of each tree equals its lattice-index count
omega = skew_form_from_quiver(Quiver.kronecker(3))
parts = ((1, 0), (0, 1), (0, 1))
print("\n3-Kronecker, parts", parts)
for tc in tree_coefficients(omega, parts, (2, -1)):
    print(f"  {tc.tree.encoding}: F={tc.F}  k_rho={tc.k_rho}  N_toric={tc.N_toric}  "
          f"check={correspondence_factor(parts) * tc.k_rho * tc.N_toric}")
