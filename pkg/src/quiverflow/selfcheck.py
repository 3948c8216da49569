"""Randomised consistency checks between independent code paths.

Each check returns a list of human-readable violations (empty when all is
well). Used by the ``selfcheck`` command and by the test suite.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .dt import correspondence_factor, tree_coefficients
from .errors import NonGenericStability, Overflow, ZeroContraction
from .exactlin import Sublattice
from .flowtree import PerturbationSpec, enumerate_attractor_trees
from .oracle import brute_cokernel
from .quiver import SkewForm, vsum
from .tropical import (
    FaceType,
    gluing_cokernel,
    gluing_matrix,
    k_coefficient,
    outgoing_lattice,
    product_formula,
    psi_cokernel,
    psi_vertex_product,
    random_face,
    vertex_product_multiplicity,
)

DEFAULT_SCALES = (Fraction(1, 2**64), Fraction(1, 2**40))


def face_violations(face: FaceType, brute: bool = True) -> list[str]:
    tag = f"face {face.to_json()}"
    n, tangent = gluing_cokernel(face)
    k = k_coefficient(face, tangent)
    out = []
    if product_formula(face) != k * n:
        out.append(f"{tag}: product formula {product_formula(face)} != k*N = {k * n}")
    if vertex_product_multiplicity(face) != n:
        out.append(f"{tag}: vertex product {vertex_product_multiplicity(face)} != N = {n}")
    if psi_cokernel(face) != psi_vertex_product(face):
        out.append(f"{tag}: |coker Psi| {psi_cokernel(face)} != {psi_vertex_product(face)}")
    projected = tuple(v[: face.dim] for v in tangent.generators)
    if outgoing_lattice(face) != Sublattice(face.dim, projected + (face.u_out,)):
        out.append(f"{tag}: recursive outgoing lattice differs from p(T) + Z u_out")
    if brute:
        g, rel = gluing_matrix(face)
        try:
            b = brute_cokernel(g, rel)
        except Overflow:
            b = None
        if b is not None and b != n:
            out.append(f"{tag}: brute-force cokernel {b} != {n}")
    return out


def random_skew_form(rng: random.Random, d: int, bound: int = 3) -> SkewForm:
    upper = [[rng.randint(-bound, bound) for _ in range(d)] for _ in range(d)]
    return SkewForm(
        tuple(
            tuple(upper[i][j] if i < j else -upper[j][i] if i > j else 0 for j in range(d))
            for i in range(d)
        )
    )


def random_instance(rng: random.Random, max_d: int = 4, max_r: int = 5, max_entry: int = 2):
    """``(omega, parts, theta)`` with theta a random rational point of gamma-perp."""
    while True:
        d = rng.randint(2, max_d)
        r = rng.randint(2, max_r)
        omega = random_skew_form(rng, d)
        parts = []
        while len(parts) < r:
            v = tuple(rng.randint(0, max_entry) for _ in range(d))
            if any(v):
                parts.append(v)
        gamma = vsum(parts, d)
        theta = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(d)]
        i = next(j for j, a in enumerate(gamma) if a)
        theta[i] -= sum((a * b for a, b in zip(theta, gamma)), Fraction(0)) / gamma[i]
        try:
            enumerate_attractor_trees(theta, parts, omega, PerturbationSpec(seed=0))
        except (ZeroContraction, NonGenericStability):
            continue
        return omega, tuple(parts), tuple(theta)


def _signature(omega, parts, theta, spec):
    enum = enumerate_attractor_trees(theta, parts, omega, spec)
    per_tree = {h.encoding: sum(e.weight for e in embs) for h, embs in enum.fibers.items()}
    return per_tree


def instance_violations(omega, parts, theta, seeds=(1, 2, 3), scales=DEFAULT_SCALES) -> list[str]:
    tag = f"instance omega={omega.matrix} parts={parts} theta={[str(t) for t in theta]}"
    out = []
    runs = {}
    for seed in seeds:
        for scale in scales:
            runs[(seed, scale)] = _signature(omega, parts, theta, PerturbationSpec(seed=seed, scale=scale))
    first = next(iter(runs.values()))
    for key, sig in runs.items():
        if sig != first:
            out.append(f"{tag}: seed/scale {key} gives {sig}, expected {first}")
    factor = correspondence_factor(parts)
    for tc in tree_coefficients(omega, parts, theta):
        if sum(e.weight for e in tc.flows) != tc.F:
            out.append(f"{tag}: partition identity fails at {tc.tree.encoding}")
        if factor * tc.k_rho * tc.N_toric != tc.F:
            out.append(
                f"{tag}: F = {tc.F} but correspondence gives {factor * tc.k_rho * tc.N_toric} "
                f"at {tc.tree.encoding}"
            )
    return out


def run_selfcheck(max_r: int = 4, max_d: int = 3, cases: int = 50, seed: int = 0) -> dict:
    rng = random.Random(seed)
    violations = []
    for _ in range(cases):
        violations += face_violations(random_face(rng, max_d=max_d, max_r=max_r))
    for _ in range(cases):
        omega, parts, theta = random_instance(rng, max_d=max_d, max_r=max_r)
        violations += instance_violations(omega, parts, theta)
    return {"faces": cases, "instances": cases, "violations": violations}
