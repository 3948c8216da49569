"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line; the lines are also repeated in
the pytest terminal summary (see conftest.py). Run standalone with
``python tests/test_acceptance.py``.
"""
import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import comb

from quiverflow.dt import (
    AttractorData,
    F_per_tree,
    F_total,
    correspondence_factor,
    reconstruct_dt,
    tree_coefficients,
)
from quiverflow.errors import Overflow
from quiverflow.flowtree import PerturbationSpec
from quiverflow.oracle import BRUTE_BOUND, brute_cokernel, kronecker_known
from quiverflow.quiver import Quiver, skew_form_from_quiver
from quiverflow.selfcheck import random_instance
from quiverflow.tropical import (
    gluing_cokernel,
    gluing_matrix,
    k_coefficient,
    product_formula,
    psi_cokernel,
    psi_vertex_product,
    random_face,
)

RESULTS: list[str] = []

FACE_SEED = 20240601
N_FACES = 1000
INSTANCE_SEED = 7
N_INSTANCES = 50


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)


def _kronecker_sweep():
    """(m, k, chamber sign, result) for the whole sweep."""
    out = []
    for m in range(1, 6):
        omega = skew_form_from_quiver(Quiver.kronecker(m))
        att = AttractorData.simples(2)
        for k in range(1, min(m, 4) + 1):
            for sign in (1, -1):
                theta = (sign * k, -sign)
                out.append((m, k, sign, omega, reconstruct_dt(omega, (1, k), theta, att)))
    return out


_FACES = None


def _faces():
    global _FACES
    if _FACES is None:
        rng = random.Random(FACE_SEED)
        _FACES = [random_face(rng, max_d=5, max_r=6) for _ in range(N_FACES)]
    return _FACES


def test_criterion_1_kronecker_family():
    start = time.perf_counter()
    sweep = _kronecker_sweep()
    elapsed = time.perf_counter() - start
    bad = []
    for m, k, sign, _, res in sweep:
        expected = comb(m, k) if sign > 0 else 0
        assert expected == (kronecker_known(m, k) if sign > 0 else 0)
        if res.omega != expected:
            bad.append((m, k, sign, res.omega))
    k2 = skew_form_from_quiver(Quiver.kronecker(2))
    checkpoints = (
        F_total(k2, ((1, 0), (0, 2)), (2, -1)) == 4
        and F_total(k2, ((1, 0), (0, 1), (0, 1)), (2, -1)) == 4
        and sorted(d.contribution for d in reconstruct_dt(k2, (1, 2), (2, -1), AttractorData.simples(2)).decompositions)
        == [-1, 2]
    )
    ok = not bad and checkpoints and elapsed < 5
    report(1, ok, f"{len(sweep)} chamber checks, mismatches={bad}, checkpoints={checkpoints}, {elapsed:.2f}s (< 5s)")
    assert ok


def test_criterion_2_product_formula():
    faces = _faces()
    start = time.perf_counter()
    bad = 0
    for face in faces:
        n, tangent = gluing_cokernel(face)
        if k_coefficient(face, tangent) * n != product_formula(face):
            bad += 1
    elapsed = time.perf_counter() - start
    dims = max(f.dim for f in faces), max(len(f.parts) for f in faces)
    ok = bad == 0 and elapsed < 60 and len(faces) >= 1000 and dims[0] <= 5 and dims[1] <= 6
    report(2, ok, f"{len(faces)} faces (max d={dims[0]}, max r={dims[1]}), {bad} failures, {elapsed:.2f}s (< 60s)")
    assert ok


def test_criterion_3_cokernel_identities():
    psi_bad = brute_bad = compared = 0
    for face in _faces():
        if psi_cokernel(face) != psi_vertex_product(face):
            psi_bad += 1
        n, _ = gluing_cokernel(face)
        if n > BRUTE_BOUND:
            continue
        g, rel = gluing_matrix(face)
        try:
            b = brute_cokernel(g, rel)
        except Overflow:
            b = None
        compared += 1
        if b != n:
            brute_bad += 1
    ok = psi_bad == 0 and brute_bad == 0 and compared > 0
    report(3, ok, f"psi mismatches={psi_bad}; brute-force compared on {compared} faces, mismatches={brute_bad}")
    assert ok


def test_criterion_4_correspondence():
    checked = 0
    bad = []
    for m, k, sign, omega, res in _kronecker_sweep():
        for d in res.decompositions:
            if len(d.parts) < 2:
                continue
            factor = correspondence_factor(d.parts)
            per = F_per_tree(omega, d.parts, res.theta)
            coeffs = tree_coefficients(omega, d.parts, res.theta)
            if {tc.tree: tc.F for tc in coeffs} != per:
                bad.append((m, k, sign, d.parts, "fibers"))
            for tc in coeffs:
                checked += 1
                if factor * tc.k_rho * tc.N_toric != per[tc.tree]:
                    bad.append((m, k, sign, d.parts, tc.tree.encoding))
    ok = not bad and checked > 0
    report(4, ok, f"{checked} attractor trees checked, mismatches={bad}")
    assert ok


def test_criterion_5_genericity_independence():
    rng = random.Random(INSTANCE_SEED)
    scales = (Fraction(1, 2**64), Fraction(1, 2**40))
    bad = []
    for i in range(N_INSTANCES):
        omega, parts, theta = random_instance(rng, max_d=4, max_r=5)
        results = set()
        for seed in (1, 2, 3):
            for scale in scales:
                spec = PerturbationSpec(seed=seed, scale=scale)
                per = F_per_tree(omega, parts, theta, spec)
                total = F_total(omega, parts, theta, spec)
                if sum(per.values()) != total:
                    bad.append((i, "partition", seed, scale))
                results.add((total, frozenset((h.encoding, v) for h, v in per.items())))
        if len(results) != 1:
            bad.append((i, "seed/scale"))
    ok = not bad
    report(5, ok, f"{N_INSTANCES} instances x 3 seeds x 2 scales, failures={bad}")
    assert ok


def _cli(*argv) -> bytes:
    return subprocess.run([sys.executable, "-m", "quiverflow", *argv], capture_output=True, check=True).stdout


def test_criterion_6_determinism():
    runs = [
        ("coeff", "--kronecker", "3", "--parts", "1,0;0,1;0,1;0,1", "--theta", "3,-1", "--per-tree"),
        ("dt", "--kronecker", "3", "--gamma", "1,2", "--theta", "2,-1"),
        ("selfcheck", "--max-r", "4", "--max-d", "3", "--cases", "5", "--seed", "11"),
    ]
    same = []
    for argv in runs:
        a, b = _cli(*argv), _cli(*argv)
        json.loads(a)
        same.append(a == b and len(a) > 0)
    ok = all(same)
    report(6, ok, f"byte-identical output for {sum(same)}/{len(runs)} commands")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
