"""Command-line front end.

    quiverflow coeff     --kronecker 2 --parts "1,0;0,1;0,1" --theta "2,-1"
    quiverflow dt        --quiver q.json --gamma "1,2" --theta "2,-1" --attractor att.json
    quiverflow tropmult  face.json
    quiverflow selfcheck --max-r 4 --max-d 3 --cases 50 --seed 1
    quiverflow render    --kronecker 2 --parts "1,0;0,1;0,1" --theta "2,-1" --svg out.svg

Results go to stdout as canonical JSON. Input errors exit with status 2 and
a JSON error object on stderr; an exhausted perturbation search exits 3.
"""
from __future__ import annotations

import argparse
import json
import sys

from .dt import AttractorData, reconstruct_dt, tree_coefficients
from .errors import QuiverflowError, RetriesExhausted
from .flowtree import PerturbationSpec
from .jsonio import (
    dumps,
    json_int,
    parse_covector,
    parse_rational,
    parse_vector,
    parse_vectors,
    rational_str,
    skew_form_from_json,
    vector_json,
)
from .quiver import Quiver, skew_form_from_quiver
from .render import render_svg
from .selfcheck import run_selfcheck
from .tropical import FaceType, tropical_summary

EXIT_INPUT = 2
EXIT_RETRIES = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message)


def _fail(kind: str, message: str, code: int = EXIT_INPUT):
    sys.stderr.write(dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _omega(args):
    if args.kronecker is not None:
        if args.kronecker < 0:
            raise ValueError("--kronecker needs a nonnegative arrow count")
        return skew_form_from_quiver(Quiver.kronecker(args.kronecker))
    return skew_form_from_json(_load_json(args.quiver))


def _spec(args) -> PerturbationSpec:
    return PerturbationSpec(seed=args.seed, scale=parse_rational(args.scale), max_retries=args.max_retries)


def _add_quiver(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--quiver", metavar="FILE", help="quiver JSON (arrows or skew_form)")
    g.add_argument("--kronecker", type=int, metavar="M", help="use the M-Kronecker quiver")


def _add_perturbation(p):
    p.add_argument("--theta", required=True, help='stability, e.g. "2,-1" or "1/2,-1"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", default="1/18446744073709551616", help="perturbation scale p/q")
    p.add_argument("--max-retries", type=int, default=16)


def _coefficients(args):
    omega = _omega(args)
    parts = parse_vectors(args.parts)
    theta = parse_covector(args.theta)
    if len(parts) == 1:
        if any(t * g for t, g in zip(theta, parts[0])) or len(theta) != omega.dim:
            raise ValueError("theta is not orthogonal to gamma")
        return omega, parts, []
    return omega, parts, tree_coefficients(omega, parts, theta, _spec(args))


def cmd_coeff(args) -> dict:
    omega, parts, trees = _coefficients(args)
    entries = []
    for tc in trees:
        entry = {
            "id": tc.tree.encoding,
            "F": json_int(tc.F),
            "k_rho": json_int(tc.k_rho),
            "N_toric": rational_str(tc.N_toric),
        }
        if args.per_tree:
            entry["flows"] = [
                {"topology": e.topology.encoding, "weight": json_int(e.weight)} for e in tc.flows
            ]
        entries.append(entry)
    total = 1 if len(parts) == 1 else sum(tc.F for tc in trees)
    return {"F_total": json_int(total), "trees": entries}


def cmd_dt(args) -> dict:
    omega = _omega(args)
    gamma = parse_vector(args.gamma)
    theta = parse_covector(args.theta)
    att = AttractorData.from_json(_load_json(args.attractor)) if args.attractor else AttractorData.simples(omega.dim)
    res = reconstruct_dt(omega, gamma, theta, att, _spec(args))
    return {
        "gamma": vector_json(res.gamma),
        "theta": [rational_str(t) for t in res.theta],
        "omega_bar": rational_str(res.omega_bar),
        "omega": json_int(res.omega),
        "decompositions": [
            {
                "parts": [vector_json(p) for p in d.parts],
                "F": json_int(d.F),
                "aut": json_int(d.aut),
                "attractor_product": rational_str(d.attractor_product),
                "contribution": rational_str(d.contribution),
            }
            for d in res.decompositions
        ],
    }


def cmd_tropmult(args) -> dict:
    face = FaceType.from_json(_load_json(args.face))
    s = tropical_summary(face)
    return {
        "N_trop": json_int(s["N_trop"]),
        "k_sigma": json_int(s["k_sigma"]),
        "product_formula": rational_str(s["product_formula"]),
        "psi_coker": json_int(s["psi_coker"]),
    }


def cmd_selfcheck(args) -> dict:
    if args.max_r < 2 or args.max_d < 2 or args.cases < 0:
        raise ValueError("selfcheck needs --max-r >= 2, --max-d >= 2 and --cases >= 0")
    return run_selfcheck(max_r=args.max_r, max_d=args.max_d, cases=args.cases, seed=args.seed)


def cmd_render(args) -> dict:
    omega, parts, trees = _coefficients(args)
    svg = render_svg([tc.tree for tc in trees], parts, omega)
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return {"svg": args.svg, "trees": [tc.tree.encoding for tc in trees]}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quiverflow", description="Flow-tree coefficients and DT invariants of quivers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeff", help="flow-tree coefficients F and their toric counterparts")
    _add_quiver(p)
    p.add_argument("--parts", required=True, help='parts, e.g. "1,0;0,1;0,1"')
    _add_perturbation(p)
    p.add_argument("--per-tree", action="store_true", help="list the valid perturbed flows of each tree")
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("dt", help="reconstruct a DT invariant from attractor invariants")
    _add_quiver(p)
    p.add_argument("--gamma", required=True)
    p.add_argument("--attractor", metavar="FILE", help="attractor JSON; default: 1 on each simple")
    _add_perturbation(p)
    p.set_defaults(func=cmd_dt)

    p = sub.add_parser("tropmult", help="tropical multiplicity data of a face type")
    p.add_argument("face", metavar="FILE", help="face JSON: tree, parts, skew_form")
    p.set_defaults(func=cmd_tropmult)

    p = sub.add_parser("selfcheck", help="random cross-checks of independent code paths")
    p.add_argument("--max-r", type=int, default=4)
    p.add_argument("--max-d", type=int, default=3)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selfcheck)

    p = sub.add_parser("render", help="draw the attractor trees of a coefficient as SVG")
    _add_quiver(p)
    p.add_argument("--parts", required=True)
    _add_perturbation(p)
    p.add_argument("--svg", required=True, metavar="PATH")
    p.set_defaults(func=cmd_render, per_tree=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except RetriesExhausted as exc:
        _fail(type(exc).__name__, str(exc), EXIT_RETRIES)
    except (QuiverflowError, ValueError, KeyError, TypeError, OSError) as exc:
        _fail(type(exc).__name__, str(exc))
    sys.stdout.write(dumps(result) + "\n")
    if args.command == "selfcheck" and result["violations"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
