"""Canonical JSON for exact values.

Rationals travel as strings ``"p/q"`` (``q > 0``, lowest terms, and just
``"p"`` when ``q == 1``). Integers are JSON numbers below 2**53 in absolute
value and decimal strings otherwise, so no consumer loses precision.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence

from .quiver import Quiver, SkewForm, skew_form_from_quiver

SAFE_INT = 2**53


def rational_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def json_int(n: int):
    return n if abs(n) < SAFE_INT else str(n)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    if "." in text or "e" in text.lower():
        raise ValueError(f"rationals must be written as p or p/q, got {text!r}")
    return Fraction(text)


def parse_vector(text: str) -> tuple[int, ...]:
    items = [t.strip() for t in text.split(",")]
    if not items or any(not t for t in items):
        raise ValueError(f"malformed integer vector {text!r}")
    return tuple(int(t) for t in items)


def parse_vectors(text: str) -> tuple[tuple[int, ...], ...]:
    """``"1,0;0,1"`` -> ((1, 0), (0, 1))."""
    vecs = tuple(parse_vector(chunk) for chunk in text.split(";"))
    if len({len(v) for v in vecs}) != 1:
        raise ValueError(f"vectors of different lengths in {text!r}")
    return vecs


def parse_covector(text: str) -> tuple[Fraction, ...]:
    items = text.split(",")
    return tuple(parse_rational(t) for t in items)


def skew_form_from_json(obj) -> SkewForm:
    """Quiver JSON: ``{"vertices": [...], "arrows": [[...]]}`` or ``{"skew_form": [[...]]}``."""
    if "skew_form" in obj:
        form = SkewForm(tuple(tuple(r) for r in obj["skew_form"]))
        if "vertices" in obj and len(obj["vertices"]) != form.dim:
            raise ValueError("vertex list and skew form disagree in size")
        return form
    if "arrows" not in obj:
        raise ValueError("quiver JSON needs 'arrows' or 'skew_form'")
    arrows = tuple(tuple(r) for r in obj["arrows"])
    labels = tuple(str(v) for v in obj.get("vertices", range(1, len(arrows) + 1)))
    return skew_form_from_quiver(Quiver(labels, arrows))


def vector_json(v: Sequence[int]) -> list:
    return [json_int(a) for a in v]
