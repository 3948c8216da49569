"""SVG drawings of attractor flow trees.

Coordinates stay exact rationals until they are written out, where they are
rounded to two decimals (presentation only). Trees in M of rank > 2 are
drawn through the projection to the first two coordinates.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .flowtree import AttractorTree, AttractorVertex
from .quiver import SkewForm, contract

SIZE = 400
MARGIN = 40


def fixed(q: Fraction) -> str:
    """Exact half-even rounding to two decimals."""
    n = round(Fraction(q) * 100)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // 100}.{n % 100:02d}"


def _xy(p) -> tuple[Fraction, Fraction]:
    return (Fraction(p[0]), Fraction(p[1]) if len(p) > 1 else Fraction(0))


def _segments(h: AttractorTree, parts, omega: SkewForm, leg_length: Fraction):
    """Edges as (start, end, kind, label) in the plane."""
    out = [(_xy(h.root), _xy(h.top.position), "edge", "")]

    def walk(v: AttractorVertex):
        start = _xy(v.position)
        for c in v.children:
            if isinstance(c, int):
                dx, dy = _xy(contract(omega, parts[c - 1]))
                norm = max(abs(dx), abs(dy)) or Fraction(1)
                end = (start[0] + dx * leg_length / norm, start[1] + dy * leg_length / norm)
                label = "(" + ",".join(str(a) for a in parts[c - 1]) + ")"
                out.append((start, end, "leg", label))
            else:
                out.append((start, _xy(c.position), "edge", ""))
                walk(c)

    walk(h.top)
    return out


def render_svg(trees: Sequence[AttractorTree], parts, omega: SkewForm) -> str:
    """One ``<g class="attractor-tree">`` per tree, stacked vertically."""
    parts = [tuple(p) for p in parts]
    groups = []
    for idx, h in enumerate(trees):
        points = [_xy(h.root)] + [_xy(v.position) for v in h.top.vertices()]
        span = max(
            max(p[0] for p in points) - min(p[0] for p in points),
            max(p[1] for p in points) - min(p[1] for p in points),
        )
        leg = span / 2 if span else Fraction(1)
        segs = _segments(h, parts, omega, leg)
        xs = [c for s in segs for c in (s[0][0], s[1][0])]
        ys = [c for s in segs for c in (s[0][1], s[1][1])]
        x0, y1 = min(xs), max(ys)
        extent = max(max(xs) - x0, y1 - min(ys)) or Fraction(1)
        k = Fraction(SIZE - 2 * MARGIN) / extent
        top = idx * SIZE

        def tx(p):
            # y axis flipped so that M is drawn in the usual orientation
            return fixed(MARGIN + (p[0] - x0) * k), fixed(top + MARGIN + (y1 - p[1]) * k)

        lines = [f'<g class="attractor-tree" id="tree-{idx}">', f"<title>{_escape(h.encoding)}</title>"]
        for start, end, kind, label in segs:
            (ax, ay), (bx, by) = tx(start), tx(end)
            marker = ' marker-end="url(#arrow)"' if kind == "leg" else ""
            lines.append(
                f'<line class="{kind}" x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="black"{marker}/>'
            )
            if label:
                lines.append(f'<text x="{bx}" y="{by}" font-size="12">{label}</text>')
        rx, ry = tx(_xy(h.root))
        lines.append(f'<circle class="root" cx="{rx}" cy="{ry}" r="3"/>')
        lines.append("</g>")
        groups.append("\n".join(lines))
    height = SIZE * max(len(trees), 1)
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{height}" '
        f'viewBox="0 0 {SIZE} {height}">\n'
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
        'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>'
    )
    return "\n".join([head] + groups + ["</svg>"]) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
