"""SVG drawings of adapted patches.

Checks are filled polygons colored by type (X orange, Z blue); gauge checks
are lighter with a dashed outline, repurposed checks get a thicker border,
and weight-2 checks bulge towards the ancilla that measures them. Gauge
checks of one super-stabilizer are joined by grey lines. Output bytes depend
only on the patch.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .code import CheckKind, Patch
from .lattice import Coord, Pauli

SCALE = 24
MARGIN = 2
COLORS = {
    (Pauli.X, False): "#f0a04b",
    (Pauli.X, True): "#f8d3a6",
    (Pauli.Z, False): "#4f86c6",
    (Pauli.Z, True): "#b3cbe8",
}


def _pt(c: tuple[float, float], x0: float, y0: float) -> tuple[float, float]:
    return ((c[0] - x0) * SCALE, (c[1] - y0) * SCALE)


def _fmt(v: float) -> str:
    return f"{v:.1f}".rstrip("0").rstrip(".")


def _polygon(points: list[tuple[float, float]]) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)


def _check_outline(ancilla: Coord, qubits: tuple[Coord, ...]) -> list[tuple[float, float]]:
    """Polygon through the check's data qubits; weight-2 checks bulge towards the measuring ancilla."""
    pts = [tuple(map(float, q)) for q in qubits]
    if len(pts) == 2:
        (ax, ay), (bx, by) = pts
        mx, my = (ax + bx) / 2, (ay + by) / 2
        dx, dy = ancilla[0] - mx, ancilla[1] - my
        norm = math.hypot(dx, dy) or 1.0
        pts.append((mx + 0.6 * dx / norm, my + 0.6 * dy / norm))
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def render_patch(patch: Patch, title: str | None = None) -> str:
    """SVG 1.1 document drawing ``patch`` with its defects."""
    lat_w, lat_h = patch.window.lattice_size
    ox, oy = patch.window.origin
    x0, y0 = ox - 1 - MARGIN, oy - 1 - MARGIN
    x1, y1 = ox + 2 * (lat_w - 1) + 1 + MARGIN, oy + 2 * (lat_h - 1) + 1 + MARGIN
    width, height = (x1 - x0) * SCALE, (y1 - y0) * SCALE
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect class="background" x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')

    out.append('<g class="checks">')
    centers = []
    for i, c in enumerate(patch.checks):
        gauge = bool(patch.central) and not patch.central[i]
        pts = [_pt(p, x0, y0) for p in _check_outline(c.ancilla, c.qubits)]
        dash = ' stroke-dasharray="4,3"' if gauge else ""
        width_ = "2.5" if c.kind is CheckKind.REPURPOSED else "1"
        out.append(f'<polygon class="check {c.pauli.value} {c.kind.value}" points="{_polygon(pts)}" '
                   f'fill="{COLORS[(c.pauli, gauge)]}" stroke="#333333" stroke-width="{width_}"{dash}/>')
        centers.append((sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts)))
    out.append("</g>")

    out.append('<g class="super-stabilizers">')
    for group in patch.super_stabilizers:
        pts = [centers[i] for i in group]
        for a, b in zip(pts, pts[1:]):
            out.append(f'<line class="grouping" x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" '
                       f'y2="{_fmt(b[1])}" stroke="#555555" stroke-width="2"/>')
    out.append("</g>")

    dm = patch.defects
    out.append('<g class="links">')
    for q, a in sorted(dm.link_defects):
        (ax, ay), (bx, by) = _pt(q, x0, y0), _pt(a, x0, y0)
        out.append(f'<line class="link-defect" x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                   f'stroke="#d62728" stroke-width="3" stroke-dasharray="3,2"/>')
    out.append("</g>")

    out.append('<g class="ancillas">')
    used = sorted({c.ancilla for c in patch.checks})
    r = SCALE * 0.18
    for a in used:
        x, y = _pt(a, x0, y0)
        out.append(f'<rect class="ancilla" x="{_fmt(x - r)}" y="{_fmt(y - r)}" width="{_fmt(2 * r)}" '
                   f'height="{_fmt(2 * r)}" fill="#222222"/>')
    for a in sorted(dm.ancilla_defects):
        x, y = _pt(a, x0, y0)
        out.append(f'<rect class="ancilla-defect" x="{_fmt(x - r)}" y="{_fmt(y - r)}" width="{_fmt(2 * r)}" '
                   f'height="{_fmt(2 * r)}" fill="#d62728"/>')
    out.append("</g>")

    out.append('<g class="data">')
    rd = SCALE * 0.28
    for q in sorted(patch.data):
        x, y = _pt(q, x0, y0)
        out.append(f'<circle class="data" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(rd)}" fill="#111111"/>')
    for q in sorted(patch.disabled - dm.data_defects):
        x, y = _pt(q, x0, y0)
        out.append(f'<circle class="disabled" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(rd)}" fill="#ffffff" '
                   f'stroke="#999999" stroke-width="1.5"/>')
    for q in sorted(dm.data_defects):
        x, y = _pt(q, x0, y0)
        out.append(f'<circle class="data-defect" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(rd)}" fill="#d62728"/>')
    for q in sorted(patch.corners):
        x, y = _pt(q, x0, y0)
        out.append(f'<circle class="corner" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(rd * 1.7)}" fill="none" '
                   f'stroke="#2ca02c" stroke-width="2"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

