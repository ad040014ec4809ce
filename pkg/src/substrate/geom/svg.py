"""Deterministic SVG output for tile patches.

Coordinates stay exact until this point; they are converted to decimals at
a fixed precision only for drawing, so identical patches give identical
bytes.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .inflation import InflationRule

PALETTE = ("#e8c872", "#7fb7be", "#d3a5c9", "#9bc27f", "#f0a07a", "#a4a8d1", "#c9b79c", "#8fd1b9")


def _num(v: float, precision: int) -> str:
    s = f"{v:.{precision}f}"
    if s.startswith("-") and float(s) == 0:
        s = s[1:]
    return s


def _display(rule: InflationRule, pt) -> tuple:
    (a, b), (c, d) = rule.display
    x, y = float(pt[0]), float(pt[1])
    # SVG's y axis points down
    return a * x + b * y, -(c * x + d * y)


def _path(points, precision: int) -> str:
    parts = [f"{'M' if i == 0 else 'L'}{_num(x, precision)} {_num(y, precision)}" for i, (x, y) in enumerate(points)]
    return " ".join(parts) + " Z"


def render_svg(rule: InflationRule, patch, precision: int = 4, boundary=None, stroke_width: float | None = None) -> str:
    """An SVG 1.1 document with one path per tile (canonical order) and an optional
    outline polygon drawn on top (e.g. the inflated seed boundary)."""
    tiles = sorted(patch)
    shapes = [(t.prototile, [_display(rule, p) for p in t.polygon(rule)]) for t in tiles]
    outline = [_display(rule, p) for p in boundary] if boundary is not None else None
    pts = [p for _, ps in shapes for p in ps] + (outline or [])
    if pts:
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = 0.02 * span
    sw = stroke_width if stroke_width is not None else span / 400
    colour = {pid: PALETTE[i % len(PALETTE)] for i, pid in enumerate(rule.ids)}
    view = " ".join(_num(v, precision) for v in (x0 - pad, y0 - pad, x1 - x0 + 2 * pad, y1 - y0 + 2 * pad))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{view}">',
        f"<title>{escape(rule.name)}: {len(tiles)} tiles</title>",
        f'<g stroke="#333333" stroke-width="{_num(sw, precision)}" stroke-linejoin="round">',
    ]
    for pid, ps in shapes:
        lines.append(f'<path class="{escape(pid)}" fill="{colour[pid]}" d="{_path(ps, precision)}"/>')
    lines.append("</g>")
    if outline is not None:
        lines.append(f'<path class="boundary" fill="none" stroke="#c0392b" stroke-width="{_num(2 * sw, precision)}" '
                     f'd="{_path(outline, precision)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def inflated_boundary(rule: InflationRule, prototile: str, n: int):
    """L^n applied to a prototile's polygon (exact)."""
    pts = rule.prototiles[prototile].polygon
    for _ in range(n):
        pts = tuple(rule.apply_L(p) for p in pts)
    return pts


__all__ = ["inflated_boundary", "render_svg"]
