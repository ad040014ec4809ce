"""Exact planar polygon operations over an ordered field (rationals or QuadNum)."""
from __future__ import annotations

from fractions import Fraction


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def signed_area(poly) -> object:
    """Shoelace formula; positive for counter-clockwise polygons."""
    n = len(poly)
    s = Fraction(0)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s = s + x0 * y1 - x1 * y0
    return s / 2


def area(poly):
    a = signed_area(poly)
    return -a if a < 0 else a


def translate(poly, t):
    return tuple((x + t[0], y + t[1]) for x, y in poly)


def transform(poly, L):
    return tuple((L[0][0] * x + L[0][1] * y, L[1][0] * x + L[1][1] * y) for x, y in poly)


def _segments_cross(p, q, r, s) -> bool:
    """Closed segments pq and rs share a point."""
    d1, d2 = _sign(cross(p, q, r)), _sign(cross(p, q, s))
    d3, d4 = _sign(cross(r, s, p)), _sign(cross(r, s, q))
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (d1 == 0 and on(p, q, r)) or (d2 == 0 and on(p, q, s)) or (d3 == 0 and on(r, s, p)) or (d4 == 0 and on(r, s, q))


def is_simple(poly) -> bool:
    """No two non-adjacent edges meet and no vertex repeats."""
    n = len(poly)
    if n < 3 or len(set(poly)) != n:
        return False
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(*edges[i], *edges[j]):
                return False
    return True


def _in_triangle(p, a, b, c) -> bool:
    """p inside or on the boundary of the counter-clockwise triangle abc."""
    return cross(a, b, p) >= 0 and cross(b, c, p) >= 0 and cross(c, a, p) >= 0


def triangulate(poly) -> list:
    """Ear clipping of a simple counter-clockwise polygon into triangles."""
    pts = list(poly)
    tris = []
    guard = 0
    while len(pts) > 3:
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if cross(a, b, c) <= 0:
                continue
            if any(_in_triangle(p, a, b, c) for p in pts if p not in (a, b, c)):
                continue
            tris.append((a, b, c))
            del pts[i]
            break
        else:
            raise ValueError("polygon is not simple or not counter-clockwise")
        guard += 1
        if guard > 10 * len(poly):
            raise ValueError("ear clipping did not terminate")
    tris.append(tuple(pts))
    return tris


def clip_convex(subject, clipper) -> list:
    """Sutherland-Hodgman: subject polygon intersected with a convex counter-clockwise clipper."""
    out = list(subject)
    m = len(clipper)
    for i in range(m):
        if not out:
            break
        a, b = clipper[i], clipper[(i + 1) % m]
        inp, out = out, []
        for j in range(len(inp)):
            p, q = inp[j - 1], inp[j]
            sp, sq = cross(a, b, p), cross(a, b, q)
            if sq >= 0:
                if sp < 0:
                    out.append(_intersection(p, q, sp, sq))
                out.append(q)
            elif sp >= 0:
                out.append(_intersection(p, q, sp, sq))
    return out


def _intersection(p, q, sp, sq):
    t = sp / (sp - sq)
    return (p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)


def intersection_area(P, Q, tris_P=None, tris_Q=None):
    """Exact area of P intersected with Q for simple counter-clockwise polygons."""
    tp = tris_P if tris_P is not None else triangulate(P)
    tq = tris_Q if tris_Q is not None else triangulate(Q)
    total = Fraction(0)
    for s in tp:
        for c in tq:
            piece = clip_convex(s, c)
            if len(piece) >= 3:
                total = total + area(piece)
    return total


__all__ = ["area", "clip_convex", "intersection_area", "is_simple", "signed_area", "transform", "translate", "triangulate"]
