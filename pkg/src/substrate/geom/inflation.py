"""Geometric inflation rules with exact coordinates.

A rule has an expansion L (a 2x2 matrix over Q or Q(sqrt D)), a set of
prototiles and, for each prototile, the tiles placed inside its inflated
copy.  Rotated tiles are separate prototiles, so placements are pure
translations: the tile (p, t) covers t + polygon(p) and inflates to the
tiles (q, L t + s) for each placement (q, s) of p.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import NotExpansive, ValidationError
from ..lattice import is_expansive
from . import polygon as poly
from .quadfield import QuadNum, golden, parse_quad


def _q(x, D: int) -> QuadNum:
    if isinstance(x, QuadNum):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadNum(x, 0, D)
    return parse_quad(x, D)


def _vec(v, D):
    return (_q(v[0], D), _q(v[1], D))


@dataclass(frozen=True)
class Prototile:
    id: str
    polygon: tuple
    label: str = ""

    def __post_init__(self):
        pts = tuple((p[0], p[1]) for p in self.polygon)
        if not poly.is_simple(pts):
            raise ValidationError(f"prototile {self.id}: polygon is not simple")
        if poly.signed_area(pts) <= 0:
            raise ValidationError(f"prototile {self.id}: polygon must be counter-clockwise with positive area")
        object.__setattr__(self, "polygon", pts)

    @property
    def area(self):
        return poly.signed_area(self.polygon)


@dataclass(frozen=True, order=True)
class Tile:
    """A translated copy of a prototile; ordering is the canonical output order."""

    prototile: str
    translation: tuple

    def polygon(self, rule: "InflationRule"):
        return poly.translate(rule.prototiles[self.prototile].polygon, self.translation)


@dataclass
class InflationRule:
    name: str
    D: int
    L: tuple
    prototiles: dict
    pieces: dict  # prototile id -> tuple of Tile placements inside L * prototile
    display: tuple = ((1.0, 0.0), (0.0, 1.0))  # linear map applied only when drawing
    stone: bool | None = None
    notes: tuple = ()

    def __post_init__(self):
        if set(self.pieces) != set(self.prototiles):
            raise ValidationError("every prototile needs a list of pieces")
        for pid, tiles in self.pieces.items():
            for t in tiles:
                if t.prototile not in self.prototiles:
                    raise ValidationError(f"piece of {pid} refers to unknown prototile {t.prototile}")

    @property
    def ids(self) -> list:
        return list(self.prototiles)

    def det(self):
        (a, b), (c, d) = self.L
        return a * d - b * c

    def matrix(self) -> list:
        """M[i][j] = number of pieces of prototile i inside inflated prototile j."""
        ids = self.ids
        return [[sum(1 for t in self.pieces[j] if t.prototile == i) for j in ids] for i in ids]

    def apply_L(self, v):
        (a, b), (c, d) = self.L
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def inflated_polygon(self, pid: str, t=None):
        P = poly.transform(self.prototiles[pid].polygon, self.L)
        return P if t is None else poly.translate(P, t)

    def to_json(self):
        return {
            "name": self.name,
            "field": f"Q(sqrt {self.D})",
            "expansion": [[str(x) for x in row] for row in self.L],
            "prototiles": {p.id: [[str(x), str(y)] for x, y in p.polygon] for p in self.prototiles.values()},
            "pieces": {pid: [[t.prototile, str(t.translation[0]), str(t.translation[1])] for t in ts] for pid, ts in self.pieces.items()},
            "stone": self.stone,
        }


# -- stone verification -------------------------------------------------------------

@dataclass
class StoneReport:
    rule: str
    stone: bool
    prototiles: list = field(default_factory=list)

    def to_json(self):
        return {"rule": self.rule, "stone": self.stone, "prototiles": self.prototiles}


def verify_stone(rule: InflationRule) -> StoneReport:
    """Exact check that each inflated prototile is tiled by its pieces.

    Area of the inflated support against the sum of piece areas, pairwise
    interior-disjointness through exact intersection areas, and containment
    of each piece in the support.  The uncovered area is reported exactly."""
    entries = []
    stone = True
    for pid in rule.ids:
        support = rule.inflated_polygon(pid)
        s_tris = poly.triangulate(support)
        polys = [t.polygon(rule) for t in rule.pieces[pid]]
        tris = [poly.triangulate(P) for P in polys]
        support_area = poly.area(support)
        pieces_area = sum((poly.area(P) for P in polys), Fraction(0))
        overlap = Fraction(0)
        for i, j in itertools.combinations(range(len(polys)), 2):
            overlap = overlap + poly.intersection_area(polys[i], polys[j], tris[i], tris[j])
        contained = all(poly.intersection_area(P, support, T, s_tris) == poly.area(P) for P, T in zip(polys, tris))
        disjoint = overlap == 0
        uncovered = support_area - pieces_area
        ok = disjoint and contained and uncovered == 0
        stone = stone and ok
        entries.append({
            "prototile": pid,
            "pieces": len(polys),
            "support_area": str(support_area),
            "pieces_area": str(pieces_area),
            "pairwise_overlap_area": str(overlap),
            "interior_disjoint": disjoint,
            "contained": contained,
            "uncovered_area": str(uncovered),
            "uncovered_fraction_of_prototile": str(uncovered / poly.area(rule.prototiles[pid].polygon)),
            "stone": ok,
        })
    rule.stone = stone
    return StoneReport(rule.name, stone, entries)


# -- iteration ---------------------------------------------------------------------

def inflate_replace(rule: InflationRule, patch) -> list:
    """Replace every tile by the pieces of its inflated copy (canonically sorted)."""
    out = []
    for tile in patch:
        base = rule.apply_L(tile.translation)
        for piece in rule.pieces[tile.prototile]:
            out.append(Tile(piece.prototile, (base[0] + piece.translation[0], base[1] + piece.translation[1])))
    out.sort()
    return out


def seed_patch(rule: InflationRule, prototile: str | None = None) -> list:
    pid = prototile if prototile is not None else rule.ids[0]
    if pid not in rule.prototiles:
        raise ValidationError(f"unknown prototile {pid!r}")
    zero = QuadNum(0, 0, rule.D)
    return [Tile(pid, (zero, zero))]


def iterate(rule: InflationRule, seed, n: int) -> list:
    if n < 0:
        raise ValidationError("n must be >= 0")
    patch = seed_patch(rule, seed) if isinstance(seed, str) or seed is None else sorted(seed)
    for _ in range(n):
        patch = inflate_replace(rule, patch)
    return patch


def support_area(rule: InflationRule, patch):
    """Total tile area (the support area when tiles do not overlap)."""
    return sum((rule.prototiles[t.prototile].area for t in patch), Fraction(0))


def tile_counts(rule: InflationRule, patch) -> dict:
    out = {pid: 0 for pid in rule.ids}
    for t in patch:
        out[t.prototile] += 1
    return out


# -- metrics ------------------------------------------------------------------------

@dataclass
class InflationMetrics:
    lambda_lower: object
    lambda_upper: object
    c: int
    kappa: object
    radii: list  # V^k radii lambda^k + kappa, for similarities
    similarity: bool
    nesting_holds: bool | None

    def to_json(self):
        return {
            "lambda_lower": str(self.lambda_lower),
            "lambda_upper": str(self.lambda_upper),
            "derivation_radius": self.c,
            "kappa": str(self.kappa),
            "similarity": self.similarity,
            "V_radii": [str(r) for r in self.radii],
            "nesting_V_k+1_in_L(V_k)_shrunk_by_c": self.nesting_holds,
        }


def _max_norm(M):
    return max(abs(M[i][0]) + abs(M[i][1]) for i in range(2))


def _inverse(M):
    (a, b), (c, d) = M
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def metrics(rule_or_L, c: int = 0, depth: int = 4) -> InflationMetrics:
    """kappa = c / (lambda - 1) with lambda a certified lower bound on the expansion."""
    L = rule_or_L.L if isinstance(rule_or_L, InflationRule) else rule_or_L
    if c < 0:
        raise ValidationError("derivation radius must be >= 0")
    if not is_expansive([list(r) for r in L]):
        raise NotExpansive("the expansion has an eigenvalue of modulus <= 1")
    (a, b), (cc, d) = L
    similarity = b == 0 and cc == 0 and a == d and a > 0
    if similarity:
        lo = hi = a
    else:
        lo = 1 / _max_norm(_inverse(L))
        hi = _max_norm(L)
    if not lo > 1:
        raise NotExpansive("no certified expansion bound above 1 from the max-norm")
    kappa = c / (lo - 1)
    radii, nesting = [], None
    if similarity:
        radii = [lo ** k + kappa for k in range(depth + 1)]
        # L(B(r)) shrunk by c is B(lambda r - c); it must contain B(lambda^(k+1) + kappa)
        nesting = all(lo * r - c >= lo ** (k + 1) + kappa for k, r in enumerate(radii))
    return InflationMetrics(lo, hi, c, kappa, radii, similarity, nesting)


# -- built-in geometric rules ------------------------------------------------------------

def _rot90(v):
    return (-v[1], v[0])


def chair_rule() -> InflationRule:
    """The chair: an L-tromino with 2I expansion, four rotated prototiles."""
    D = 5
    q = lambda x: QuadNum(x, 0, D)  # noqa: E731
    base = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    protos = {}
    for r in range(4):
        pts = [(q(x), q(y)) for x, y in base]
        for _ in range(r):
            pts = [_rot90(p) for p in pts]
        protos[f"chair{r}"] = Prototile(f"chair{r}", tuple(pts), f"rotation {90 * r}")
    # pieces of chair0 inside 2 * chair0; the others are rotations of this configuration
    local = [(0, (0, 0)), (0, (1, 1)), (1, (4, 0)), (3, (0, 4))]
    pieces = {}
    for r in range(4):
        tiles = []
        for k, (x, y) in local:
            t = (q(x), q(y))
            for _ in range(r):
                t = _rot90(t)
            tiles.append(Tile(f"chair{(k + r) % 4}", t))
        pieces[f"chair{r}"] = tuple(sorted(tiles))
    two = q(2)
    return InflationRule("chair", D, ((two, q(0)), (q(0), two)), protos, pieces)


def square_rule() -> InflationRule:
    D = 5
    q = lambda x: QuadNum(x, 0, D)  # noqa: E731
    sq = Prototile("square", ((q(0), q(0)), (q(1), q(0)), (q(1), q(1)), (q(0), q(1))), "unit square")
    tiles = tuple(sorted(Tile("square", (q(x), q(y))) for x in (0, 1) for y in (0, 1)))
    return InflationRule("square", D, ((q(2), q(0)), (q(0), q(2))), {"square": sq}, {"square": tiles})


SIN72 = 0.9510565162951535  # display only: the y axis of the pentagon frame is scaled by sin 72


def pentagon_vertices():
    """Regular pentagon (circumradius 1, vertex on the positive x axis) in coordinates
    where y is divided by sin 72 degrees, which keeps every vertex in Q(sqrt 5)."""
    D = 5
    c1 = QuadNum(Fraction(-1, 4), Fraction(1, 4), D)  # cos 72
    c2 = QuadNum(Fraction(-1, 4), Fraction(-1, 4), D)  # cos 144
    t = QuadNum(Fraction(-1, 2), Fraction(1, 2), D)  # sin 144 / sin 72 = 2 cos 72
    one, zero = QuadNum(1, 0, D), QuadNum(0, 0, D)
    return ((one, zero), (c1, one), (c2, t), (c2, -t), (c1, -one))


def pentagon_rule() -> InflationRule:
    """Pentagons with gaps: the phi^2-inflated pentagon holds five corner pentagons
    and one inverted central pentagon."""
    D = 5
    phi = golden(D)
    up = pentagon_vertices()
    down = tuple((-x, -y) for x, y in up)
    protos = {"up": Prototile("up", up, "pentagon"), "down": Prototile("down", down, "inverted pentagon")}
    zero = QuadNum(0, 0, D)
    pieces = {
        "up": tuple(sorted([Tile("up", (phi * x, phi * y)) for x, y in up] + [Tile("down", (zero, zero))])),
        "down": tuple(sorted([Tile("down", (phi * x, phi * y)) for x, y in down] + [Tile("up", (zero, zero))])),
    }
    s = phi * phi
    return InflationRule("penta_gaps", D, ((s, zero), (zero, s)), protos, pieces, display=((1.0, 0.0), (0.0, SIN72)),
                         notes=("coordinates use a y axis scaled by 1/sin 72; areas are in these units",))


GEOMETRIC_RULES = {"chair": chair_rule, "penta_gaps": pentagon_rule, "square": square_rule}


def builtin_geometry(name: str) -> InflationRule:
    if name not in GEOMETRIC_RULES:
        raise ValidationError(f"no geometric rule {name!r}; known: {sorted(GEOMETRIC_RULES)}")
    return GEOMETRIC_RULES[name]()


def geometry_from_mapping(data: dict, name: str | None = None) -> InflationRule:
    """TOML layout: field, expansion, [[prototile]] {id, vertices}, [[piece]] {parent, prototile, translation}."""
    try:
        D = int(data.get("field", 5))
        L = tuple(tuple(_q(x, D) for x in row) for row in data["expansion"])
        protos = {}
        for p in data["prototile"]:
            protos[p["id"]] = Prototile(p["id"], tuple(_vec(v, D) for v in p["vertices"]), p.get("label", ""))
        pieces = {pid: [] for pid in protos}
        for pc in data["piece"]:
            pieces[pc["parent"]].append(Tile(pc["prototile"], _vec(pc["translation"], D)))
        display = tuple(tuple(float(x) for x in row) for row in data.get("display", ((1, 0), (0, 1))))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed geometric rule: {exc}") from None
    return InflationRule(name or data.get("name", "geometry"), D, L, protos,
                         {k: tuple(sorted(v)) for k, v in pieces.items()}, display)


__all__ = [
    "InflationMetrics",
    "InflationRule",
    "Prototile",
    "StoneReport",
    "Tile",
    "builtin_geometry",
    "chair_rule",
    "geometry_from_mapping",
    "inflate_replace",
    "iterate",
    "metrics",
    "pentagon_rule",
    "seed_patch",
    "square_rule",
    "support_area",
    "tile_counts",
    "verify_stone",
]
