from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from substrate.errors import NotExpansive, ValidationError
from substrate.geom import (QuadNum, builtin_geometry, inflated_boundary, iterate, metrics, parse_quad,
                            render_svg, support_area, tile_counts, verify_stone)
from substrate.geom import polygon as poly
from substrate.geom.quadfield import golden
from substrate.acceptance import golden_svg
from substrate.cli import load_geometric

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
quads = st.builds(QuadNum, fracs, fracs)


@given(quads, quads, quads)
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    if y:
        assert (x / y) * y == x


@given(quads, quads)
def test_order_matches_floats(x, y):
    if abs(float(x) - float(y)) > 1e-9:
        assert (x < y) == (float(x) < float(y))
    assert parse_quad(str(x)) == x


def test_golden_ratio():
    phi = golden()
    assert phi * phi == phi + 1
    assert parse_quad("1/2+1/2√5") == phi == parse_quad("1/2+1/2sqrt5")
    assert parse_quad("-√5") == QuadNum(0, -1)


def _matrix_power(M, n):
    out = [[int(i == j) for j in range(len(M))] for i in range(len(M))]
    for _ in range(n):
        out = [[sum(out[i][k] * M[k][j] for k in range(len(M))) for j in range(len(M))] for i in range(len(M))]
    return out


@pytest.mark.parametrize("name", ["chair", "penta_gaps", "square"])
def test_iterate_composes(name):
    rule = builtin_geometry(name)
    assert iterate(rule, iterate(rule, None, 1), 2) == iterate(rule, None, 3)


@pytest.mark.parametrize("name", ["chair", "penta_gaps"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_tile_counts_follow_matrix_powers(name, n):
    rule = builtin_geometry(name)
    ids = rule.ids
    # M[i][j] = number of pieces of type i inside L(type j)
    M = [[sum(t.prototile == a for t in rule.pieces[b]) for b in ids] for a in ids]
    Mn = _matrix_power(M, n)
    for j, seed in enumerate(ids):
        counts = tile_counts(rule, iterate(rule, seed, n))
        assert [counts[a] for a in ids] == [Mn[i][j] for i in range(len(ids))]


def test_chair_area_and_stone():
    chair = builtin_geometry("chair")
    tiles = iterate(chair, None, 3)
    seed = chair.ids[0]
    assert support_area(chair, tiles) == 64 * chair.prototiles[seed].area
    assert poly.area(inflated_boundary(chair, seed, 3)) == support_area(chair, tiles)
    assert verify_stone(chair).stone


def test_pentagon_is_not_stone():
    rep = verify_stone(builtin_geometry("penta_gaps"))
    assert not rep.stone
    for entry in rep.prototiles:
        gap = parse_quad(entry["uncovered_area"])
        assert gap > 0 and gap.b != 0


@pytest.mark.parametrize("L, c, kappa", [
    ([[2, 0], [0, 2]], 1, 1),
    ([[3, 0], [0, 3]], 2, 1),
    ([[2, 0], [0, 2]], 0, 0),
])
def test_kappa(L, c, kappa):
    m = metrics([[Fraction(v) for v in r] for r in L], c=c)
    assert m.kappa == kappa and m.similarity and m.nesting_holds


def test_kappa_pentagon():
    m = metrics(builtin_geometry("penta_gaps"), c=1)
    phi2 = golden() * golden()
    assert m.kappa == 1 / (phi2 - 1) == 1 / golden()


def test_non_expansive_rejected():
    with pytest.raises(NotExpansive):
        metrics([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]])


def test_svg_goldens():
    chair = builtin_geometry("chair")
    assert render_svg(chair, iterate(chair, None, 2)) == golden_svg("chair_2")
    p = builtin_geometry("penta_gaps")
    svg = render_svg(p, iterate(p, "up", 2), boundary=inflated_boundary(p, "up", 2))
    assert svg == golden_svg("pentagon_2")


def test_svg_of_empty_patch():
    svg = render_svg(builtin_geometry("chair"), [])
    assert svg.startswith("<?xml") and "<path" not in svg and "0 tiles" in svg


def test_negative_depth():
    with pytest.raises(ValidationError):
        iterate(builtin_geometry("square"), None, -1)


@pytest.mark.parametrize("fname, name", [("chair_geometric.toml", "chair"), ("pentagon.toml", "penta_gaps")])
def test_geometric_files_match_builtins(fname, name):
    a, b = load_geometric(str(CONFIGS / fname)), builtin_geometry(name)
    assert a.to_json() == b.to_json()
    assert render_svg(a, iterate(a, None, 2)) == render_svg(b, iterate(b, None, 2))
