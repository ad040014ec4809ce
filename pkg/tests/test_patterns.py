from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from substrate.errors import AlphabetMismatch, NonInvertibleMatrix, SubShapeNotContained, ValidationError
from substrate.patches import Alphabet, Box, Patch, patch_glue, patch_restrict, patch_shift, patch_transform
from substrate.patterns import (constant_pattern, extract_box, extract_patch, halfspace_pattern_1d,
                                pattern_equal, pattern_translate, periodic_pattern, value_at)

LETTERS = "abc"


@st.composite
def patches(draw, d=None):
    d = d or draw(st.integers(1, 2))
    lo = tuple(draw(st.integers(-4, 4)) for _ in range(d))
    size = tuple(draw(st.integers(1, 4)) for _ in range(d))
    box = Box.sized(size, lo)
    values = draw(st.lists(st.sampled_from(LETTERS), min_size=len(box), max_size=len(box)))
    return Patch(box, tuple(values))


UNIMODULAR = [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (0, 1)), ((2, 1), (1, 1)), ((0, -1), (1, 0))]


@given(patches(), st.lists(st.integers(-5, 5), min_size=2, max_size=2))
def test_shift_round_trip(p, z):
    z = tuple(z[:p.dim])
    q = patch_shift(p, z)
    assert patch_shift(q, tuple(-v for v in z)) == p
    for c, v in p.items():
        assert q[tuple(a - b for a, b in zip(c, z))] == v


@given(patches(), st.data())
def test_restrict_values(p, data):
    lo = tuple(data.draw(st.integers(a, b)) for a, b in zip(p.box.lo, p.box.hi))
    hi = tuple(data.draw(st.integers(a, b)) for a, b in zip(lo, p.box.hi))
    sub = Box(lo, hi)
    r = patch_restrict(p, sub)
    assert all(r[c] == p[c] for c in sub.cells())
    assert patch_restrict(r, sub) == r


def test_restrict_outside_raises():
    p = Patch(Box((0,), (2,)), "abc")
    with pytest.raises(SubShapeNotContained):
        patch_restrict(p, Box((1,), (3,)))


@given(patches(d=2), st.sampled_from(UNIMODULAR))
def test_transform_is_invertible(p, L):
    (a, b), (c, d) = L
    det = a * d - b * c
    inv = ((d * det, -b * det), (-c * det, a * det))
    back = patch_transform(patch_transform(p, L), inv)
    assert back.to_patch() == p


def test_singular_transform_raises():
    with pytest.raises(NonInvertibleMatrix):
        patch_transform(Patch(Box((0, 0), (1, 1)), "abca"), ((1, 2), (2, 4)))


@given(patches(d=1), patches(d=1))
def test_glue_symmetric_and_consistent(p, q):
    g, h = patch_glue(p, q), patch_glue(q, p)
    assert (g is None) == (h is None)
    if g is not None:
        assert g == h
        for c, v in list(p.items()) + list(q.items()):
            assert g.cells[c] == v
    else:
        assert any(c in q.box and q[c] != v for c, v in p.items())


@given(patches())
def test_json_round_trip(p):
    assert Patch.from_json(p.to_json(), Alphabet(tuple(LETTERS))) == p


def test_json_rejects_foreign_letters():
    p = Patch(Box((0,), (1,)), ("a", "z"))
    with pytest.raises(AlphabetMismatch):
        Patch.from_json(p.to_json(), Alphabet(("a", "b")))


def test_patch_size_mismatch():
    with pytest.raises(ValidationError):
        Patch(Box((0,), (3,)), "ab")


@settings(max_examples=50)
@given(st.text(alphabet=LETTERS, min_size=1, max_size=6), st.integers(-20, 20), st.integers(-30, 30))
def test_periodic_pattern_values(word, origin, x):
    P = periodic_pattern(word, origin=origin)
    assert value_at(P, (x,)) == word[(x - origin) % len(word)]
    assert pattern_equal(P, pattern_translate(P, (len(word),))).value


@given(st.text(alphabet=LETTERS, min_size=1, max_size=5), st.integers(-10, 10), st.integers(-10, 10))
def test_translate_composes(word, s, t):
    P = periodic_pattern(word)
    a = pattern_translate(pattern_translate(P, (s,)), (t,))
    b = pattern_translate(P, (s + t,))
    assert extract_box(a, Box((-8,), (8,))) == extract_box(b, Box((-8,), (8,)))


def test_fractional_translation_changes_phase():
    P = constant_pattern("a")
    Q = pattern_translate(P, (Fraction(1, 2),))
    assert Q.phase == (Fraction(1, 2),)
    assert not pattern_equal(P, Q).value


def test_extract_patch_anchor():
    P = periodic_pattern("abc")
    p = extract_patch(P, (4,), 1)
    assert p.values == ("a", "b", "c") and p.anchor == (4,)


def test_halfspace_pattern():
    H = halfspace_pattern_1d([(None, 0, "a", 0), (0, None, "bc", 0)])
    assert [value_at(H, (x,)) for x in range(-3, 4)] == list("aaabcbc")
    assert pattern_equal(H, H).certified
    assert not pattern_equal(H, constant_pattern("a")).value
