"""Substitution engine against the brute-force expansions in ``oracles``."""
import itertools
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from substrate import oracles
from substrate.patches import Box, Patch
from substrate.patterns import value_at
from substrate.rules import (Corner, builtin_rule, is_primitive, load_rule, substitute_patch,
                             substitution_matrix)
from substrate.subst import (ADMITTED, Language, complexity, fixed_points, legal_patches,
                             substitute_pattern, substitution_offsets)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

WORD_RULES = ("thue_morse", "fibonacci", "doubling", "mask5")


def _images(rule):
    return {a: rule.images[a] for a in rule.alphabet}


def _reference_1d(rule, fp, depth):
    """Cells -R..R of the fixed point grown from its seed (seed letter / corner at the origin)."""
    images = _images(rule)
    n = fp.power
    if isinstance(fp.seed, Corner):
        left, right = fp.seed.letters
        lw = oracles.expand_word(images, (left,), n * depth)
        rw = oracles.expand_word(images, (right,), n * depth)
        return {x: (lw[len(lw) + x] if x < 0 else rw[x]) for x in range(-len(lw), len(rw))}
    (j,) = fp.seed.offset
    K = len(oracles.expand_word(images, (fp.seed.letter,), n))
    word = oracles.expand_word(images, (fp.seed.letter,), n * depth)
    origin = j * (K ** depth - 1) // (K - 1)
    return {i - origin: a for i, a in enumerate(word)}


@pytest.mark.parametrize("name", WORD_RULES)
def test_fixed_points_match_expansion_1d(name):
    rule = builtin_rule(name)
    fps = fixed_points(rule, 2)
    assert fps
    for fp in fps:
        ref = _reference_1d(rule, fp, 6 if name != "mask5" else 3)
        (s,) = fp.pattern.shift
        for x in range(-50, 51):
            if x - s in ref:
                assert value_at(fp.pattern, (x,)) == ref[x - s]


def test_chair_fixed_points_match_expansion(chair):
    images = _images(chair)
    for fp in fixed_points(chair, 2):
        depth = 6 // fp.power
        if isinstance(fp.seed, Corner):
            a, b, c, d = fp.seed.letters  # row-major on cells -1..0, axis 0 outer
            grid = oracles.expand_block(images, [[a, b], [c, d]], fp.power * depth)
            origin = (len(grid) // 2,) * 2
        else:
            grid = oracles.expand_block(images, [[fp.seed.letter]], fp.power * depth)
            K = 2 ** fp.power
            origin = tuple(j * (K ** depth - 1) // (K - 1) for j in fp.seed.offset)
        s0, s1 = fp.pattern.shift
        for x, y in itertools.product(range(-50, 51), repeat=2):
            i, j = x - s0 + origin[0], y - s1 + origin[1]
            if (x * 3 + y) % 5 == 0 and 0 <= i < len(grid) and 0 <= j < len(grid):
                assert value_at(fp.pattern, (x, y)) == grid[i][j]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(("thue_morse", "doubling", "mask5")), st.integers(0, 3), st.integers(-50, 50))
def test_substitute_pattern_shifts_windows(name, i, x):
    # sigma(F) = F for a sigma-fixed point F
    rule = builtin_rule(name)
    fps = [fp for fp in fixed_points(rule, 2) if fp.power == 1] or fixed_points(rule, 2)
    fp = fps[i % len(fps)]
    G = substitute_pattern(rule, fp.pattern, fp.power)
    assert value_at(G, (x,)) == value_at(fp.pattern, (x,))


@pytest.mark.parametrize("K, phase, image_phase, m", [
    (2, 0, 0.5, -1), (2, 0.5, 0.5, 0), (5, 0, 0, -2), (5, 0.4, 0, 0), (25, 0, 0, -12),
])
def test_substitution_offsets(K, phase, image_phase, m):
    from fractions import Fraction

    p, mm = substitution_offsets(K, Fraction(phase).limit_denominator(100))
    assert p == Fraction(image_phase).limit_denominator(100)
    assert mm == m


def test_substitute_patch_matches_oracle(chair):
    box = Box((0, 0), (1, 1))
    p = Patch(box, ("NE", "NW", "SE", "SW"))
    q = substitute_patch(chair, p)
    ref = oracles.expand_block(_images(chair), [["NE", "NW"], ["SE", "SW"]], 1)
    for (x, y), v in q.items():
        assert v == ref[x - q.box.lo[0]][y - q.box.lo[1]]


@pytest.mark.parametrize("name, expected", [
    ("thue_morse", [2, 4, 6, 10, 12, 16, 20, 22, 24]),
    ("fibonacci", [2, 3, 4, 5, 6, 7, 8, 9, 10]),
])
def test_complexity_known_values(name, expected):
    rule = builtin_rule(name)
    assert [complexity(rule, n) for n in range(1, 10)] == expected


@pytest.mark.parametrize("name", WORD_RULES)
@pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
def test_admitted_language_matches_oracle(name, n):
    rule = builtin_rule(name)
    got = {tuple(p.values) for p in legal_patches(rule, (n,), ADMITTED).patches}
    assert got == oracles.legal_words(_images(rule), n, depth=10)


def test_language_is_factor_closed(mask5):
    lang = Language.of(mask5)
    w5 = {tuple(w) for w in lang.words((5,))}
    w4 = {tuple(w) for w in lang.words((4,))}
    assert {w[:4] for w in w5} | {w[1:] for w in w5} <= w4


def test_primitivity_and_matrix(tm):
    m = substitution_matrix(tm)
    assert m.counts == [[1, 1], [1, 1]] or [list(r) for r in m.counts] == [[1, 1], [1, 1]]
    assert is_primitive(tm)
    assert not is_primitive(builtin_rule("half_and_half"))


def test_rule_files_load_like_builtins():
    for fname, name in [("thue_morse.toml", "thue_morse"), ("chair_block.toml", "chair"), ("mask5.toml", "mask5")]:
        a, b = load_rule(str(CONFIGS / fname)), builtin_rule(name)
        assert _images(a) == _images(b)


def test_mask5_fixed_point_around_origin():
    # sigma(S1) = S2 A S1 B S2 with the fixed S1 at cell 0: B sits at +1, S2 at +2
    from substrate.corpus import named_patterns

    P = named_patterns("mask5")["P_star"]
    assert [value_at(P, (x,)) for x in range(-2, 3)] == ["S2", "A", "S1", "B", "S2"]
