import itertools

import pytest
from hypothesis import given, settings, strategies as st

from substrate.errors import AlphabetMismatch, PatchOutsideDeclaredLanguage, ValidationError
from substrate.ldmap import (LanguageDomain, LocalRule, apply, compose, distort, find_inverse_rule,
                             identity_rule, inflate, inflate_pattern, relabel_rule, subdivision_as_ld)
from substrate.patches import Alphabet
from substrate.patterns import extract_box, pattern_translate, periodic_pattern, value_at
from substrate.patches import Box
from substrate.subst import fixed_points, substitute_pattern

AB = Alphabet(("a", "b"))


def _full_rule(outputs, radius=1):
    """Radius-r rule on all of {a, b}^(2r+1) with the given output bits."""
    keys = [bytes(k) for k in itertools.product(range(2), repeat=2 * radius + 1)]
    return LocalRule(radius, 1, AB, AB, {k: "ab"[b] for k, b in zip(keys, outputs)})


rules = st.lists(st.integers(0, 1), min_size=8, max_size=8).map(_full_rule)
words = st.text(alphabet="ab", min_size=1, max_size=7)


@settings(max_examples=60, deadline=None)
@given(rules, words, st.integers(-20, 20), st.integers(-5, 5))
def test_apply_commutes_with_shifts(f, word, x, t):
    P = periodic_pattern(word, alphabet=AB)
    a = apply(f, pattern_translate(P, (t,)))
    b = pattern_translate(apply(f, P), (t,))
    assert value_at(a, (x,)) == value_at(b, (x,))
    assert value_at(apply(f, P), (x,)) == f.evaluate(P, (x,))


@settings(max_examples=40, deadline=None)
@given(rules, rules, rules, words, st.integers(-15, 15))
def test_compose_is_associative_and_matches_application(f, g, h, word, x):
    P = periodic_pattern(word, alphabet=AB)
    left = compose(compose(f, g), h)
    right = compose(f, compose(g, h))
    assert left.radius == right.radius == 3
    assert left.table == right.table
    assert value_at(apply(left, P), (x,)) == value_at(apply(h, apply(g, apply(f, P))), (x,))


def test_compose_on_language_domain(tm):
    dom = LanguageDomain(tm)
    swap = relabel_rule({"a": "b", "b": "a"}, tm.alphabet, tm.alphabet, domain=dom)
    twice = compose(swap, relabel_rule({"a": "b", "b": "a"}, tm.alphabet, tm.alphabet))
    assert all(twice.table[k] == tm.alphabet.letters[k[0]] for k in twice.table)
    ident = compose(identity_rule(tm.alphabet, domain=dom), swap)
    assert ident.table == swap.table


def test_compose_alphabet_mismatch(tm):
    f = identity_rule(Alphabet(("x",)))
    with pytest.raises(AlphabetMismatch):
        compose(f, identity_rule(tm.alphabet))


def test_lookup_outside_domain(tm):
    dom = LanguageDomain(tm)
    f = LocalRule.from_function(lambda p: p.values[1], 1, dom, tm.alphabet)
    with pytest.raises(PatchOutsideDeclaredLanguage):
        f.lookup_codes(tm.alphabet.encode("aaa"))


@settings(max_examples=30, deadline=None)
@given(rules, words, st.integers(2, 3), st.integers(-30, 30))
def test_distortion_commutes_with_inflation(f, word, k, x):
    # f_L(L P) = L f(P), and the distorted radius is |k| times the original
    P = periodic_pattern(word, alphabet=AB)
    fL = distort(f, k)
    assert fL.radius == k * f.radius
    lhs = apply(fL, inflate_pattern(P, (k,)))
    rhs = inflate_pattern(apply(f, P), (k,))
    assert value_at(lhs, (x,)) == value_at(rhs, (x,))


def test_distort_rejects_shears():
    with pytest.raises(ValidationError):
        distort(identity_rule(AB, dim=2), [[2, 1], [0, 2]])
    assert distort(identity_rule(AB), 1).radius == 0


@pytest.mark.parametrize("name", ["thue_morse", "mask5", "chair"])
def test_subdivision_recovers_substitution(name):
    from substrate.rules import builtin_rule

    rule = builtin_rule(name)
    S = subdivision_as_ld(rule, 1)
    assert S.surjectivity.holds
    fp = fixed_points(rule, 2)[0]
    lhs = apply(S, inflate(rule, fp.pattern, 1))
    rhs = substitute_pattern(rule, fp.pattern, 1)
    box = Box.radius(6, rule.dim)
    assert extract_box(lhs, box) == extract_box(rhs, box)


def test_inverse_is_a_left_inverse(tm):
    S = subdivision_as_ld(tm, 1)
    res = find_inverse_rule(S, radius_cap=4)
    assert res.found and res.radius == 2
    for fp in fixed_points(tm, 2):
        L = inflate(tm, fp.pattern, 1)
        back = apply(res.rule, apply(S, L))
        box = Box.radius(20, 1)
        assert extract_box(back, box) == extract_box(L, box)


def test_mask5_has_no_inverse(mask5):
    res = find_inverse_rule(subdivision_as_ld(mask5, 1), radius_cap=3)
    assert not res.found
    assert res.witness["periodic"]["fibre_count"] >= 2
