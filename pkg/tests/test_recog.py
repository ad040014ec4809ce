import pytest
from hypothesis import given, settings, strategies as st

from substrate.corpus import named_patterns
from substrate.errors import IllegalPatch, UnsupportedSource
from substrate.lattice import index_of_inflated
from substrate.oracles import frozen_values
from substrate.patches import Box, Patch
from substrate.patterns import constant_pattern, pattern_equal, periodic_pattern, value_at
from substrate.recog import (certify_period, compute_periods, cuttings_of_patch, enumerate_fibre,
                             li_fixing_power, recognisability_radius, uc_verify, verify_witness)
from substrate.rules import builtin_rule
from substrate.subst import fixed_points, substitute_pattern

FROZEN = frozen_values()


@pytest.mark.parametrize("key", sorted(k for k in FROZEN["periodic_fibres"] if k != "method"))
def test_periodic_fibres_match_frozen_oracle(key):
    name, pattern, n = key.split("/")
    rule = builtin_rule(name)
    F = enumerate_fibre(rule, named_patterns(name)[pattern], int(n))
    assert F.count == FROZEN["periodic_fibres"][key]


@pytest.mark.parametrize("name", ["thue_morse", "fibonacci"])
def test_recognisability_matches_frozen_oracle(name):
    rep = recognisability_radius(builtin_rule(name))
    assert rep.found and rep.radius == FROZEN["recognisability_radius"][name]


def test_ambiguity_witness_is_checkable(mask5):
    rep = recognisability_radius(mask5, cap=3)
    assert not rep.found
    assert verify_witness(mask5, rep.witness)


def test_fibre_elements_substitute_to_anchor(mask5):
    P = named_patterns("mask5")["P_A"]
    F = enumerate_fibre(mask5, P, 1)
    for Q in F.elements[:6]:
        assert pattern_equal(substitute_pattern(mask5, Q, 1), P).value


def test_thue_morse_fixed_points_have_singleton_fibres(tm):
    for fp in fixed_points(tm, 2):
        F = enumerate_fibre(tm, fp.pattern, 1)
        assert F.count == 1


def test_empty_fibre(tm):
    assert enumerate_fibre(tm, constant_pattern("a"), 1).count == 0


def test_fibre_needs_block_rule():
    with pytest.raises(UnsupportedSource):
        enumerate_fibre(builtin_rule("fibonacci"), constant_pattern("a"), 1)


@pytest.mark.parametrize("name, pattern, n", [("mask5", "P_A", 2), ("mask5", "P_B", 2), ("half_and_half", "all_b", 1)])
def test_uc_bijection(name, pattern, n):
    rule = builtin_rule(name)
    rep = uc_verify(rule, named_patterns(name)[pattern], n)
    assert rep.index == index_of_inflated(rep.periods, [[rule.k[0]]], n) if rule.dim == 1 else True
    assert rep.fibre.count == rep.index
    assert rep.bijection


def test_li_fixing_power():
    assert li_fixing_power(builtin_rule("mask5")).power == 2
    assert li_fixing_power(builtin_rule("thue_morse")).power == 1


def test_periods_of_examples(tm, mask5):
    assert compute_periods(named_patterns("mask5")["P_B"]).lattice == ((5,),)
    K = compute_periods(fixed_points(tm, 2)[0].pattern)
    assert K.rank == 0 and K.certificate.kind == "certified"


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="ab", min_size=1, max_size=6), st.integers(1, 12))
def test_certify_period_is_sound(word, u):
    P = periodic_pattern(word)
    cert = certify_period(P, (u,))
    truth = all(value_at(P, (x,)) == value_at(P, (x + u,)) for x in range(len(word)))
    assert cert.value == truth


def test_cuttings(tm):
    p = Patch(Box((-2,), (2,)), tuple("abbab"))
    cuts = cuttings_of_patch(tm, p)
    assert len(cuts) == 1
    short = Patch(Box((0,), (0,)), ("a",))
    assert len(cuttings_of_patch(tm, short)) == 2
    with pytest.raises(IllegalPatch):
        cuttings_of_patch(tm, Patch(Box((-1,), (1,)), tuple("aaa")))
