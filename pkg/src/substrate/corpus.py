"""Named patterns of the built-in corpus."""
from __future__ import annotations

from fractions import Fraction

from .errors import ValidationError
from .patterns import (
    LatticePattern,
    constant_pattern,
    fixed_point_pattern,
    halfspace_pattern_1d,
)
from .rules import Corner, Interior, builtin_rule
from .subst import ADMITTED, HullOfPattern, fixed_points, substitute_pattern

HALF = (Fraction(1, 2),)


def mask5_patterns() -> dict:
    rule = builtin_rule("mask5")
    P_A = constant_pattern("A", alphabet=rule.alphabet, name="P_A")
    P_B = substitute_pattern(rule, P_A).with_name("P_B")
    P_star = fixed_point_pattern(rule, 1, Interior("S1", (2,)), name="P_star")
    return {"P_A": P_A, "P_B": P_B, "P_star": P_star}


def half_and_half_patterns() -> dict:
    rule = builtin_rule("half_and_half")
    # cells n >= 0 black, n < 0 white; cell boundaries on the integers (phase 1/2)
    T = halfspace_pattern_1d([(None, 0, "w", 0), (0, None, "b", 0)], phase=HALF, alphabet=rule.alphabet, name="T")
    half = T.phase
    all_w = constant_pattern("w", phase=half, alphabet=rule.alphabet, name="all_w")
    all_b = constant_pattern("b", phase=half, alphabet=rule.alphabet, name="all_b")
    return {"T": T, "all_w": all_w, "all_b": all_b}


def thue_morse_patterns() -> dict:
    rule = builtin_rule("thue_morse")
    out = {}
    for l in "ab":
        for r in "ab":
            out[f"tm_{l}{r}"] = fixed_point_pattern(rule, 2, Corner((l, r)), name=f"tm_{l}{r}")
    out["fixed"] = out["tm_aa"]
    return out


def fibonacci_patterns() -> dict:
    rule = builtin_rule("fibonacci")
    return {
        "fib_aa": fixed_point_pattern(rule, 2, Corner(("a", "a")), name="fib_aa"),
        "fib_ba": fixed_point_pattern(rule, 2, Corner(("b", "a")), name="fib_ba"),
    }


def doubling_patterns() -> dict:
    rule = builtin_rule("doubling")
    return {"all_w": constant_pattern("w", alphabet=rule.alphabet, name="all_w")}


def chair_patterns() -> dict:
    rule = builtin_rule("chair")
    out = {}
    # first corner seed fixed under sigma^2 that is legal in the language
    for fp in fixed_points(rule, 2):
        if isinstance(fp.seed, Corner):
            out.setdefault("chair_fixed", fp.pattern.with_name("chair_fixed"))
    return out


_PATTERNS = {
    "mask5": mask5_patterns,
    "half_and_half": half_and_half_patterns,
    "thue_morse": thue_morse_patterns,
    "fibonacci": fibonacci_patterns,
    "doubling": doubling_patterns,
    "chair": chair_patterns,
}

_cache: dict = {}


def named_patterns(rule_name: str) -> dict:
    if rule_name not in _PATTERNS:
        return {}
    if rule_name not in _cache:
        _cache[rule_name] = _PATTERNS[rule_name]()
    return _cache[rule_name]


def named_pattern(rule_name: str, name: str) -> LatticePattern:
    pats = named_patterns(rule_name)
    if name not in pats:
        raise ValidationError(f"unknown pattern {name!r} for rule {rule_name!r}; known: {sorted(pats)}")
    return pats[name]


def default_mode(rule_name: str):
    """The pattern space each built-in rule is studied in."""
    if rule_name == "half_and_half":
        return HullOfPattern(named_pattern("half_and_half", "T"))
    return ADMITTED
