"""The least power of sigma that fixes every LI class.

An LI class is tracked through its configuration: the finite set of legal
patches of one box size that occur in its patterns.  Substitution induces a
map on configurations (the windows of the substitutes of the patches), so
the classes reachable from a set of seed patterns fall into eventually
periodic orbits, and the answer is the lcm of the cycle lengths.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lcm

import numpy as np

from ..errors import ConfigRadiusUnstable, UnsupportedSource, ValidationError
from ..patterns import HalfSpaceSource, LatticePattern, constant_pattern, eventually_periodic_form, periodic_pattern
from ..rules import SubstitutionRule, is_primitive
from ..subst import (
    ADMITTED,
    DEFAULT_SATURATION_DEPTH,
    Language,
    _substitute,
    _windows,
    fixed_points,
    mode_name,
    pattern_language_codes,
)
from .periods import _constant_run_letter

MAX_ORBIT = 256


@dataclass
class ConfigClass:
    seeds: list
    preperiod: int
    cycle: int
    sizes: list  # number of patches in each configuration along the orbit

    def to_json(self):
        return {"seeds": self.seeds, "preperiod": self.preperiod, "cycle_length": self.cycle, "configuration_sizes": self.sizes}


@dataclass
class LIPowerReport:
    rule: str
    mode: str
    power: int
    config_radius: int
    classes: list
    checked: dict  # config radius -> power found there
    method: str = "configuration_orbits"

    def to_json(self):
        return {
            "rule": self.rule,
            "mode": self.mode,
            "li_fixing_power": self.power,
            "config_radius": self.config_radius,
            "method": self.method,
            "stability_check": {str(k): v for k, v in sorted(self.checked.items())},
            "classes": [c.to_json() for c in self.classes],
        }


def _tail_limits(P: LatticePattern, alphabet) -> list:
    """Periodic patterns seen far out along a half-space pattern."""
    out = []
    ep = eventually_periodic_form(P) if P.dim == 1 else None
    if ep is not None and not ep.is_periodic:
        out.append(periodic_pattern(ep.left, alphabet=alphabet, name=f"{P.name or 'pattern'}:left_tail"))
        out.append(periodic_pattern(ep.right, alphabet=alphabet, name=f"{P.name or 'pattern'}:right_tail"))
    elif isinstance(P.source, HalfSpaceSource):
        for i, (_, fill) in enumerate(P.source.pieces):
            out.append(LatticePattern(fill, (0,) * P.dim, (0,) * P.dim, alphabet, f"{P.name or 'pattern'}:piece{i}"))
    return out


def _seeds(rule: SubstitutionRule, mode, size, cap) -> list:
    """(name, pattern) pairs whose LI classes are tracked."""
    d = rule.dim
    lang = Language.of(rule, mode, cap)
    legal = lang.codes(size)
    seeds = []
    for fp in fixed_points(rule, 2, mode):
        seeds.append((f"fixed:{fp.power}:{fp.seed.to_json()}", fp.pattern))
    # constant patterns a...a with sigma^m(a) constant: fixed by sigma^m, so in the space
    cells = int(np.prod(size))
    for a in _constant_run_letter(rule):
        if bytes([rule.alphabet.index(a)]) * cells in legal:
            seeds.append((f"constant:{a}", constant_pattern(a, d, alphabet=rule.alphabet)))
    if mode != ADMITTED:
        P = mode.pattern
        seeds.append((f"hull:{P.name or 'pattern'}", P))
        for Q in _tail_limits(P, rule.alphabet):
            seeds.append((f"limit:{Q.name}", Q))
    return seeds


def _configuration(P: LatticePattern, size, rule, cap) -> frozenset:
    codes, _ = pattern_language_codes(P, size, rule, cap)
    return frozenset(codes)


def _sigma0(rule: SubstitutionRule, W: frozenset, size) -> frozenset:
    out = set()
    for u in W:
        out |= _windows(_substitute(rule, u, size), size)
    return frozenset(out)


def _power_at(rule: SubstitutionRule, mode, r: int, cap: int):
    d = rule.dim
    size = (2 * r + 1,) * d
    seen: dict = {}  # configuration -> class index
    classes = []
    for name, P in _seeds(rule, mode, size, cap):
        W = _configuration(P, size, rule, cap)
        if W in seen:
            classes[seen[W]].seeds.append(name)
            continue
        orbit = [W]
        index = {W: 0}
        while True:
            W = _sigma0(rule, W, size)
            if W in index:
                break
            if len(orbit) >= MAX_ORBIT:
                raise ValidationError("configuration orbit did not close")
            index[W] = len(orbit)
            orbit.append(W)
        start = index[W]
        cls = ConfigClass([name], start, len(orbit) - start, [len(x) for x in orbit])
        for V in orbit:
            seen.setdefault(V, len(classes))
        classes.append(cls)
    n = 1
    for c in classes:
        n = lcm(n, c.cycle)
    return n, classes


def li_fixing_power(rule: SubstitutionRule, config_radius: int = 1, mode=ADMITTED,
                    cap: int = DEFAULT_SATURATION_DEPTH) -> LIPowerReport:
    """Least n such that sigma^n fixes every reachable configuration class,
    confirmed at config_radius + 1."""
    if config_radius < 1:
        raise ValidationError("config_radius must be >= 1")
    if not rule.is_block:
        if mode == ADMITTED and is_primitive(rule):
            return LIPowerReport(rule.name, mode_name(mode), 1, config_radius, [], {}, "primitive_single_class")
        raise UnsupportedSource("configuration tracking needs a constant-length or block rule")
    n, classes = _power_at(rule, mode, config_radius, cap)
    n2, _ = _power_at(rule, mode, config_radius + 1, cap)
    if n != n2:
        raise ConfigRadiusUnstable(f"power {n} at radius {config_radius} but {n2} at radius {config_radius + 1}")
    return LIPowerReport(rule.name, mode_name(mode), n, config_radius, classes, {config_radius: n, config_radius + 1: n2})


__all__ = ["LIPowerReport", "li_fixing_power"]
