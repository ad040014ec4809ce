"""Unique composition modulo the period group: a checkable form.

Every two pre-images U, V of P under sigma^n must satisfy U = V + L^-n g for
some g in K_P.  Writing each element as U0 + t_U for the first element U0,
the vectors L^n t_U land in K_P, and their classes modulo L^n K_P should be
in bijection with the cosets of L^n K_P in K_P.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from ..errors import UCViolation, UnsupportedSource
from ..lattice import PeriodGroup, coset_representatives, index_of_inflated, inflate_periods
from ..patches import Box
from ..patterns import LatticePattern, fmt_fraction, pattern_equal, pattern_translate
from ..rules import SubstitutionRule
from ..subst import ADMITTED, DEFAULT_SATURATION_DEPTH
from .fibre import Fibre, enumerate_fibre
from .periods import compute_periods

SHIFT_SEARCH_1D = 64
SHIFT_SEARCH_2D = 6
PAIRWISE_PATTERN_CHECKS = 64


@dataclass
class UCReport:
    rule: str
    pattern: str
    power: int
    fibre: Fibre
    periods: PeriodGroup
    index: int
    translations: list  # t_U with U = U0 + t_U, as rational vectors
    cosets: list  # index into coset representatives, per element
    representatives: list
    pairs_checked: int

    @property
    def bijection(self) -> bool:
        return len(set(self.cosets)) == len(self.cosets) == len(self.representatives)

    def to_json(self):
        vec = lambda v: [fmt_fraction(x) for x in v]  # noqa: E731
        return {
            "rule": self.rule,
            "pattern": self.pattern,
            "power": self.power,
            "count": self.fibre.count,
            "index": self.index,
            "periods": self.periods.to_json(),
            "uc_holds": True,
            "pairs_checked": self.pairs_checked,
            "bijection_with_cosets": self.bijection,
            "coset_representatives": [vec(r) for r in self.representatives],
            "elements": [
                {"phase": vec(Q.phase), "translation": vec(t), "coset": c}
                for Q, t, c in zip(self.fibre.elements, self.translations, self.cosets)
            ],
            "fibre_certificate": self.fibre.certificate,
        }


def _expansion(rule: SubstitutionRule, n: int):
    d = rule.dim
    return [[Fraction(rule.k[i] ** n if i == j else 0) for j in range(d)] for i in range(d)]


def _apply(M, v):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))


def _translation(U0: LatticePattern, U: LatticePattern):
    """Some t with U = U0 + t, searched over integer corrections of the phase difference."""
    d = U.dim
    frac = tuple(a - b for a, b in zip(U.phase, U0.phase))
    R = SHIFT_SEARCH_1D if d == 1 else SHIFT_SEARCH_2D
    offsets = sorted(Box.radius(R, d).cells(), key=lambda v: (max(abs(a) for a in v), v))
    base = tuple(b - a for a, b in zip(U0.shift, U.shift))
    for k in offsets:
        t = tuple(f + b + z for f, b, z in zip(frac, base, k))
        if pattern_equal(U, pattern_translate(U0, t)).value:
            return t
    return None


def uc_verify(rule: SubstitutionRule, P: LatticePattern, n: int = 1, mode=ADMITTED,
              cap: int = DEFAULT_SATURATION_DEPTH, fibre: Fibre | None = None,
              periods: PeriodGroup | None = None) -> UCReport:
    """Check U = V + L^-n g (g in K_P) for every pair of the fibre of P under sigma^n."""
    if not rule.is_block:
        raise UnsupportedSource("UC verification needs a constant-length or block rule")
    fib = fibre if fibre is not None else enumerate_fibre(rule, P, n, mode=mode, cap=cap)
    K = periods if periods is not None else compute_periods(P)
    Ln = _expansion(rule, n)
    reps = coset_representatives(K, Ln, 1)
    LnK = inflate_periods(K, Ln)
    elements = fib.elements
    U0 = elements[0]
    translations = []
    for U in elements:
        t = _translation(U0, U)
        if t is None:
            raise UCViolation(f"fibre element {U!r} is not a translate of {U0!r}")
        translations.append(t)
    cosets = []
    for U, t in zip(elements, translations):
        g = _apply(Ln, t)
        if not K.contains(g):
            raise UCViolation(f"L^{n} t = {[fmt_fraction(x) for x in g]} is not a period of the anchor")
        hit = [i for i, r in enumerate(reps) if LnK.contains(tuple(a - b for a, b in zip(g, r)))]
        if len(hit) != 1:
            raise UCViolation("coset representatives are not a transversal")
        cosets.append(hit[0])
    # pairwise: differences in L^-n K, and U = V + difference on patterns for small fibres
    pairs = 0
    for (i, U), (j, V) in itertools.combinations(enumerate(elements), 2):
        diff = tuple(a - b for a, b in zip(translations[i], translations[j]))
        if not K.contains(_apply(Ln, diff)):
            raise UCViolation(f"elements {i} and {j} differ by a vector outside L^-{n} K")
        if len(elements) <= PAIRWISE_PATTERN_CHECKS and not pattern_equal(U, pattern_translate(V, diff)).value:
            raise UCViolation(f"elements {i} and {j} are not related by their translation difference")
        pairs += 1
    index = index_of_inflated(K, Ln, 1)
    name = P.name or "pattern"
    return UCReport(rule.name, name, n, fib, K, index, translations, cosets, reps, pairs)


__all__ = ["UCReport", "uc_verify"]
