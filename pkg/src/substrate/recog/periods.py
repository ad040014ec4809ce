"""Period certificates, period groups and aperiodicity certificates."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from types import SimpleNamespace

import numpy as np

from ..errors import ValidationError
from ..lattice import Certificate, PeriodGroup, check_invariance, hnf
from ..patches import Alphabet, Box
from ..patterns import (
    LatticePattern,
    PeriodicSource,
    SubstitutiveSource,
    eventually_periodic_form,
    fixed_decomposition,
    value_at,
)
from ..rules import is_primitive, pf_eigenvalue_is_integer

APPEARANCE_CAP_1D = 4096
APPEARANCE_CAP_2D = 96
WITNESS_SEARCH_1D = 8192
WITNESS_SEARCH_2D = 64


@dataclass(frozen=True)
class PeriodCertificate:
    """Outcome of testing whether u is a period: value True/False or None (unknown)."""

    vector: tuple
    value: bool | None
    method: str
    radius: int | None = None
    witness: tuple | None = None

    @property
    def certified(self) -> bool:
        return self.value is not None

    def to_json(self):
        out = {"vector": [str(v) for v in self.vector], "method": self.method}
        out["result"] = "unknown" if self.value is None else ("period" if self.value else "not_period")
        if self.radius is not None:
            out["appearance_radius"] = self.radius
        if self.witness is not None:
            out["witness_cell"] = list(self.witness)
        return out


class _Values:
    """Memoised cell values of a pattern."""

    def __init__(self, P: LatticePattern):
        self.P = P
        self.cache: dict = {}

    def __call__(self, x):
        v = self.cache.get(x)
        if v is None:
            v = value_at(self.P, x)
            self.cache[x] = v
        return v

    def patch(self, centre, r):
        return tuple(self(tuple(c + o for c, o in zip(centre, off))) for off in Box.radius(r, len(centre)).cells())


def _ring(x, N):
    """Cells at max-norm distance exactly N from x."""
    d = len(x)
    if N == 0:
        yield tuple(x)
        return
    for off in Box.radius(N, d).cells():
        if max(abs(v) for v in off) == N:
            yield tuple(a + b for a, b in zip(x, off))


def _own_language(P: LatticePattern, r: int) -> set | None:
    """Exact set of radius-r patches of P, or None when it cannot be computed."""
    from ..subst import pattern_language_codes

    alpha = P.alphabet
    if alpha is None and isinstance(P.source, PeriodicSource):
        # a bare periodic pattern only ever shows the letters of its block
        alpha = Alphabet(tuple(dict.fromkeys(P.source.block.values)))
    if alpha is None:
        return None
    try:
        codes, _ = pattern_language_codes(P, (2 * r + 1,) * P.dim, SimpleNamespace(alphabet=alpha))
    except ValidationError:
        return None
    return {tuple(alpha.decode(c)) for c in codes}


def certify_period(P: LatticePattern, u, x=None, cap: int | None = None) -> PeriodCertificate:
    """Decide whether u is a period of P.

    True is certified by the close-repeat argument: if every radius-|u| patch
    of P occurs centred in x + Box(N) and P agrees with P + u on x + Box(N),
    then u is a period.  False is certified by a witness cell (or because u
    is not an integer vector).  Otherwise the answer is unknown."""
    d = P.dim
    u = tuple(Fraction(v) for v in u)
    if len(u) != d:
        raise ValidationError("period vector has the wrong dimension")
    if all(v == 0 for v in u):
        raise ValidationError("the zero vector is always a period")
    if any(v.denominator != 1 for v in u):
        return PeriodCertificate(u, False, "fractional_translation")
    ui = tuple(int(v) for v in u)
    x = tuple(x) if x is not None else (0,) * d
    cap = cap if cap is not None else (APPEARANCE_CAP_1D if d == 1 else APPEARANCE_CAP_2D)
    val = _Values(P)
    rho = max(abs(v) for v in ui)
    lang = _own_language(P, rho)
    seen = set()
    for N in range(cap + 1):
        for c in _ring(x, N):
            if val(c) != val(tuple(a + b for a, b in zip(c, ui))):
                return PeriodCertificate(u, False, "witness_cell", N, c)
            if lang is not None:
                seen.add(val.patch(c, rho))
        if lang is not None and seen >= lang:
            return PeriodCertificate(u, True, "close_repeat", N)
    # no certificate of periodicity; keep looking for a witness a little further
    limit = WITNESS_SEARCH_1D if d == 1 else WITNESS_SEARCH_2D
    for N in range(cap + 1, max(cap + 1, limit) + 1):
        for c in _ring(x, N):
            if val(c) != val(tuple(a + b for a, b in zip(c, ui))):
                return PeriodCertificate(u, False, "witness_cell", N, c)
    return PeriodCertificate(u, None, "appearance_radius_cap_exceeded", cap)


# -- aperiodicity certificates ---------------------------------------------------------

_aperiodic_cache: dict = {}
_aperiodic_lock = threading.Lock()
APERIODICITY_RECOGNISABILITY_CAP = 16


def _rule_recognisable(rule) -> int | None:
    from .cutting import recognisability_radius

    key = ("recog", id(rule))
    with _aperiodic_lock:
        if key in _aperiodic_cache:
            return _aperiodic_cache[key][0]
    rep = recognisability_radius(rule, cap=APERIODICITY_RECOGNISABILITY_CAP)
    with _aperiodic_lock:
        _aperiodic_cache[key] = (rep.radius, rule)
    return rep.radius


def _constant_run_letter(rule):
    """Letters a with sigma^m(a) = a...a (at least two cells) for some m <= |A|."""
    out = []
    for a in rule.alphabet:
        for m in range(1, len(rule.alphabet) + 1):
            img = rule.power(m).images[a]
            img = np.asarray(img).ravel() if rule.dim > 1 else img
            if len(img) >= 2 and all(b == a for b in img):
                out.append(a)
                break
    return out


def cheap_aperiodicity(F: LatticePattern, probe: int = 64) -> Certificate | None:
    """A certificate that the substitutive pattern F has no nonzero period, or None."""
    src = F.source
    if not isinstance(src, SubstitutiveSource):
        return None
    rule = src.rule.base
    primitive = is_primitive(rule)
    if primitive and not rule.is_block and pf_eigenvalue_is_integer(rule) is False:
        return Certificate("certified", "irrational_letter_frequencies", True,
                           notes=("primitive rule with non-integer Perron-Frobenius eigenvalue",))
    if primitive:
        r = _rule_recognisable(rule)
        if r is not None:
            return Certificate("certified", "primitive_recognisable", True, bound=r,
                               notes=(f"unique centre cuttings from radius {r}; a periodic point would have "
                                      "a periodic predecessor of strictly smaller period",))
    if F.dim == 1:
        runs = _constant_run_letter(rule)
        if runs:
            window = [value_at(F, (x,)) for x in range(-probe, probe + 1)]
            present = [a for a in runs if a in window]
            if present and len(set(window)) > 1:
                return Certificate("certified", "unbounded_constant_runs", True,
                                   notes=(f"sigma^m({present[0]}) is constant and {present[0]} occurs, so runs are unbounded; "
                                          "the pattern is not constant",))
    return None


# -- period groups --------------------------------------------------------------

def _periodic_group(P: LatticePattern) -> PeriodGroup:
    src = P.source
    d = P.dim
    lat = src.lattice
    box = Box((0,) * d, tuple(lat[i][i] - 1 for i in range(d)))
    gens = [tuple(b) for b in lat]
    for g in box.cells():
        if all(v == 0 for v in g):
            continue
        if all(value_at(P, z) == value_at(P, tuple(a + b for a, b in zip(z, g))) for z in box.cells()):
            gens.append(g)
    cert = Certificate("certified", "fundamental_domain", True, notes=("every coset of the source lattice tested exactly",))
    return PeriodGroup(d, (), tuple(hnf(gens, d)), cert)


def _candidate_vectors(d: int, bound: int):
    vecs = [v for v in Box.radius(bound, d).cells() if any(v)]
    # one of each +/- pair, shortest first
    vecs = [v for v in vecs if v > tuple(0 for _ in v)]
    vecs.sort(key=lambda v: (max(abs(a) for a in v), v))
    return vecs


def compute_periods(P: LatticePattern, norm_bound: int | None = None) -> PeriodGroup:
    """The period group of P with a certificate describing how it was obtained."""
    d = P.dim
    src = P.source
    if isinstance(src, PeriodicSource):
        return _periodic_group(P)
    if d == 1:
        ep = eventually_periodic_form(P)
        if ep is not None:
            if ep.is_periodic:
                q = len(ep.left)
                cert = Certificate("certified", "eventually_periodic_normal_form", True, notes=(f"primitive period {q}",))
                return PeriodGroup(1, (), ((q,),), cert)
            cert = Certificate("certified", "eventually_periodic_normal_form", True,
                               notes=("tails differ from a single periodic word, so no translate can match",))
            return PeriodGroup.trivial(1, cert)
    if isinstance(src, SubstitutiveSource):
        F, _ = fixed_decomposition(P)
        cert = cheap_aperiodicity(F)
        if cert is not None:
            bound = norm_bound if norm_bound is not None else 0
            for g in _candidate_vectors(d, bound):
                res = certify_period(P, g)
                if res.value is not False:
                    raise ValidationError(f"aperiodicity certificate contradicted at {g}: {res}")
            return PeriodGroup.trivial(d, Certificate("certified", cert.method, True, bound=cert.bound, notes=cert.notes))
    bound = norm_bound if norm_bound is not None else (32 if d == 1 else 6)
    found, unknown = [], []
    for g in _candidate_vectors(d, bound):
        if found and PeriodGroup(d, (), tuple(hnf(found, d))).contains(g):
            continue
        res = certify_period(P, g)
        if res.value:
            found.append(g)
        elif res.value is None:
            unknown.append(g)
    notes = [f"candidate periods searched up to max-norm {bound}"]
    if unknown:
        notes.append("undecided: " + ", ".join(str(list(g)) for g in unknown[:8]))
    cert = Certificate("partial", "close_repeat_search", False, bound=bound, notes=tuple(notes))
    K = PeriodGroup(d, (), tuple(hnf(found, d)) if found else (), cert)
    return K


def fixed_point_consistency(K: PeriodGroup, L) -> bool:
    """For a sigma^n-fixed pattern with period group K: L K must lie in K."""
    return check_invariance(K, L)


__all__ = [
    "PeriodCertificate",
    "certify_period",
    "cheap_aperiodicity",
    "compute_periods",
    "fixed_point_consistency",
]
