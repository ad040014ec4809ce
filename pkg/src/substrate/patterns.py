"""Patterns on Z^d with rational phases, their sources, and certified equality.

Cell x of a pattern with phase phi is the unit cell centred at x + phi.  An
integer translation only moves the source shift; the fractional part of a
translation is kept in the phase.  Patterns are tilings by unit cells, so two
patterns with different phases are never equal.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd
from typing import Callable, Sequence

from .errors import ValidationError
from .lattice import hnf
from .patches import Alphabet, Box, Patch, shape_box
from .rules import Corner, SubstitutionRule, address, validate_seed


# -- phase arithmetic ------------------------------------------------------------

def split_vector(t) -> tuple[tuple, tuple]:
    """Integer part (floor) and fractional part in [0,1) of a rational vector."""
    ints, fracs = [], []
    for v in t:
        v = Fraction(v)
        k = floor(v)
        ints.append(int(k))
        fracs.append(v - k)
    return tuple(ints), tuple(fracs)


def fmt_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- sources ------------------------------------------------------------------

class Source:
    """Cell values of a pattern placed with shift 0 and phase 0."""

    dim: int

    def value(self, x: tuple):
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": type(self).__name__}


def _reduce_mod_lattice(x, basis):
    """Reduce x into the box prod [0, h_ii) for a lower-echelon full-rank HNF basis."""
    x = list(x)
    for i, b in enumerate(basis):
        q = x[i] // b[i]
        if q:
            x = [xv - q * bv for xv, bv in zip(x, b)]
    return tuple(x)


@dataclass(frozen=True)
class PeriodicSource(Source):
    """A block on prod [0, h_ii) repeated under a full-rank lattice in HNF."""

    lattice: tuple
    block: Patch

    def __post_init__(self):
        lat = hnf(self.lattice)
        d = self.block.dim
        if len(lat) != d or any(len(b) != d for b in lat):
            raise ValidationError("periodic source needs a full-rank lattice")
        for i, b in enumerate(lat):
            if any(b[j] != 0 for j in range(i)):
                raise ValidationError("lattice basis is not in lower echelon form")
        box = Box((0,) * d, tuple(lat[i][i] - 1 for i in range(d)))
        if self.block.box != box:
            raise ValidationError(f"periodic block must cover {box}")
        object.__setattr__(self, "lattice", lat)

    @property
    def dim(self):
        return self.block.dim

    def value(self, x):
        return self.block[_reduce_mod_lattice(x, self.lattice)]

    def describe(self):
        return {"kind": "periodic", "lattice": [list(b) for b in self.lattice], "block": self.block.to_json()}


@dataclass(frozen=True)
class SubstitutiveSource(Source):
    rule: SubstitutionRule
    power: int
    seed: object

    def __post_init__(self):
        validate_seed(self.rule, self.seed, self.power)

    @property
    def dim(self):
        return self.rule.dim

    def value(self, x):
        return address(self.rule, self.seed, self.power, x)

    def describe(self):
        return {"kind": "substitutive", "rule": self.rule.name, "power": self.power, "seed": self.seed.to_json()}


@dataclass(frozen=True)
class HalfSpace:
    """normal . x >= offset"""

    normal: tuple
    offset: int

    def holds(self, x) -> bool:
        return sum(a * b for a, b in zip(self.normal, x)) >= self.offset

    def to_json(self):
        return {"normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class HalfSpaceSource(Source):
    """Regions (conjunctions of half-spaces) each filled by a periodic source."""

    pieces: tuple  # of (tuple[HalfSpace, ...], PeriodicSource)

    @property
    def dim(self):
        return self.pieces[0][1].dim

    def value(self, x):
        hits = [fill for region, fill in self.pieces if all(h.holds(x) for h in region)]
        if len(hits) != 1:
            raise ValidationError(f"half-space regions do not partition Z^d at {x}")
        return hits[0].value(x)

    def describe(self):
        return {
            "kind": "half_spaces",
            "pieces": [{"region": [h.to_json() for h in reg], "filler": fill.describe()} for reg, fill in self.pieces],
        }


@dataclass(frozen=True, eq=False)
class SubstitutedSource(Source):
    """Cells of sigma^n(Q): Q-cell y covers cells K y + i + m, i in [0, K)."""

    rule: SubstitutionRule
    power: int
    pattern: "LatticePattern"
    m: tuple

    @property
    def dim(self):
        return self.rule.dim

    def value(self, x):
        R = self.rule.power(self.power)
        K = R.k
        y = tuple((v - mm) // k for v, mm, k in zip(x, self.m, K))
        i = tuple((v - mm) % k for v, mm, k in zip(x, self.m, K))
        a = value_at(self.pattern, y)
        img = R.table()[R.alphabet.index(a)]
        return R.alphabet.letters[int(img[i])]

    def describe(self):
        return {"kind": "substituted", "rule": self.rule.name, "power": self.power, "of": self.pattern.describe()}


@dataclass(frozen=True, eq=False)
class DerivedSource(Source):
    """Q[x] = f(P[x, c]) for a local rule f."""

    local_rule: object
    pattern: "LatticePattern"

    @property
    def dim(self):
        return self.pattern.dim

    def value(self, x):
        return self.local_rule.evaluate(self.pattern, x)

    def describe(self):
        return {"kind": "derived", "radius": self.local_rule.radius, "of": self.pattern.describe()}


@dataclass(frozen=True, eq=False)
class FunctionSource(Source):
    """Escape hatch for tests and oracles: values from a Python callable."""

    fn: Callable
    dim: int = 1
    label: str = "function"

    def value(self, x):
        return self.fn(x)

    def describe(self):
        return {"kind": "function", "label": self.label}


# -- patterns -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LatticePattern:
    source: Source
    shift: tuple
    phase: tuple
    alphabet: Alphabet | None = None
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        shift = tuple(int(v) for v in self.shift)
        phase = tuple(Fraction(v) for v in self.phase)
        if len(shift) != self.source.dim or len(phase) != self.source.dim:
            raise ValidationError("shift/phase dimension mismatch")
        if any(not 0 <= p < 1 for p in phase):
            raise ValidationError("phase entries must lie in [0, 1)")
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "phase", phase)

    @property
    def dim(self) -> int:
        return self.source.dim

    def describe(self) -> dict:
        out = {
            "source": self.source.describe(),
            "shift": list(self.shift),
            "phase": [fmt_fraction(p) for p in self.phase],
        }
        if self.name:
            out["name"] = self.name
        return out

    def __repr__(self):
        ph = ",".join(fmt_fraction(p) for p in self.phase)
        label = self.name or self.source.describe().get("kind")
        return f"LatticePattern({label}, shift={self.shift}, phase=({ph}))"

    def with_name(self, name: str) -> "LatticePattern":
        return LatticePattern(self.source, self.shift, self.phase, self.alphabet, name)


def value_at(P: LatticePattern, x) -> object:
    return P.source.value(tuple(a - s for a, s in zip(x, P.shift)))


def extract_patch(P: LatticePattern, x, shape) -> Patch:
    box = shape_box(shape, P.dim)
    x = tuple(x)
    values = tuple(value_at(P, tuple(a + u for a, u in zip(x, c))) for c in box.cells())
    return Patch(box, values, x)


def extract_box(P: LatticePattern, box: Box) -> Patch:
    """Absolute-coordinate window of P."""
    return Patch(box, tuple(value_at(P, c) for c in box.cells()))


def pattern_translate(P: LatticePattern, t) -> LatticePattern:
    total = [p + Fraction(v) for p, v in zip(P.phase, t)]
    ints, fracs = split_vector(total)
    shift = tuple(s + k for s, k in zip(P.shift, ints))
    return LatticePattern(P.source, shift, fracs, P.alphabet, P.name)


# -- constructors ---------------------------------------------------------------------

def periodic_pattern(block: Sequence, lattice=None, *, origin=None, phase=None, alphabet=None, name=None) -> LatticePattern:
    """1-D: ``block`` is a word whose first letter sits at cell ``origin`` (default 0);
    d-D: ``block`` is a Patch on prod [0, h_ii) and ``lattice`` an HNF basis."""
    if isinstance(block, Patch):
        src = PeriodicSource(tuple(lattice), block)
        d = block.dim
    else:
        word = tuple(block)
        q = len(word)
        src = PeriodicSource(((q,),), Patch(Box((0,), (q - 1,)), word))
        d = 1
    if origin is None:
        shift = (0,) * d
    else:
        shift = (origin,) if isinstance(origin, int) else tuple(origin)
    return LatticePattern(src, shift, phase or (0,) * d, alphabet, name)


def constant_pattern(letter, d: int = 1, phase=None, alphabet=None, name=None) -> LatticePattern:
    block = Patch(Box((0,) * d, (0,) * d), (letter,))
    lat = tuple(tuple(int(i == j) for i in range(d)) for j in range(d))
    return LatticePattern(PeriodicSource(lat, block), (0,) * d, phase or (0,) * d, alphabet, name)


def fixed_offset(rule: SubstitutionRule, n: int, seed) -> tuple:
    """Translation taking the seed-at-origin configuration to the exactly
    sigma^n-fixed pattern (centred-cell geometry)."""
    if not rule.is_block:
        return (Fraction(0),)
    R = rule.power(n)
    if isinstance(seed, Corner):
        return tuple(Fraction(1, 2) for _ in R.k)
    return tuple(Fraction(1, 2) - Fraction(j, K - 1) for j, K in zip(seed.offset, R.k))


def fixed_point_pattern(rule: SubstitutionRule, n: int, seed, name=None) -> LatticePattern:
    src = SubstitutiveSource(rule, n, seed)
    base = LatticePattern(src, (0,) * rule.dim, (0,) * rule.dim, rule.alphabet, name)
    return pattern_translate(base, fixed_offset(rule, n, seed))


def halfspace_pattern_1d(pieces, phase=None, alphabet=None, name=None) -> LatticePattern:
    """pieces: list of (lo or None, hi or None, word, origin) meaning cells lo <= x < hi
    are filled by word repeated with word[0] at cell ``origin``."""
    out = []
    for lo, hi, word, origin in pieces:
        region = []
        if lo is not None:
            region.append(HalfSpace((1,), lo))
        if hi is not None:
            region.append(HalfSpace((-1,), 1 - hi))
        word = tuple(word)
        q = len(word)
        block = Patch(Box((0,), (q - 1,)), tuple(word[(r - origin) % q] for r in range(q)))
        out.append((tuple(region), PeriodicSource(((q,),), block)))
    return LatticePattern(HalfSpaceSource(tuple(out)), (0,), phase or (0,), alphabet, name)


# -- 1-D eventually periodic normal form ---------------------------------------------------

@dataclass(frozen=True)
class EventuallyPeriodic:
    """Cell values: left tail L(x) for x < start, middle, right tail R(x) for x >= stop.

    Tails are given by blocks indexed by residue: L(x) = left[x mod |left|].
    Canonical once ``normalise`` has been applied."""

    left: tuple
    start: int
    middle: tuple
    right: tuple

    @property
    def stop(self) -> int:
        return self.start + len(self.middle)

    def value(self, x: int):
        if x < self.start:
            return self.left[x % len(self.left)]
        if x < self.stop:
            return self.middle[x - self.start]
        return self.right[x % len(self.right)]

    @property
    def is_periodic(self) -> bool:
        return not self.middle and self.left == self.right and self.start == 0

    def normalise(self) -> "EventuallyPeriodic":
        left = _primitive_residues(self.left)
        right = _primitive_residues(self.right)
        ep = EventuallyPeriodic(left, self.start, self.middle, right)
        if len(left) == len(right) and left == right:
            # both tails agree as periodic functions: periodic iff middle follows it
            if all(ep.value(x) == left[x % len(left)] for x in range(ep.start, ep.stop)):
                return EventuallyPeriodic(left, 0, (), left)
        span = len(left) * len(right) // gcd(len(left), len(right))
        # first failure of the left tail extended to the right
        b = ep.start
        limit = ep.stop + span + 1
        while b < limit and ep.value(b) == left[b % len(left)]:
            b += 1
        # first position from which the right tail holds
        a = ep.stop
        limit = ep.start - span - 1
        while a > limit and ep.value(a - 1) == right[(a - 1) % len(right)]:
            a -= 1
        stop = max(a, b)
        return EventuallyPeriodic(left, b, tuple(ep.value(x) for x in range(b, stop)), right)

    def to_json(self):
        return {
            "left": [str(v) for v in self.left],
            "start": self.start,
            "middle": [str(v) for v in self.middle],
            "right": [str(v) for v in self.right],
        }


def _primitive_residues(block: tuple) -> tuple:
    q = len(block)
    for p in range(1, q + 1):
        if q % p == 0 and all(block[i] == block[i % p] for i in range(q)):
            return block[:p]
    return block


def ep_to_pattern(ep: EventuallyPeriodic, phase=(0,), alphabet=None, name=None) -> LatticePattern:
    ep = ep.normalise()
    if ep.is_periodic:
        block = ep.left
        return LatticePattern(PeriodicSource(((len(block),),), Patch(Box((0,), (len(block) - 1,)), block)), (0,), phase, alphabet, name)
    pieces = [(None, ep.start, ep.left, 0)]
    if ep.middle:
        pieces.append((ep.start, ep.stop, ep.middle, ep.start))
    pieces.append((ep.stop, None, ep.right, 0))
    return halfspace_pattern_1d(pieces, phase, alphabet, name)


def eventually_periodic_form(P: LatticePattern):
    """Exact 1-D eventually periodic description of P's cell values, or None."""
    if P.dim != 1:
        return None
    src = P.source
    (s,) = P.shift
    if isinstance(src, PeriodicSource):
        ((q,),) = src.lattice
        block = tuple(value_at(P, (r,)) for r in range(q))
        return EventuallyPeriodic(block, 0, (), block).normalise()
    if isinstance(src, HalfSpaceSource):
        return _halfspace_ep(P)
    if isinstance(src, SubstitutiveSource):
        from .subst import substitutive_ep_form

        return substitutive_ep_form(P)
    if isinstance(src, SubstitutedSource):
        inner = eventually_periodic_form(src.pattern)
        if inner is None:
            return None
        return _substituted_ep(src, inner, s)
    if isinstance(src, DerivedSource):
        inner = eventually_periodic_form(src.pattern)
        if inner is None:
            return None
        return _shift_ep(_derived_ep(src, inner), s)
    return None


def _derived_ep(src: DerivedSource, inner: EventuallyPeriodic) -> EventuallyPeriodic:
    """A radius-c rule sees only the left tail below start - c and only the right tail from stop + c."""
    c = src.local_rule.radius
    ql, qr = len(inner.left), len(inner.right)
    lo, hi = inner.start - c, inner.stop + c
    f = src.value
    left = tuple(f((lo - ql + (r - (lo - ql)) % ql,)) for r in range(ql))
    right = tuple(f((hi + (r - hi) % qr,)) for r in range(qr))
    middle = tuple(f((x,)) for x in range(lo, hi))
    return EventuallyPeriodic(left, lo, middle, right).normalise()


def _halfspace_ep(P: LatticePattern):
    src = P.source
    (s,) = P.shift
    cuts = set()
    periods = []
    for region, fill in src.pieces:
        for h in region:
            (a,) = h.normal
            if a not in (1, -1):
                return None
            cuts.add(h.offset if a == 1 else 1 - h.offset)
        periods.append(fill.lattice[0][0])
    span = 1
    for q in periods:
        span = span * q // gcd(span, q)
    lo = (min(cuts) if cuts else 0) + s - span
    hi = (max(cuts) if cuts else 0) + s + span
    left = tuple(value_at(P, (x,)) for x in range(lo - span, lo))
    right = tuple(value_at(P, (x,)) for x in range(hi, hi + span))
    left = tuple(left[(r - (lo - span)) % span] for r in range(span))
    right = tuple(right[(r - hi) % span] for r in range(span))
    middle = tuple(value_at(P, (x,)) for x in range(lo, hi))
    return EventuallyPeriodic(left, lo, middle, right).normalise()


def _substituted_ep(src: SubstitutedSource, inner: EventuallyPeriodic, shift: int):
    R = src.rule.power(src.power)
    (K,) = R.k
    (m,) = src.m

    def tail(block):
        q = len(block)
        return tuple(R.images[block[((r - m) // K) % q]][(r - m) % K] for r in range(K * q))

    middle = tuple(b for a in inner.middle for b in R.images[a])
    ep = EventuallyPeriodic(tail(inner.left), K * inner.start + m, middle, tail(inner.right))
    return _shift_ep(ep, shift)


def _shift_ep(ep: EventuallyPeriodic, s: int) -> EventuallyPeriodic:
    """Cell values moved by s: new(x) = old(x - s)."""
    ql, qr = len(ep.left), len(ep.right)
    left = tuple(ep.left[(r - s) % ql] for r in range(ql))
    right = tuple(ep.right[(r - s) % qr] for r in range(qr))
    return EventuallyPeriodic(left, ep.start + s, ep.middle, right).normalise()


# -- equality ------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualityResult:
    value: bool
    certified: bool
    method: str
    window: int | None = None

    def __bool__(self):
        return self.value

    def to_json(self):
        out = {"equal": self.value, "certified": self.certified, "method": self.method}
        if self.window is not None:
            out["window"] = self.window
        return out


DEFAULT_EQUALITY_WINDOW = 64


def pattern_equal(P: LatticePattern, Q: LatticePattern, window: int = DEFAULT_EQUALITY_WINDOW) -> EqualityResult:
    if P.dim != Q.dim:
        return EqualityResult(False, True, "dimension")
    if P.phase != Q.phase:
        return EqualityResult(False, True, "phase")
    sp, sq = P.source, Q.source
    if isinstance(sp, PeriodicSource) and isinstance(sq, PeriodicSource):
        return _periodic_equal(P, Q)
    if P.dim == 1:
        ep = eventually_periodic_form(P)
        eq = eventually_periodic_form(Q)
        if ep is not None and eq is not None:
            return EqualityResult(ep == eq, True, "eventually_periodic_normal_form")
    if isinstance(sp, SubstitutiveSource) and isinstance(sq, SubstitutiveSource):
        res = _substitutive_equal(P, Q)
        if res is not None:
            return res
    mixed = _mixed_periodic_equal(P, Q)
    if mixed is not None:
        return mixed
    return _window_equal(P, Q, window)


def _periodic_equal(P, Q) -> EqualityResult:
    d = P.dim
    n1 = 1
    for i in range(d):
        n1 *= P.source.lattice[i][i]
    n2 = 1
    for i in range(d):
        n2 *= Q.source.lattice[i][i]
    N = n1 * n2 // gcd(n1, n2)
    for x in itertools.product(range(N), repeat=d):
        if value_at(P, x) != value_at(Q, x):
            return EqualityResult(False, True, "periodic_joint_domain")
    return EqualityResult(True, True, "periodic_joint_domain")


def _window_equal(P, Q, window) -> EqualityResult:
    box = Box.radius(window, P.dim)
    for x in box.cells():
        if value_at(P, x) != value_at(Q, x):
            return EqualityResult(False, True, "witness_cell", window)
    return EqualityResult(True, False, "window_agreement", window)


def fixed_decomposition(P: LatticePattern):
    """(F, u) with P = F + u and F exactly sigma^n-fixed, for substitutive sources."""
    src = P.source
    t_f = fixed_offset(src.rule, src.power, src.seed)
    F = pattern_translate(LatticePattern(src, (0,) * P.dim, (0,) * P.dim, P.alphabet), t_f)
    u = tuple(s + p - t for s, p, t in zip(P.shift, P.phase, t_f))
    return F, u


def _substitutive_equal(P, Q):
    sp, sq = P.source, Q.source
    if sp.rule.base is not sq.rule.base or not sp.rule.is_block:
        return None
    Fp, up = fixed_decomposition(P)
    Fq, uq = fixed_decomposition(Q)
    if up == uq:
        if Fp.phase != Fq.phase:
            return EqualityResult(False, True, "fixed_point_phase")
        box = Box.radius(1, P.dim)
        same = all(value_at(Fp, x) == value_at(Fq, x) for x in box.cells())
        return EqualityResult(same, True, "fixed_point_seed_agreement")
    from .recog.periods import cheap_aperiodicity

    if cheap_aperiodicity(Fq) is not None and cheap_aperiodicity(Fp) is not None:
        # F_p = F_q + w with both sigma^N-fixed forces (K^N - 1) w in K_{F_q} = {0}
        return EqualityResult(False, True, "aperiodic_fixed_points_offset")
    return None


def _mixed_periodic_equal(P, Q):
    from .recog.periods import cheap_aperiodicity

    for A, B in ((P, Q), (Q, P)):
        if isinstance(A.source, PeriodicSource) and isinstance(B.source, SubstitutiveSource):
            if cheap_aperiodicity(fixed_decomposition(B)[0]) is not None:
                return EqualityResult(False, True, "periodic_vs_aperiodic")
    return None
