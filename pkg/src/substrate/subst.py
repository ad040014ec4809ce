"""Languages, fixed points, hierarchies and complexity profiles of substitution rules."""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd
from types import SimpleNamespace

import numpy as np

from .errors import AmbiguousPredecessor, SaturationCapExceeded, ValidationError
from .patches import Box, Patch
from .patterns import (
    DerivedSource,
    EventuallyPeriodic,
    HalfSpaceSource,
    LatticePattern,
    PeriodicSource,
    SubstitutedSource,
    SubstitutiveSource,
    _shift_ep,
    ep_to_pattern,
    eventually_periodic_form,
    extract_box,
    fixed_decomposition,
    fixed_point_pattern,
    pattern_translate,
    value_at,
)
from .rules import Corner, Interior, SubstitutionRule, address, is_primitive

ADMITTED = "admitted"
DEFAULT_SATURATION_DEPTH = 12


@dataclass(frozen=True, eq=False)
class HullOfPattern:
    pattern: LatticePattern

    def __repr__(self):
        return f"HullOfPattern({self.pattern.name or self.pattern.source.describe()['kind']})"


def mode_name(mode) -> str:
    if mode == ADMITTED:
        return "admitted"
    return f"hull:{mode.pattern.name or 'pattern'}"


# -- window helpers on codes -----------------------------------------------------------

def windows_1d(word: bytes, h: int):
    return {word[i : i + h] for i in range(len(word) - h + 1)}


def windows_nd(arr: np.ndarray, size) -> set:
    if any(a < s for a, s in zip(arr.shape, size)):
        return set()
    view = np.lib.stride_tricks.sliding_window_view(arr, tuple(size))
    flat = view.reshape(-1, int(np.prod(size)))
    return {row.tobytes() for row in np.ascontiguousarray(flat)}


def _windows(codes, size):
    if isinstance(codes, (bytes, bytearray)):
        return windows_1d(bytes(codes), size[0])
    return windows_nd(codes, size)


def _substitute(rule: SubstitutionRule, u: bytes, size):
    """Substitute a code patch given as bytes of the given size."""
    if rule.dim == 1:
        return rule.substitute_codes(u)
    arr = np.frombuffer(u, dtype=np.uint8).reshape(size)
    return rule.substitute_array(arr)


def _shape_of(codes):
    if isinstance(codes, (bytes, bytearray)):
        return (len(codes),)
    return codes.shape


@dataclass
class LanguageEntry:
    size: tuple
    codes: frozenset
    depth: int
    saturated: bool
    language: "Language"

    @property
    def patches(self) -> list:
        alpha = self.language.rule.alphabet
        box = Box.sized(self.size)
        return sorted((Patch(box, alpha.decode(c)) for c in self.codes), key=lambda p: [alpha.index(v) for v in p.values])

    def __len__(self):
        return len(self.codes)

    def to_json(self):
        return {
            "size": list(self.size),
            "count": len(self.codes),
            "saturation_depth": self.depth,
            "saturated": self.saturated,
            "mode": mode_name(self.language.mode),
        }


class Language:
    """Legal patches per box size for a rule under a mode.

    AdmittedBySubstitution collects the size-windows of sigma^m(a) over all m
    and letters a; HullOfPattern collects the windows of the given pattern.
    Both are computed exactly as closures under substitution (or directly
    for periodic and half-space patterns)."""

    _registry: dict = {}
    _registry_lock = threading.Lock()

    def __init__(self, rule: SubstitutionRule, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH):
        self.rule = rule
        self.mode = mode
        self.cap = cap
        self._entries: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def of(cls, rule, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH) -> "Language":
        key = (id(rule), id(mode) if mode != ADMITTED else ADMITTED, cap)
        with cls._registry_lock:
            lang = cls._registry.get(key)
            if lang is None:
                lang = cls(rule, mode, cap)
                cls._registry[key] = (lang, rule, mode)
                return lang
            return lang[0]

    @property
    def dim(self):
        return self.rule.dim

    def entry(self, size) -> LanguageEntry:
        size = _normalise_size(size, self.dim)
        with self._lock:
            hit = self._entries.get(size)
        if hit is not None:
            return hit
        if self.mode == ADMITTED:
            codes, depth = _admitted_closure(self.rule, size, self.cap)
        else:
            codes, depth = pattern_language_codes(self.mode.pattern, size, self.rule, self.cap)
        entry = LanguageEntry(size, frozenset(codes), depth, True, self)
        with self._lock:
            self._entries.setdefault(size, entry)
            return self._entries[size]

    def codes(self, size) -> frozenset:
        return self.entry(size).codes

    def contains(self, p: Patch) -> bool:
        codes = self.rule.alphabet.encode(p.values)
        return codes in self.codes(p.box.size)

    def words(self, size) -> list:
        """Legal patches of the given size as tuples of letters (row-major)."""
        dec = self.rule.alphabet.decode
        return sorted(dec(c) for c in self.codes(size))


def _normalise_size(size, d):
    if isinstance(size, Box):
        return size.size
    if isinstance(size, int):
        return (size,) * d
    return tuple(int(s) for s in size)


def closure(rule: SubstitutionRule, size, initial, cap: int):
    """Least superset of ``initial`` closed under u -> windows(sigma(u)); returns (set, rounds)."""
    seen = set(initial)
    frontier = set(initial)
    rounds = 0
    while frontier:
        new = set()
        for u in frontier:
            for v in _windows(_substitute(rule, u, size), size):
                if v not in seen:
                    new.add(v)
        if not new:
            break
        rounds += 1
        if rounds > cap:
            raise SaturationCapExceeded(
                f"language of size {size} still growing after {cap} substitution rounds",
                partial=frozenset(seen | new),
                depth=cap,
            )
        seen |= new
        frontier = new
    return seen, rounds


def _grow_to(rule: SubstitutionRule, codes, size, limit: int = 64):
    """Apply sigma until the patch covers ``size`` on every axis; None if it never does."""
    for _ in range(limit):
        if all(a >= s for a, s in zip(_shape_of(codes), size)):
            return codes
        if rule.dim == 1:
            codes = rule.substitute_codes(codes)
        else:
            codes = rule.substitute_array(codes)
    return None


def _admitted_closure(rule, size, cap):
    initial = set()
    for c in range(len(rule.alphabet)):
        seed = bytes([c]) if rule.dim == 1 else np.full((1,) * rule.dim, c, dtype=np.uint8)
        grown = _grow_to(rule, seed, size)
        if grown is not None:
            initial |= _windows(grown, size)
    return closure(rule, size, initial, cap)


def seed_block(rule: SubstitutionRule, seed):
    if isinstance(seed, Interior):
        c = rule.alphabet.index(seed.letter)
        return bytes([c]) if rule.dim == 1 else np.full((1,) * rule.dim, c, dtype=np.uint8)
    codes = [rule.alphabet.index(a) for a in seed.letters]
    if rule.dim == 1:
        return bytes(codes)
    return np.array(codes, dtype=np.uint8).reshape((2,) * rule.dim)


def pattern_language_codes(P: LatticePattern, size, rule: SubstitutionRule, cap: int = DEFAULT_SATURATION_DEPTH):
    """Exact set of size-windows of P (as codes over ``rule``'s alphabet) and a depth tag."""
    alpha = rule.alphabet
    src = P.source
    d = P.dim
    if isinstance(src, PeriodicSource):
        box = Box((0,) * d, tuple(src.lattice[i][i] - 1 for i in range(d)))
        return _windows_at(P, box.cells(), size, alpha), 0
    if isinstance(src, SubstitutiveSource):
        R = src.rule.power(src.power)
        grown = _grow_to(R, seed_block(R, src.seed), size)
        if grown is None:
            raise ValidationError("seed never grows to the requested size")
        return closure(R, size, _windows(grown, size), cap)
    if d == 1:
        ep = eventually_periodic_form(P)
        if ep is not None:
            span = len(ep.left) * len(ep.right) // gcd(len(ep.left), len(ep.right))
            s = size[0]
            xs = range(ep.start - s - span, ep.stop + span + 1)
            return _windows_at(P, ((x,) for x in xs), size, alpha), 0
    if isinstance(src, SubstitutedSource):
        R = src.rule.power(src.power)
        t = tuple((s - 1) // k + 2 for s, k in zip(size, R.k))
        inner, depth = pattern_language_codes(src.pattern, t, rule, cap)
        out = set()
        for u in inner:
            out |= _windows(_substitute(R, u, t), size)
        return out, depth
    if isinstance(src, DerivedSource):
        f = src.local_rule
        c = f.radius
        big = tuple(v + 2 * c for v in size)
        inner_rule = SimpleNamespace(alphabet=src.pattern.alphabet)
        inner, depth = pattern_language_codes(src.pattern, big, inner_rule, cap)
        return {alpha.encode(f.apply_codes(u, big)) for u in inner}, depth
    if isinstance(src, HalfSpaceSource):
        # 2-D half-space patterns: windows over a growing box until stable
        reach = 1
        for _, fill in src.pieces:
            for i in range(d):
                reach = reach * fill.lattice[i][i] // gcd(reach, fill.lattice[i][i])
        extent = max(abs(h.offset) for reg, _ in src.pieces for h in reg) if src.pieces else 0
        R0 = extent + 2 * max(size) + 2 * reach
        prev = None
        for scale in (1, 2, 3):
            box = Box.radius(R0 * scale, d)
            got = _windows_at(P, box.cells(), size, alpha)
            if got == prev:
                return got, scale
            prev = got
        return prev, 3
    raise ValidationError(f"no exact language for source {src.describe()['kind']}")


def _windows_at(P, positions, size, alpha):
    box = Box.sized(size)
    out = set()
    cells = list(box.cells())
    for x in positions:
        out.add(bytes(alpha.index(value_at(P, tuple(a + c for a, c in zip(x, u)))) for u in cells))
    return out


def legal_patches(rule: SubstitutionRule, shape, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH) -> LanguageEntry:
    return Language.of(rule, mode, cap).entry(shape)


def complexity(rule: SubstitutionRule, n: int, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH) -> int:
    """Number of legal words of length n (n x n boxes in 2-D)."""
    return len(legal_patches(rule, (n,) * rule.dim, mode, cap))


# -- repetitivity ---------------------------------------------------------------

@dataclass(frozen=True)
class RepetitivityProfile:
    samples: tuple  # (r, R(r))
    linear_constant: Fraction | None

    def to_json(self):
        return {
            "samples": [{"r": r, "R": R} for r, R in self.samples],
            "linear_constant": None if self.linear_constant is None else str(self.linear_constant),
        }


def _contains_all(big: bytes, smalls, rule, bsize, ssize) -> bool:
    if rule.dim == 1:
        return all(s in big for s in smalls)
    arr = np.frombuffer(big, dtype=np.uint8).reshape(bsize)
    return set(smalls) <= windows_nd(arr, ssize)


def repetitivity_radius(rule: SubstitutionRule, r: int, cap: int = 512, mode=ADMITTED) -> int:
    """Least R such that every legal radius-r patch occurs in every legal radius-R patch."""
    d = rule.dim
    small = legal_patches(rule, (2 * r + 1,) * d, mode).codes
    R = r
    while R <= cap:
        bsize = (2 * R + 1,) * d
        big = legal_patches(rule, bsize, mode).codes
        if all(_contains_all(b, small, rule, bsize, (2 * r + 1,) * d) for b in big):
            return R
        R += 1
    raise SaturationCapExceeded(f"no repetitivity radius up to {cap}")


def repetitivity_profile(rule: SubstitutionRule, r_max: int, mode=ADMITTED) -> RepetitivityProfile:
    samples = []
    prev = 0
    for r in range(1, r_max + 1):
        R = repetitivity_radius(rule, r, mode=mode)
        R = max(R, prev)
        samples.append((r, R))
        prev = R
    C = max(Fraction(R, r) for r, R in samples) if is_primitive(rule) else None
    return RepetitivityProfile(tuple(samples), C)


# -- fixed points ---------------------------------------------------------------

@dataclass(frozen=True)
class FixedPoint:
    power: int
    seed: object
    pattern: LatticePattern

    def to_json(self):
        return {"power": self.power, "seed": self.seed.to_json(), "phase": [str(p) for p in self.pattern.phase]}


def _fixed_key(P: LatticePattern):
    return (P.phase, tuple(value_at(P, x) for x in Box.radius(1, P.dim).cells()))


def fixed_points(rule: SubstitutionRule, max_power: int, mode=ADMITTED) -> list:
    """All Interior and Corner seeds of sigma^n, n <= max_power, legal in the mode's
    language and deduplicated as patterns (first power wins)."""
    if max_power < 1:
        raise ValidationError("max_power must be >= 1")
    d = rule.dim
    lang = Language.of(rule, mode)
    letters_ok = lang.codes((1,) * d)
    corner_ok = lang.codes((2,) * d)
    found = []
    keys = set()

    def add(n, seed):
        P = fixed_point_pattern(rule, n, seed)
        key = _fixed_key(P) if rule.is_block else (n, seed)
        if rule.is_block and key in keys:
            return
        keys.add(key)
        found.append(FixedPoint(n, seed, P))

    for n in range(1, max_power + 1):
        R = rule.power(n)
        ncodes = len(rule.alphabet)
        # interior seeds
        for c in range(ncodes):
            if bytes([c]) not in letters_ok:
                continue
            if R.is_block:
                img = R.table()[c]
                for j in itertools.product(*(range(1, k - 1) for k in R.k)):
                    if int(img[j]) == c:
                        add(n, Interior(rule.alphabet.letters[c], tuple(j)))
            else:
                w = R.code_images[c]
                for j in range(1, len(w) - 1):
                    if w[j] == c:
                        add(n, Interior(rule.alphabet.letters[c], (j,)))
        # corner seeds
        per_corner = []
        for q in itertools.product((0, 1), repeat=d):
            corner = tuple(-1 if v == 0 else 0 for v in q)
            opts = []
            for c in range(ncodes):
                if d == 1 and not R.is_block:
                    w = R.code_images[c]
                    if (w[-1] if q[0] == 0 else w[0]) == c:
                        opts.append(c)
                elif int(R.table()[(c,) + corner]) == c:
                    opts.append(c)
            per_corner.append(opts)
        for combo in itertools.product(*per_corner):
            codes = bytes(combo)
            if codes not in corner_ok:
                continue
            add(n, Corner(tuple(rule.alphabet.letters[c] for c in combo)))
    return found


# -- substitution of patterns -------------------------------------------------------

def substitution_offsets(K: int, phase: Fraction):
    """For sigma^n with expansion K: returns (phase of image, m) where Q-cell y
    covers image cells K y + i + m."""
    s = K * Fraction(phase) - Fraction(K - 1, 2)
    m = floor(s)
    return s - m, int(m)


def substitute_pattern(rule: SubstitutionRule, Q: LatticePattern, n: int = 1, normalise: bool = True) -> LatticePattern:
    """sigma^n(Q) in the centred-cell geometry."""
    R = rule.power(n)
    if not R.is_block:
        raise ValidationError("pattern substitution needs a constant-length or block rule")
    phases, ms = [], []
    for K, ph in zip(R.k, Q.phase):
        p, m = substitution_offsets(K, ph)
        phases.append(p)
        ms.append(m)
    P = LatticePattern(SubstitutedSource(rule, n, Q, tuple(ms)), (0,) * Q.dim, tuple(phases), rule.alphabet)
    return normalise_pattern(P) if normalise else P


def normalise_pattern(P: LatticePattern) -> LatticePattern:
    """Re-express lazily defined patterns through exact sources where possible."""
    src = P.source
    if not isinstance(src, SubstitutedSource):
        return P
    inner = src.pattern
    if P.dim == 1:
        ep = eventually_periodic_form(P)
        if ep is not None:
            return ep_to_pattern(ep, P.phase, P.alphabet, P.name)
    if isinstance(inner.source, PeriodicSource):
        return _substituted_periodic(P)
    if isinstance(inner.source, SubstitutiveSource) and inner.source.rule.base is src.rule.base:
        F, u = fixed_decomposition(inner)
        n_fix = inner.source.power * inner.source.rule.power_of_base
        n_app = src.power * src.rule.power_of_base
        K = src.rule.power(src.power).k
        moved = tuple(k * v for k, v in zip(K, u))
        if n_app % n_fix == 0:
            return pattern_translate(F, moved)
        G = LatticePattern(SubstitutedSource(src.rule, src.power, F, substitution_offsets_vec(src.rule, src.power, F.phase)[1]),
                           (0,) * P.dim, substitution_offsets_vec(src.rule, src.power, F.phase)[0], P.alphabet)
        fixed = _as_fixed_point(inner.source.rule.base, n_fix, G)
        if fixed is not None:
            return pattern_translate(fixed, moved)
    return P


def substitution_offsets_vec(rule, n, phase):
    R = rule.power(n)
    out = [substitution_offsets(K, ph) for K, ph in zip(R.k, phase)]
    return tuple(p for p, _ in out), tuple(m for _, m in out)


def _as_fixed_point(rule: SubstitutionRule, n: int, G: LatticePattern):
    """Seed description of an exactly sigma^n-fixed pattern G, or None (mixed seeds)."""
    R = rule.power(n)
    half = Fraction(1, 2)
    if all(p == half for p in G.phase):
        seed = Corner(tuple(value_at(G, x) for x in Box((-1,) * G.dim, (0,) * G.dim).cells()))
        return fixed_point_pattern(rule, n, seed)
    if any(p == half for p in G.phase):
        return None
    c0 = tuple(0 if p < half else -1 for p in G.phase)
    offs = []
    for K, p, c in zip(R.k, G.phase, c0):
        _, m = substitution_offsets(K, p)
        offs.append(c - K * c - m)
    seed = Interior(value_at(G, c0), tuple(offs))
    return fixed_point_pattern(rule, n, seed)


def _substituted_periodic(P: LatticePattern) -> LatticePattern:
    src = P.source
    inner = src.pattern.source
    R = src.rule.power(src.power)
    K = R.k
    lat = tuple(tuple(k * v for k, v in zip(K, b)) for b in inner.lattice)
    from .lattice import hnf

    lat = hnf(lat)
    d = P.dim
    box = Box((0,) * d, tuple(lat[i][i] - 1 for i in range(d)))
    block = Patch(box, tuple(value_at(P, x) for x in box.cells()))
    return LatticePattern(PeriodicSource(lat, block), (0,) * d, P.phase, P.alphabet, P.name)


# -- one-sided eventual periodicity of substitutive fixed points -------------------------

def _find_eventual_period(word: tuple, max_period: int):
    n = len(word)
    for q in range(1, max_period + 1):
        # smallest preperiod for period q, requiring at least 3 full periods of evidence
        p0 = None
        i = n - q - 1
        while i >= 0 and word[i] == word[i + q]:
            i -= 1
        p0 = i + 1
        if n - p0 >= 3 * q + 8 and p0 <= n // 2:
            return p0, q
    return None


def _one_sided_equal(a, b) -> bool:
    (v1, u1), (v2, u2) = a, b
    n = max(len(v1), len(v2)) + len(u1) * len(u2) // gcd(len(u1), len(u2))
    return all(_os_at(a, i) == _os_at(b, i) for i in range(n))


def _os_at(w, i):
    v, u = w
    return v[i] if i < len(v) else u[(i - len(v)) % len(u)]


def _os_image_drop(images, w, drop: int):
    """drop letters from sigma(w) for a one-sided eventually periodic w = v u^inf."""
    v, u = w
    sv = tuple(b for a in v for b in images[a])
    su = tuple(b for a in u for b in images[a])
    while drop > 0 and sv:
        sv = sv[1:]
        drop -= 1
    while drop > 0:
        su = su[1:] + su[:1]
        drop -= 1
    return sv, su


def _one_sided_form(images, first, drop, prefix):
    """Certified eventually periodic form of the unique one-sided word W with
    W[0] = first and W = drop(sigma(W)), guessed from ``prefix``; or None."""
    found = _find_eventual_period(prefix, len(prefix) // 8)
    if found is None:
        return None
    p0, q = found
    w = (tuple(prefix[:p0]), tuple(prefix[p0 : p0 + q]))
    if _os_at(w, 0) != first:
        return None
    if not _one_sided_equal(_os_image_drop(images, w, drop), w):
        return None
    return w


_ep_cache: dict = {}
_ep_lock = threading.Lock()
EP_PROBE = 1024


def substitutive_ep_form(P: LatticePattern):
    """Exact eventually periodic form of a 1-D substitutive pattern, or None
    when either half is not certified eventually periodic."""
    src = P.source
    key = (id(src.rule), src.power, src.seed)
    with _ep_lock:
        if key in _ep_cache:
            base = _ep_cache[key][0]
            return None if base is None else _shift_ep(base, P.shift[0])
    rule = src.rule
    R = rule.power(src.power)
    images = R.images
    rev_images = {a: tuple(reversed(w)) for a, w in images.items()}
    N = EP_PROBE
    right = tuple(address(rule, src.seed, src.power, (x,)) for x in range(N))
    left = tuple(address(rule, src.seed, src.power, (-1 - t,)) for t in range(N))
    if isinstance(src.seed, Interior):
        (j,) = src.seed.offset
        a = src.seed.letter
        jr = len(images[a]) - 1 - j
        wr = _one_sided_form(images, a, j, right)
        wl = _one_sided_form(rev_images, a, jr, (a,) + left[:-1])
        if wl is not None:
            v, u = wl
            wl = (v[1:], u) if v else ((), u[1:] + u[:1])
    else:
        l, r = src.seed.letters
        wr = _one_sided_form(images, r, 0, right)
        wl = _one_sided_form(rev_images, l, 0, left)
    base = None
    if wr is not None and wl is not None:
        vl, ul = wl
        vr, ur = wr
        ql, qr = len(ul), len(ur)
        lt = len(vl)
        left_res = tuple(ul[(-1 - r_ - lt) % ql] for r_ in range(ql))
        right_res = tuple(ur[(r_ - len(vr)) % qr] for r_ in range(qr))
        middle = tuple(reversed(vl)) + tuple(vr)
        base = EventuallyPeriodic(left_res, -lt, middle, right_res).normalise()
    with _ep_lock:
        _ep_cache[key] = (base, src)
    return None if base is None else _shift_ep(base, P.shift[0])



# -- hierarchy ----------------------------------------------------------------

@dataclass(frozen=True)
class Hierarchy:
    levels: tuple  # ((i, pattern), ...) for i in -m..m, with sigma^power(P_{i+1}) = P_i
    power: int
    fibre_sizes: tuple
    verified_radius: int

    def to_json(self):
        return {
            "power": self.power,
            "levels": [{"i": i, "pattern": P.describe()} for i, P in self.levels],
            "fibre_sizes": list(self.fibre_sizes),
            "verified_radius": self.verified_radius,
        }


def hierarchy(rule: SubstitutionRule, P: LatticePattern, m: int, power: int = 1, mode=ADMITTED,
              canonical: bool = True, radius: int = 20) -> Hierarchy:
    from .recog.fibre import enumerate_fibre

    levels = {0: P}
    for i in range(1, m + 1):
        levels[-i] = substitute_pattern(rule, levels[-i + 1], power)
    sizes = []
    for i in range(0, m):
        fib = enumerate_fibre(rule, levels[i], power, mode=mode)
        sizes.append(len(fib.elements))
        if len(fib.elements) > 1 and not canonical:
            raise AmbiguousPredecessor(f"{len(fib.elements)} predecessors at level {i + 1}")
        levels[i + 1] = fib.elements[0]
    box = Box.radius(radius, P.dim)
    for i in range(-m, m):
        img = substitute_pattern(rule, levels[i + 1], power, normalise=False)
        if extract_box(img, box) != extract_box(levels[i], box):
            raise ValidationError(f"hierarchy levels {i + 1} -> {i} disagree")
    return Hierarchy(tuple(sorted(levels.items())), power, tuple(sizes), radius)
