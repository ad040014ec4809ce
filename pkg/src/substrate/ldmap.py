"""Local derivations: finite-radius table rules acting on lattice patterns.

A local rule of radius c reads the box x + Box(c) of its input and writes one
letter at x.  Rules are tables over the patches of a declared domain (a
language), which keeps them exact and serialisable.  Besides application
and composition the module provides the distortion of a rule by an integer
expansion, the subdivision of a substitution as a radius-0 rule on inflated
patterns, and a bounded search for local inverses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlphabetMismatch, LocalSurjectivityFailure, PatchOutsideDeclaredLanguage, ValidationError
from .patches import Alphabet, Box, Patch
from .patterns import DerivedSource, LatticePattern, Source, value_at
from .rules import SubstitutionRule
from .subst import ADMITTED, DEFAULT_SATURATION_DEPTH, Language, mode_name, substitution_offsets

DEFAULT_INVERSE_CAP = 16
SURJECTIVITY_RADII = (1, 2, 3)


# -- domains --------------------------------------------------------------------

class LanguageDomain:
    """Input patches taken from the language of a substitution rule."""

    def __init__(self, rule: SubstitutionRule, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH):
        self.rule = rule
        self.mode = mode
        self.lang = Language.of(rule, mode, cap)
        self.alphabet = rule.alphabet
        self.dim = rule.dim

    def codes(self, size) -> frozenset:
        return self.lang.codes(size)

    def describe(self):
        return {"kind": "language", "rule": self.rule.name, "mode": mode_name(self.mode)}


def label_alphabet(alphabet: Alphabet, k) -> Alphabet:
    """Letters (a, j) of inflated patterns: a supertile letter and an offset j in Box(k)."""
    return Alphabet(tuple((a, j) for a in alphabet for j in Box.sized(k).cells()))


class InflatedDomain:
    """Windows of inflated legal patterns: cell K y + j carries (Q[y], j)."""

    def __init__(self, rule: SubstitutionRule, power: int = 1, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH):
        if not rule.is_block:
            raise ValidationError("inflated domains need a constant-length or block rule")
        self.rule = rule
        self.power = power
        self.k = rule.power(power).k
        self.lang = Language.of(rule, mode, cap)
        self.mode = mode
        self.alphabet = label_alphabet(rule.alphabet, self.k)
        self.dim = rule.dim
        self._cache: dict = {}

    def codes(self, size) -> frozenset:
        size = tuple(size)
        hit = self._cache.get(size)
        if hit is not None:
            return hit
        from .subst import _windows

        pre = tuple(-(-(s + k - 1) // k) for s, k in zip(size, self.k))
        ncell = int(np.prod(self.k))
        offs = np.arange(ncell, dtype=np.int64).reshape(self.k)
        out = set()
        for q in self.lang.codes(pre):
            arr = np.frombuffer(q, dtype=np.uint8).reshape(pre).astype(np.int64)
            big = np.kron(arr * ncell, np.ones(self.k, dtype=np.int64)) + np.tile(offs, pre)
            big = big.astype(np.uint8)
            out |= _windows(big.tobytes() if self.dim == 1 else big, size)
        hit = frozenset(out)
        self._cache[size] = hit
        return hit

    def describe(self):
        return {"kind": "inflated", "rule": self.rule.name, "power": self.power, "mode": mode_name(self.mode)}


class _ExtensionDomain:
    """1-D words all of whose windows lie in a rule's table (a superset of any language)."""

    def __init__(self, f: "LocalRule"):
        if f.dim != 1:
            raise ValidationError("declare a domain for rules in dimension > 1")
        self.f = f
        self.alphabet = f.input_alphabet
        self.dim = 1
        self.keys = frozenset(f.table)

    def codes(self, size) -> frozenset:
        (s,) = size
        w = 2 * self.f.radius + 1
        if s <= w:
            return frozenset(u[i : i + s] for u in self.keys for i in range(w - s + 1))
        words = set(self.keys)
        for _ in range(s - w):
            words = {u + bytes([c]) for u in words for c in range(len(self.alphabet)) if (u[-w + 1 :] + bytes([c])) in self.keys}
        return frozenset(words)

    def describe(self):
        return {"kind": "table_extension"}


# -- local rules -----------------------------------------------------------------------

class LocalRule:
    """Q[x] = table(P[x + Box(c)]); table keys are row-major input codes."""

    def __init__(self, radius: int, dim: int, input_alphabet: Alphabet, output_alphabet: Alphabet, table: dict,
                 domain=None, name: str | None = None):
        if radius < 0:
            raise ValidationError("radius must be nonnegative")
        self.radius = radius
        self.dim = dim
        self.input_alphabet = input_alphabet
        self.output_alphabet = output_alphabet
        self.table = dict(table)
        self.domain = domain
        self.name = name
        width = (2 * radius + 1) ** dim
        for key, out in self.table.items():
            if len(key) != width:
                raise ValidationError("table key has the wrong size")
            output_alphabet.index(out)

    @property
    def size(self) -> tuple:
        return (2 * self.radius + 1,) * self.dim

    @classmethod
    def from_function(cls, fn, radius: int, domain, output_alphabet: Alphabet, name=None) -> "LocalRule":
        """Tabulate fn(Patch on Box(radius)) over every patch of the domain."""
        d = domain.dim
        box = Box.radius(radius, d)
        table = {}
        for key in sorted(domain.codes((2 * radius + 1,) * d)):
            table[key] = fn(Patch(box, domain.alphabet.decode(key)))
        return cls(radius, d, domain.alphabet, output_alphabet, table, domain, name)

    def lookup_codes(self, key: bytes):
        try:
            return self.table[key]
        except KeyError:
            patch = self.input_alphabet.decode(key)
            raise PatchOutsideDeclaredLanguage(f"{self.name or 'rule'}: input patch {list(map(str, patch))} not in table") from None

    def evaluate(self, P: LatticePattern, x):
        c = self.radius
        key = bytes(
            self.input_alphabet.index(value_at(P, tuple(a + b for a, b in zip(x, off))))
            for off in Box.radius(c, self.dim).cells()
        )
        return self.lookup_codes(key)

    def apply_codes(self, u: bytes, size) -> tuple:
        """Outputs (row-major) on the interior of a code patch of the given size."""
        c = self.radius
        w = 2 * c + 1
        if self.dim == 1:
            return tuple(self.lookup_codes(u[i : i + w]) for i in range(size[0] - 2 * c))
        arr = np.frombuffer(u, dtype=np.uint8).reshape(size)
        view = np.lib.stride_tricks.sliding_window_view(arr, self.size)
        inner = view.shape[: self.dim]
        return tuple(self.lookup_codes(np.ascontiguousarray(view[pos]).tobytes()) for pos in np.ndindex(inner))

    def to_json(self):
        box = Box.radius(self.radius, self.dim)
        rows = []
        for key in sorted(self.table):
            rows.append({"patch": Patch(box, self.input_alphabet.decode(key)).to_json()["values"], "output": str(self.table[key])})
        out = {
            "radius": self.radius,
            "dim": self.dim,
            "input_alphabet": [str(a) for a in self.input_alphabet],
            "output_alphabet": [str(a) for a in self.output_alphabet],
            "table": rows,
        }
        if self.name:
            out["name"] = self.name
        if self.domain is not None:
            out["domain"] = self.domain.describe()
        return out

    def __repr__(self):
        return f"LocalRule({self.name or 'anonymous'}, radius={self.radius}, entries={len(self.table)})"


def identity_rule(alphabet: Alphabet, dim: int = 1, domain=None) -> LocalRule:
    return LocalRule(0, dim, alphabet, alphabet, {bytes([i]): a for i, a in enumerate(alphabet)}, domain, "identity")


def relabel_rule(mapping: dict, input_alphabet: Alphabet, output_alphabet: Alphabet, dim: int = 1, domain=None) -> LocalRule:
    table = {bytes([input_alphabet.index(a)]): b for a, b in mapping.items()}
    if len(table) != len(input_alphabet):
        raise ValidationError("relabeling must give one letter per input letter")
    return LocalRule(0, dim, input_alphabet, output_alphabet, table, domain, "relabel")


def apply(f: LocalRule, P: LatticePattern, name: str | None = None) -> LatticePattern:
    """The pattern x -> f(P[x + Box(c)]), evaluated lazily."""
    if P.dim != f.dim:
        raise ValidationError("rule and pattern dimensions differ")
    if P.alphabet is not None and any(a not in f.input_alphabet for a in P.alphabet):
        raise AlphabetMismatch("pattern letters outside the rule's input alphabet")
    return LatticePattern(DerivedSource(f, P), (0,) * P.dim, P.phase, f.output_alphabet, name)


def compose(f: LocalRule, g: LocalRule) -> LocalRule:
    """g after f, with radius c_f + c_g, tabulated over f's domain."""
    if tuple(f.output_alphabet) != tuple(g.input_alphabet):
        raise AlphabetMismatch("output alphabet of the first rule must be the input alphabet of the second")
    if f.dim != g.dim:
        raise ValidationError("rules act in different dimensions")
    c = f.radius + g.radius
    declared = f.domain is not None
    domain = f.domain if declared else _ExtensionDomain(f)
    size = (2 * c + 1,) * f.dim
    table = {}
    for key in sorted(domain.codes(size)):
        try:
            inner = f.apply_codes(key, size)
            table[key] = g.lookup_codes(g.input_alphabet.encode(inner))
        except PatchOutsideDeclaredLanguage:
            if declared:
                raise
            # a word of the extension that no legal input realises
            continue
    name = f"{g.name or 'g'}*{f.name or 'f'}"
    return LocalRule(c, f.dim, f.input_alphabet, g.output_alphabet, table, domain, name)


# -- inflation and distortion ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InflatedSource(Source):
    """Cell K y + j + m carries the label (P[y], j)."""

    pattern: LatticePattern
    k: tuple
    m: tuple

    @property
    def dim(self):
        return self.pattern.dim

    def value(self, x):
        y = tuple((v - mm) // k for v, mm, k in zip(x, self.m, self.k))
        j = tuple((v - mm) % k for v, mm, k in zip(x, self.m, self.k))
        return (value_at(self.pattern, y), j)

    def describe(self):
        return {"kind": "inflated", "k": list(self.k), "m": list(self.m), "of": self.pattern.describe()}


def inflate_pattern(P: LatticePattern, k, name: str | None = None) -> LatticePattern:
    """L P for L = diag(k), with labels (letter, offset), placed in the substitution geometry."""
    k = tuple(k)
    if P.alphabet is None:
        raise ValidationError("inflation needs the pattern's alphabet")
    offsets = [substitution_offsets(K, ph) for K, ph in zip(k, P.phase)]
    phase = tuple(p for p, _ in offsets)
    m = tuple(v for _, v in offsets)
    return LatticePattern(InflatedSource(P, k, m), (0,) * len(k), phase, label_alphabet(P.alphabet, k), name)


def inflate(rule: SubstitutionRule, Q: LatticePattern, n: int = 1, name: str | None = None) -> LatticePattern:
    """L^n Q placed where sigma^n(Q) sits, so that apply(S, L^n Q) = sigma^n(Q)."""
    R = rule.power(n)
    if not R.is_block:
        raise ValidationError("inflation needs a constant-length or block rule")
    return inflate_pattern(Q, R.k, name)


class DistortedRule(LocalRule):
    """f_L: reads the cells x + L v (v in Box(c)) of an inflated pattern and keeps the offset."""

    def __init__(self, f: LocalRule, k):
        self.base = f
        self.k = tuple(k)
        if len(self.k) != f.dim or any(v == 0 for v in self.k):
            raise ValidationError("distortion needs an invertible diagonal expansion")
        radius = max(abs(v) for v in self.k) * f.radius
        self.radius = radius
        self.dim = f.dim
        self.input_alphabet = label_alphabet(f.input_alphabet, tuple(abs(v) for v in self.k))
        self.output_alphabet = label_alphabet(f.output_alphabet, tuple(abs(v) for v in self.k))
        self.domain = None
        self.name = f"distorted({f.name or 'f'})"
        self._table: dict = {}
        full = Box.radius(radius, self.dim)
        self._reads = [full.offset(tuple(k * v for k, v in zip(self.k, off))) for off in Box.radius(f.radius, f.dim).cells()]
        self._centre = full.offset((0,) * self.dim)

    @property
    def table(self):
        return self._table

    def lookup_codes(self, key: bytes):
        hit = self._table.get(key)
        if hit is not None:
            return hit
        labels = self.input_alphabet.decode(key)
        _, j = labels[self._centre]
        inner = bytes(self.base.input_alphabet.index(labels[i][0]) for i in self._reads)
        out = (self.base.lookup_codes(inner), j)
        self._table[key] = out
        return out

    def evaluate(self, P: LatticePattern, x):
        _, j = value_at(P, tuple(x))
        letters = []
        for off in Box.radius(self.base.radius, self.dim).cells():
            a, _ = value_at(P, tuple(v + k * o for v, k, o in zip(x, self.k, off)))
            letters.append(self.base.input_alphabet.index(a))
        return (self.base.lookup_codes(bytes(letters)), j)

    def to_json(self):
        return {"radius": self.radius, "dim": self.dim, "distortion": list(self.k), "base": self.base.to_json()}


def distort(f: LocalRule, L) -> LocalRule:
    """The rule L o f o L^-1 on inflated patterns; L is a diagonal integer expansion
    (an integer, a vector of diagonal entries or a diagonal matrix)."""
    if isinstance(L, int):
        k = (L,) * f.dim
    elif all(isinstance(v, int) for v in L):
        k = tuple(L)
    else:
        rows = [list(r) for r in L]
        if any(rows[i][j] != 0 for i in range(len(rows)) for j in range(len(rows)) if i != j):
            raise ValidationError("only diagonal expansions are supported on the lattice")
        k = tuple(int(rows[i][i]) for i in range(len(rows)))
    if all(v == 1 for v in k):
        return f
    return DistortedRule(f, k)


# -- subdivision --------------------------------------------------------------------

@dataclass
class SurjectivityReport:
    rule: str
    mode: str
    checks: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(c["holds"] for c in self.checks)

    def to_json(self):
        return {"rule": self.rule, "mode": self.mode, "locally_surjective": self.holds, "checks": self.checks}


def local_surjectivity(rule: SubstitutionRule, n: int = 1, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH,
                       radii=SURJECTIVITY_RADII) -> SurjectivityReport:
    """Is every legal r-patch a window of the substitute of some legal patch?"""
    from .recog.cutting import cutting_table

    rep = SurjectivityReport(rule.name, mode_name(mode))
    lang = Language.of(rule, mode, cap)
    for r in radii:
        size = (2 * r + 1,) * rule.dim
        legal = lang.codes(size)
        covered = set(cutting_table(rule, n, r, mode, cap))
        missing = sorted(legal - covered)
        entry = {"radius": r, "legal": len(legal), "covered": len(legal) - len(missing), "holds": not missing}
        if missing:
            entry["example"] = Patch(Box.radius(r, rule.dim), rule.alphabet.decode(missing[0])).to_json()
        rep.checks.append(entry)
    return rep


def subdivision_as_ld(rule: SubstitutionRule, n: int = 1, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH,
                      strict: bool = False) -> LocalRule:
    """The radius-0 rule S with S(a, j) = sigma^n(a)[j], on inflated legal patterns.

    The local-surjectivity report is attached as ``surjectivity``; with
    strict=True a failure raises LocalSurjectivityFailure."""
    R = rule.power(n)
    if not R.is_block:
        raise ValidationError("subdivision as a lattice rule needs a constant-length or block rule")
    domain = InflatedDomain(rule, n, mode, cap)
    tab = R.table()
    table = {}
    for idx, (a, j) in enumerate(domain.alphabet):
        table[bytes([idx])] = R.alphabet.letters[int(tab[(R.alphabet.index(a),) + tuple(j)])]
    S = LocalRule(0, rule.dim, domain.alphabet, rule.alphabet, table, domain, f"subdivision({rule.name}^{n})")
    S.rule = rule
    S.power = n
    S.mode = mode
    S.surjectivity = local_surjectivity(rule, n, mode, cap)
    if strict and not S.surjectivity.holds:
        raise LocalSurjectivityFailure(f"{rule.name}: some legal patch is not covered by a substitute")
    return S


# -- inverses ----------------------------------------------------------------------

@dataclass
class InverseResult:
    found: bool
    radius_cap: int
    rule: LocalRule | None = None
    radius: int | None = None
    witness: dict | None = None
    checked: list = field(default_factory=list)

    def to_json(self):
        out = {"result": "inverse_found" if self.found else "no_inverse_up_to_cap", "radius_cap": self.radius_cap,
               "checked_radii": self.checked}
        if self.found:
            out["radius"] = self.radius
            out["inverse"] = self.rule.to_json()
        else:
            out["witness"] = self.witness
        return out


def _inverse_at(f: LocalRule, domain, r: int):
    R = r + f.radius
    d = f.dim
    size = (2 * R + 1,) * d
    centre = Box.radius(R, d).offset((0,) * d)
    seen: dict = {}
    for key in sorted(domain.codes(size)):
        out = f.apply_codes(key, size)
        prev = seen.get(out)
        if prev is None:
            seen[out] = key
        elif prev[centre] != key[centre]:
            return None, (out, prev, key, size)
    table = {f.output_alphabet.encode(out): domain.alphabet.letters[key[centre]] for out, key in seen.items()}
    return table, None


def find_inverse_rule(f: LocalRule, domain=None, radius_cap: int = DEFAULT_INVERSE_CAP) -> InverseResult:
    """Least r <= radius_cap with a table g such that g(f(P)[x + Box(r)]) = P[x] on the domain."""
    domain = domain if domain is not None else f.domain
    if domain is None:
        raise ValidationError("find_inverse_rule needs a declared domain")
    checked = []
    witness = None
    for r in range(radius_cap + 1):
        checked.append(r)
        table, amb = _inverse_at(f, domain, r)
        if table is not None:
            g = LocalRule(r, f.dim, f.output_alphabet, domain.alphabet, table, None, f"inverse({f.name or 'f'})")
            _check_inverse(f, g, domain)
            return InverseResult(True, radius_cap, g, r, None, checked)
        witness = amb
    out, k1, k2, size = witness
    R = (size[0] - 1) // 2
    box = Box.radius(R, f.dim)
    obox = Box.radius(R - f.radius, f.dim)
    wit = {
        "radius": radius_cap,
        "output_patch": Patch(obox, out).to_json(),
        "inputs": [Patch(box, domain.alphabet.decode(k)).to_json() for k in (k1, k2)],
    }
    if getattr(f, "rule", None) is not None:
        wit["periodic"] = periodic_witness(f.rule, f.power, f.mode, radius_cap)
    return InverseResult(False, radius_cap, None, None, wit, checked)


def _check_inverse(f: LocalRule, g: LocalRule, domain) -> None:
    """g after f must return the centre letter on every domain patch."""
    R = f.radius + g.radius
    size = (2 * R + 1,) * f.dim
    centre = Box.radius(R, f.dim).offset((0,) * f.dim)
    for key in domain.codes(size):
        img = f.output_alphabet.encode(f.apply_codes(key, size))
        if g.lookup_codes(img) != domain.alphabet.letters[key[centre]]:
            raise ValidationError("inverse table fails on its own domain")


def periodic_witness(rule: SubstitutionRule, n: int, mode, radius: int) -> dict | None:
    """Two pre-images of one pattern with a nonzero discrete period under sigma^n whose
    inflations differ at a cell while their subdivisions agree everywhere."""
    from .patterns import PeriodicSource, constant_pattern, extract_box, pattern_equal
    from .recog.fibre import enumerate_fibre
    from .recog.periods import _constant_run_letter, compute_periods
    from .subst import fixed_points, substitute_pattern

    candidates = [(f"constant:{a}", constant_pattern(a, rule.dim, alphabet=rule.alphabet)) for a in _constant_run_letter(rule)]
    candidates += [(f"fixed:{fp.power}", fp.pattern) for fp in fixed_points(rule, 2, mode)]
    lang = Language.of(rule, mode)
    for label, P in candidates:
        if not isinstance(P.source, PeriodicSource):
            continue
        probe = extract_box(P, Box.radius(1, rule.dim))
        if not lang.contains(probe):
            continue
        K = compute_periods(P)
        if not K.lattice:
            continue
        fib = enumerate_fibre(rule, P, n, mode=mode)
        if fib.count < 2:
            continue
        Q1, Q2 = fib.elements[0], fib.elements[1]
        L1, L2 = inflate(rule, Q1, n), inflate(rule, Q2, n)
        for x in sorted(Box.radius(max(rule.k) ** n, rule.dim).cells(), key=lambda v: (max(map(abs, v)), v)):
            if value_at(L1, x) != value_at(L2, x):
                break
        else:
            continue
        box = Box.radius(radius, rule.dim).translate(x)
        assert pattern_equal(substitute_pattern(rule, Q1, n), substitute_pattern(rule, Q2, n)).value
        return {
            "pattern": label,
            "periods": K.to_json(),
            "fibre_count": fib.count,
            "cell": list(x),
            "labels": [str(value_at(L1, x)), str(value_at(L2, x))],
            "output_window": extract_box(P, box).to_json(),
            "note": "both inflations subdivide to the same periodic pattern, so no local inverse exists at any radius",
        }
    return None


__all__ = [
    "DistortedRule",
    "InflatedDomain",
    "InverseResult",
    "LanguageDomain",
    "LocalRule",
    "SurjectivityReport",
    "apply",
    "compose",
    "distort",
    "find_inverse_rule",
    "identity_rule",
    "inflate",
    "inflate_pattern",
    "label_alphabet",
    "local_surjectivity",
    "periodic_witness",
    "relabel_rule",
    "subdivision_as_ld",
]
