"""Substitution rules, seeds of fixed points, and supertile addressing."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import RuleError, ValidationError
from .patches import Alphabet, Box, Patch


@dataclass(frozen=True)
class Interior:
    """Seed letter sitting strictly inside its own sigma^n image at ``offset``."""

    letter: object
    offset: tuple

    def to_json(self):
        return {"kind": "interior", "letter": str(self.letter), "offset": list(self.offset)}


@dataclass(frozen=True)
class Corner:
    """2^d letters on the cells of Box(-1..0), row-major, each fixed at its own corner."""

    letters: tuple

    def to_json(self):
        return {"kind": "corner", "letters": [str(a) for a in self.letters]}


class SubstitutionRule:
    """A word rule (1-D, variable lengths) or a block rule (every image k-shaped).

    Word rules whose images all have the same length also behave as block
    rules with ``k = (length,)``.  Letters are stored internally as uint8 codes.
    """

    def __init__(self, name: str, alphabet: Sequence, kind: str, images: dict, *, base=None, power=1):
        self.name = name
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        if len(self.alphabet) > 255:
            raise RuleError("alphabets are limited to 255 letters")
        if kind not in ("word", "block"):
            raise RuleError(f"unknown rule kind {kind!r}")
        self.kind = kind
        self.base = base if base is not None else self
        self.power_of_base = power
        self._powers = {1: self}
        self._lock = threading.Lock()
        self._lengths = None
        if set(images) != set(self.alphabet.letters):
            raise RuleError("rule must give exactly one image per letter")
        if kind == "word":
            self.dim = 1
            self.images = {a: tuple(images[a]) for a in self.alphabet}
            for a, w in self.images.items():
                if not w:
                    raise RuleError(f"image of {a!r} is empty")
                for b in w:
                    self.alphabet.index(b)
            lengths = {len(w) for w in self.images.values()}
            self.k = (lengths.pop(),) if len(lengths) == 1 else None
            if self.k is not None and self.k[0] < 2:
                self.k = None
            self.code_images = [self.alphabet.encode(self.images[a]) for a in self.alphabet]
            self._table = None
        else:
            arrs = {}
            for a in self.alphabet:
                arr = np.array(images[a], dtype=object)
                if arr.ndim not in (1, 2):
                    raise RuleError("block images must be 1- or 2-dimensional")
                arrs[a] = arr
            shapes = {arr.shape for arr in arrs.values()}
            if len(shapes) != 1:
                raise RuleError("block images must share one shape")
            shape = shapes.pop()
            if any(s < 2 for s in shape):
                raise RuleError("block shape entries must be >= 2")
            self.k = tuple(shape)
            self.dim = len(shape)
            table = np.zeros((len(self.alphabet),) + shape, dtype=np.uint8)
            for a, arr in arrs.items():
                for idx in np.ndindex(shape):
                    table[(self.alphabet.index(a),) + idx] = self.alphabet.index(arr[idx])
            self._table = table
            self.images = {a: _to_tuple(arrs[a]) for a in self.alphabet}
            self.code_images = [table[i].tobytes() for i in range(len(self.alphabet))]
        used = set()
        for c in range(len(self.alphabet)):
            used.update(self.code_images[c])
        if len(used) != len(self.alphabet) and power == 1:
            missing = [self.alphabet.letters[c] for c in range(len(self.alphabet)) if c not in used]
            raise RuleError(f"letters never produced by any image: {missing}")

    def __repr__(self):
        return f"SubstitutionRule({self.name!r}, kind={self.kind}, k={self.k})"

    @property
    def is_block(self) -> bool:
        return self.k is not None

    @property
    def letters(self) -> tuple:
        return self.alphabet.letters

    def table(self) -> np.ndarray:
        """uint8 array indexed [code, i0, ..., i_{d-1}] (block-like rules only)."""
        if self._table is None:
            if self.k is None:
                raise RuleError("variable-length word rule has no block table")
            self._table = np.array([list(w) for w in self.code_images], dtype=np.uint8)
        return self._table

    def expansion(self) -> tuple:
        if self.k is None:
            raise RuleError("variable-length word rule has no integer expansion")
        return self.k

    def power(self, n: int) -> "SubstitutionRule":
        """The rule sigma^n (memoised)."""
        if n < 1:
            raise ValidationError("power must be >= 1")
        with self._lock:
            if n in self._powers:
                return self._powers[n]
        prev = self.power(n - 1)
        images = {}
        for i, a in enumerate(self.alphabet):
            if self.dim == 1:
                images[a] = list(self.alphabet.decode(prev.substitute_codes(self.code_images[i])))
            else:
                images[a] = _decode_array(prev.substitute_array(self.table()[i]), self.alphabet)
        kind = "word" if self.kind == "word" else "block"
        rule = SubstitutionRule(f"{self.name}^{n}", self.alphabet, kind, images, base=self, power=n)
        with self._lock:
            self._powers.setdefault(n, rule)
            return self._powers[n]

    # -- rewriting on codes --------------------------------------------------
    def substitute_codes(self, u, size=None) -> bytes:
        """Substitute a 1-D code word (bytes)."""
        imgs = self.code_images
        return b"".join([imgs[c] for c in u])

    def substitute_array(self, arr: np.ndarray) -> np.ndarray:
        """Substitute a d-dim uint8 array (block-like rules)."""
        t = self.table()
        out = t[arr]
        d = arr.ndim
        if d == 1:
            return out.reshape(-1)
        h0, h1 = arr.shape
        k0, k1 = self.k
        return out.transpose(0, 2, 1, 3).reshape(h0 * k0, h1 * k1)

    def image_codes(self, c: int):
        if self.dim == 1:
            return self.code_images[c]
        return self.table()[c]

    # -- lengths for variable-length word rules ------------------------------
    def lengths(self, depth: int) -> list:
        """lengths[t][c] = |sigma^t(c)| for t <= depth, exact integers."""
        with self._lock:
            if self._lengths is None:
                self._lengths = [[1] * len(self.alphabet)]
            tab = self._lengths
            while len(tab) <= depth:
                last = tab[-1]
                tab.append([sum(last[e] for e in self.code_images[c]) for c in range(len(self.alphabet))])
            return tab


def _to_tuple(arr):
    if arr.ndim == 1:
        return tuple(arr.tolist())
    return tuple(tuple(row) for row in arr.tolist())


def _decode_array(arr: np.ndarray, alphabet: Alphabet):
    letters = alphabet.letters
    if arr.ndim == 1:
        return [letters[c] for c in arr.tolist()]
    return [[letters[c] for c in row] for row in arr.tolist()]


# -- patches ---------------------------------------------------------------

def substitute_patch(rule: SubstitutionRule, p: Patch) -> Patch:
    """Block rules: cell y goes to the block at k*y.  Word rules: the image of
    cell 0 starts at cell 0 and images are concatenated in order."""
    if p.dim != rule.dim:
        raise ValidationError("patch dimension does not match rule")
    codes = [rule.alphabet.index(v) for v in p.values]
    if rule.is_block:
        k = rule.k
        arr = np.array(codes, dtype=np.uint8).reshape(p.box.size)
        out = rule.substitute_array(arr)
        lo = tuple(a * ki for a, ki in zip(p.box.lo, k))
        box = Box.sized(out.shape, lo)
        anchor = None if p.anchor is None else tuple(a * ki for a, ki in zip(p.anchor, k))
        return Patch(box, rule.alphabet.decode(out.reshape(-1).tobytes()), anchor)
    lo = p.box.lo[0]
    lens = [len(rule.code_images[c]) for c in codes]
    neg = sum(lens[: max(0, -lo)]) if lo < 0 else 0
    start = -neg if lo <= 0 else lo
    word = rule.substitute_codes(bytes(codes))
    anchor = None
    if p.anchor is not None:
        anchor = (start + sum(lens[: p.anchor[0] - lo]),)
    return Patch(Box((start,), (start + len(word) - 1,)), rule.alphabet.decode(word), anchor)


# -- substitution matrix and primitivity -------------------------------------

@dataclass(frozen=True)
class SubstitutionMatrix:
    alphabet: tuple
    counts: tuple  # counts[b][a] = occurrences of b in sigma(a)

    def to_json(self):
        return {"alphabet": [str(a) for a in self.alphabet], "counts": [list(r) for r in self.counts]}


def substitution_matrix(rule: SubstitutionRule) -> SubstitutionMatrix:
    n = len(rule.alphabet)
    m = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in rule.image_codes(a).reshape(-1).tolist() if rule.dim > 1 else rule.code_images[a]:
            m[b][a] += 1
    return SubstitutionMatrix(rule.alphabet.letters, tuple(tuple(r) for r in m))


def _bool_mul(a, b):
    n = len(a)
    return [[any(a[i][k] and b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def is_primitive(rule: SubstitutionRule) -> bool:
    """M^m > 0 for some m up to the Wielandt bound (n-1)^2 + 1."""
    m = substitution_matrix(rule).counts
    n = len(m)
    base = [[m[i][j] > 0 for j in range(n)] for i in range(n)]
    cur = base
    for _ in range((n - 1) ** 2 + 1):
        if all(all(row) for row in cur):
            return True
        cur = _bool_mul(cur, base)
    return False


def matrix_power(m, n: int):
    """Exact integer matrix power (Python ints)."""
    size = len(m)
    result = [[int(i == j) for j in range(size)] for i in range(size)]
    base = [list(r) for r in m]
    while n:
        if n & 1:
            result = [[sum(result[i][k] * base[k][j] for k in range(size)) for j in range(size)] for i in range(size)]
        base = [[sum(base[i][k] * base[k][j] for k in range(size)) for j in range(size)] for i in range(size)]
        n >>= 1
    return result


def reachable_letters(rule: SubstitutionRule, start) -> set:
    """Letters occurring in some sigma^m(start), m >= 0."""
    seen = {rule.alphabet.index(start)}
    stack = list(seen)
    while stack:
        c = stack.pop()
        img = rule.image_codes(c)
        for e in (img if rule.dim == 1 else img.reshape(-1).tolist()):
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return {rule.alphabet.letters[c] for c in seen}


# -- seeds and addressing ------------------------------------------------------

def _corner_index(q: Sequence[int]) -> int:
    idx = 0
    for v in q:
        idx = idx * 2 + v
    return idx


def validate_seed(rule: SubstitutionRule, seed, n: int) -> None:
    """Structural validity (legality of the seed configuration is checked in subst)."""
    R = rule.power(n)
    if isinstance(seed, Interior):
        c = rule.alphabet.index(seed.letter)
        if R.is_block:
            K = R.k
            j = tuple(seed.offset)
            if len(j) != rule.dim or any(not 0 < a < b - 1 for a, b in zip(j, K)):
                raise ValidationError("interior offset must lie strictly inside the image")
            img = R.table()[c]
            if int(img[j]) != c:
                raise ValidationError("seed letter is not reproduced at its offset")
        else:
            w = R.code_images[c]
            (j,) = seed.offset
            if not 0 < j < len(w) - 1 or w[j] != c:
                raise ValidationError("seed letter is not reproduced strictly inside its image")
    elif isinstance(seed, Corner):
        d = rule.dim
        if len(seed.letters) != 2 ** d:
            raise ValidationError("corner seed needs 2^d letters")
        for idx, a in enumerate(seed.letters):
            c = rule.alphabet.index(a)
            q = [(idx >> (d - 1 - i)) & 1 for i in range(d)]
            if d == 1 and not R.is_block:
                w = R.code_images[c]
                pos = w[-1] if q[0] == 0 else w[0]
                if pos != c:
                    raise ValidationError("corner letter not fixed at its corner")
                continue
            img = R.table()[c]
            corner = tuple(-1 if v == 0 else 0 for v in q)
            if int(img[corner]) != c:
                raise ValidationError("corner letter not fixed at its corner")
    else:
        raise ValidationError("unknown seed kind")


def address(rule: SubstitutionRule, seed, n: int, x) -> object:
    """Letter at cell x of the sigma^n-fixed configuration grown from ``seed``
    (the seed letter of an Interior seed sits at cell 0; a Corner seed occupies
    cells -1..0 on every axis)."""
    x = tuple(int(v) for v in x)
    if rule.is_block:
        return rule.alphabet.letters[_address_block(rule, seed, n, x)]
    return rule.alphabet.letters[_address_word(rule, seed, n, x[0])]


def _address_block(rule, seed, n, x):
    R = rule.power(n)
    K = R.k
    d = len(K)
    if isinstance(seed, Interior):
        c = rule.alphabet.index(seed.letter)
        J = tuple(seed.offset)
        Jm = (0,) * d
        size = (1,) * d
        level = 0
        while not all(-jm <= v < -jm + s for jm, v, s in zip(Jm, x, size)):
            Jm = tuple(j * s + jm for j, s, jm in zip(J, size, Jm))
            size = tuple(s * k for s, k in zip(size, K))
            level += 1
        p = [v + jm for v, jm in zip(x, Jm)]
    else:
        q = [1 if v >= 0 else 0 for v in x]
        c = rule.alphabet.index(seed.letters[_corner_index(q)])
        size = (1,) * d
        level = 0
        while not all((v < s) if v >= 0 else (-v <= s) for v, s in zip(x, size)):
            size = tuple(s * k for s, k in zip(size, K))
            level += 1
        p = [v if v >= 0 else v + s for v, s in zip(x, size)]
    if level == 0:
        return c
    table = R.table()
    while level > 0:
        size = tuple(s // k for s, k in zip(size, K))
        idx = tuple(v // s for v, s in zip(p, size))
        p = [v % s for v, s in zip(p, size)]
        c = int(table[(c,) + idx])
        level -= 1
    return c


def _address_word(rule, seed, n, x):
    base = rule.base
    step = n * rule.power_of_base
    imgs = base.code_images
    if isinstance(seed, Interior):
        c = base.alphabet.index(seed.letter)
        (j,) = seed.offset
        prefix = base.power(step).code_images[c][:j]
        Jm, depth = 0, 0
        while True:
            lens = base.lengths(depth)[depth]
            if -Jm <= x < -Jm + lens[c]:
                break
            Jm = sum(lens[e] for e in prefix) + Jm
            depth += step
        p = x + Jm
    else:
        l, r = (base.alphabet.index(a) for a in seed.letters)
        c = r if x >= 0 else l
        depth = 0
        while True:
            lens = base.lengths(depth)[depth]
            if (x >= 0 and x < lens[c]) or (x < 0 and -x <= lens[c]):
                break
            depth += step
        p = x if x >= 0 else x + lens[c]
    tab = base.lengths(depth)
    while depth > 0:
        row = tab[depth - 1]
        for e in imgs[c]:
            if p < row[e]:
                c = e
                break
            p -= row[e]
        depth -= 1
    return c


# -- built-in corpus ---------------------------------------------------------

def _chair_images():
    rot_letter = {"NE": "NW", "NW": "SW", "SW": "SE", "SE": "NE"}
    ne = {(0, 0): "NE", (1, 1): "NE", (0, 1): "NW", (1, 0): "SE"}
    images = {}
    cur, letter = ne, "NE"
    for _ in range(4):
        images[letter] = [[cur[(x, y)] for y in range(2)] for x in range(2)]
        cur = {(1 - y, x): rot_letter[v] for (x, y), v in cur.items()}
        letter = rot_letter[letter]
    return images


def _builtin_specs():
    return {
        "thue_morse": ("word", ["a", "b"], {"a": "ab", "b": "ba"}),
        "fibonacci": ("word", ["a", "b"], {"a": "ab", "b": "a"}),
        "doubling": ("word", ["w"], {"w": "ww"}),
        "half_and_half": ("word", ["w", "b"], {"w": "ww", "b": "bb"}),
        "mask5": (
            "word",
            ["S1", "S2", "A", "B", "C"],
            {
                "S1": ["S2", "A", "S1", "B", "S2"],
                "S2": ["S1", "B", "S2", "A", "S1"],
                "A": ["C", "B", "B", "B", "C"],
                "B": ["A"] * 5,
                "C": ["A"] * 5,
            },
        ),
        "chair": ("block", ["NE", "NW", "SW", "SE"], _chair_images()),
    }


BUILTIN_RULES = ("thue_morse", "fibonacci", "doubling", "half_and_half", "mask5", "chair", "penta_gaps")
GEOMETRIC_ONLY = ("penta_gaps",)

_cache: dict = {}
_cache_lock = threading.Lock()


def builtin_rule(name: str) -> SubstitutionRule:
    specs = _builtin_specs()
    if name not in specs:
        if name in GEOMETRIC_ONLY:
            raise RuleError(f"{name} is a geometric rule; use substrate.geom")
        raise RuleError(f"unknown built-in rule {name!r}")
    with _cache_lock:
        if name not in _cache:
            kind, alphabet, images = specs[name]
            images = {a: (list(w) if isinstance(w, str) else w) for a, w in images.items()}
            _cache[name] = SubstitutionRule(name, alphabet, kind, images)
        return _cache[name]


def rule_from_mapping(data: dict, name: str | None = None) -> SubstitutionRule:
    """Build a rule from parsed TOML (see docs/config.md)."""
    kind = data.get("kind")
    if kind not in ("word", "block"):
        raise ValidationError("rule kind must be 'word' or 'block'")
    alphabet = data.get("alphabet")
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        raise ValidationError("alphabet must be a list of strings")
    rules = data.get("rules")
    if not isinstance(rules, dict):
        raise ValidationError("missing [rules] table")
    single = all(len(a) == 1 for a in alphabet)
    images = {}
    for a, img in rules.items():
        if kind == "word":
            if isinstance(img, str):
                if not single:
                    raise ValidationError("multi-character letters need list images")
                img = list(img)
            if not isinstance(img, list):
                raise ValidationError(f"image of {a!r} must be a string or list")
        else:
            if not isinstance(img, list):
                raise ValidationError(f"image of {a!r} must be an array")
        images[a] = img
    try:
        return SubstitutionRule(name or data.get("name", "custom"), alphabet, kind, images)
    except RuleError as exc:
        raise ValidationError(str(exc)) from exc


def load_toml(path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(f"{path}: {exc}") from exc


def load_rule(ref: str) -> SubstitutionRule:
    """A built-in name or a path to a TOML rule file."""
    if ref in _builtin_specs():
        return builtin_rule(ref)
    if ref.endswith(".toml"):
        data = load_toml(ref)
        return rule_from_mapping(data, data.get("name"))
    raise ValidationError(f"unknown rule {ref!r}")


def pf_eigenvalue_is_integer(rule: SubstitutionRule) -> bool | None:
    """For word rules: whether the Perron-Frobenius eigenvalue is an integer
    (decided exactly via integer roots of the characteristic polynomial).
    Returns None when the matrix is not primitive."""
    from .lattice import char_poly

    if not is_primitive(rule):
        return None
    m = substitution_matrix(rule).counts
    poly = char_poly([[Fraction(v) for v in row] for row in m])
    col_sums = [sum(m[i][j] for i in range(len(m))) for j in range(len(m))]
    hi = max(col_sums)
    lo = min(col_sums)
    for cand in range(max(lo, 1), hi + 1):
        if sum(c * cand ** i for i, c in enumerate(poly)) == 0:
            return True
    return False


def lcm(*vals: int) -> int:
    from math import gcd

    return reduce(lambda a, b: a * b // gcd(a, b), vals, 1)
