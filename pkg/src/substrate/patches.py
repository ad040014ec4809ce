"""Finite patches on Z^d and their algebra (restriction, shifting, transformation, glueing)."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import AlphabetMismatch, NonInvertibleMatrix, SubShapeNotContained, ValidationError

Cell = tuple


@dataclass(frozen=True)
class Alphabet:
    letters: tuple

    def __post_init__(self):
        letters = tuple(self.letters)
        if not letters:
            raise ValidationError("alphabet must be nonempty")
        if len(set(letters)) != len(letters):
            raise ValidationError("alphabet letters must be distinct")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(letters)})

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, a):
        return a in self._index

    def index(self, a) -> int:
        try:
            return self._index[a]
        except KeyError:
            raise AlphabetMismatch(f"letter {a!r} not in alphabet") from None

    def encode(self, word: Iterable) -> bytes:
        return bytes(self.index(a) for a in word)

    def decode(self, codes: bytes) -> tuple:
        return tuple(self.letters[c] for c in codes)


@dataclass(frozen=True)
class Box:
    """Integer box lo..hi, both ends inclusive."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo, hi = tuple(int(v) for v in self.lo), tuple(int(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValidationError("box corners must have equal positive dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValidationError("box requires lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @staticmethod
    def radius(r: int, d: int) -> "Box":
        if r < 0:
            raise ValidationError("radius must be nonnegative")
        return Box((-r,) * d, (r,) * d)

    @staticmethod
    def sized(size: Sequence[int], lo: Sequence[int] | None = None) -> "Box":
        lo = tuple(lo) if lo is not None else (0,) * len(size)
        return Box(lo, tuple(a + s - 1 for a, s in zip(lo, size)))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def size(self) -> tuple:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    def __len__(self):
        n = 1
        for s in self.size:
            n *= s
        return n

    def cells(self) -> Iterator[tuple]:
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def __contains__(self, x) -> bool:
        return all(a <= v <= b for a, v, b in zip(self.lo, x, self.hi))

    def contains_box(self, other: "Box") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def offset(self, x) -> int:
        """Row-major position of cell x."""
        pos = 0
        for a, v, s in zip(self.lo, x, self.size):
            pos = pos * s + (v - a)
        return pos

    def translate(self, z) -> "Box":
        return Box(tuple(a + v for a, v in zip(self.lo, z)), tuple(b + v for b, v in zip(self.hi, z)))

    def grow(self, r: int) -> "Box":
        return Box(tuple(a - r for a in self.lo), tuple(b + r for b in self.hi))

    def to_json(self):
        return {"lo": list(self.lo), "hi": list(self.hi)}


def shape_box(shape, d: int) -> Box:
    """Accept a Box or a nonnegative radius."""
    if isinstance(shape, Box):
        return shape
    return Box.radius(int(shape), d)


@dataclass(frozen=True, eq=False)
class Patch:
    """Values on the cells of a box, stored row-major; the anchor is excluded from equality."""

    box: Box
    values: tuple
    anchor: tuple | None = None

    def __post_init__(self):
        values = tuple(self.values)
        if len(values) != len(self.box):
            raise ValidationError("patch value count does not match its shape")
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        return isinstance(other, Patch) and self.box == other.box and self.values == other.values

    def __hash__(self):
        return hash((self.box, self.values))

    @property
    def dim(self) -> int:
        return self.box.dim

    def __getitem__(self, x):
        if x not in self.box:
            raise KeyError(x)
        return self.values[self.box.offset(x)]

    def items(self):
        return zip(self.box.cells(), self.values)

    def as_dict(self) -> dict:
        return dict(self.items())

    def __repr__(self):
        if self.dim == 1:
            body = " ".join(str(v) for v in self.values)
            return f"Patch[{self.box.lo[0]}..{self.box.hi[0]}: {body}]"
        return f"Patch({self.box.lo}..{self.box.hi}, {self.values})"

    def to_json(self):
        return {"shape": self.box.to_json(), "values": [str(v) for v in self.values]}

    @staticmethod
    def from_json(obj, alphabet: Alphabet | None = None) -> "Patch":
        box = Box(tuple(obj["shape"]["lo"]), tuple(obj["shape"]["hi"]))
        values = tuple(obj["values"])
        if alphabet is not None:
            by_name = {str(a): a for a in alphabet}
            try:
                values = tuple(by_name[v] for v in values)
            except KeyError as exc:
                raise AlphabetMismatch(f"letter {exc.args[0]!r} not in alphabet") from None
        return Patch(box, values)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True, eq=False)
class SparsePatch:
    """Values on an arbitrary finite set of cells (the result of transforming a patch)."""

    cells: Mapping

    def __post_init__(self):
        object.__setattr__(self, "cells", dict(sorted(dict(self.cells).items())))

    def __eq__(self, other):
        return isinstance(other, SparsePatch) and self.cells == other.cells

    def __hash__(self):
        return hash(tuple(self.cells.items()))

    def to_patch(self) -> Patch:
        """Convert back to a box patch when the domain is a full box."""
        if not self.cells:
            raise ValidationError("empty sparse patch")
        keys = list(self.cells)
        d = len(keys[0])
        lo = tuple(min(k[i] for k in keys) for i in range(d))
        hi = tuple(max(k[i] for k in keys) for i in range(d))
        box = Box(lo, hi)
        if len(box) != len(keys):
            raise ValidationError("sparse patch domain is not a box")
        return Patch(box, tuple(self.cells[c] for c in box.cells()))


def patch_restrict(p: Patch, sub) -> Patch:
    sub = shape_box(sub, p.dim)
    if not p.box.contains_box(sub):
        raise SubShapeNotContained(f"{sub} not inside {p.box}")
    return Patch(sub, tuple(p[c] for c in sub.cells()), p.anchor)


def patch_shift(p: Patch, z) -> Patch:
    """Shape moves by -z; the value at u is the old value at u + z."""
    z = tuple(z)
    anchor = None if p.anchor is None else tuple(a + v for a, v in zip(p.anchor, z))
    return Patch(p.box.translate(tuple(-v for v in z)), p.values, anchor)


def _int_det(m) -> Fraction:
    m = [[Fraction(v) for v in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def _apply(L, u):
    return tuple(sum(Fraction(L[i][j]) * u[j] for j in range(len(u))) for i in range(len(L)))


def _as_cell(v):
    out = []
    for x in v:
        x = Fraction(x)
        if x.denominator != 1:
            raise ValidationError("transformed cell is not integral")
        out.append(int(x))
    return tuple(out)


def patch_transform(p, L) -> SparsePatch:
    """Place the value of cell u at L u."""
    if _int_det(L) == 0:
        raise NonInvertibleMatrix("transform matrix is singular")
    items = p.items() if isinstance(p, Patch) else p.cells.items()
    return SparsePatch({_as_cell(_apply(L, u)): v for u, v in items})


def patch_glue(p: Patch, q) -> SparsePatch | None:
    """Union of two patches, or None where they conflict on the overlap."""
    out = dict(p.items() if isinstance(p, Patch) else p.cells.items())
    for c, v in (q.items() if isinstance(q, Patch) else q.cells.items()):
        if c in out and out[c] != v:
            return None
        out[c] = v
    return SparsePatch(out)


def patches_agree(P, x, Q, y, shape) -> bool:
    """P[x + u] == Q[y + u] for every u in shape (P, Q anything with value_at semantics)."""
    from .patterns import value_at

    return all(
        value_at(P, tuple(a + b for a, b in zip(x, u))) == value_at(Q, tuple(a + b for a, b in zip(y, u)))
        for u in shape.cells()
    )


def check_same_alphabet(a: Alphabet, b: Alphabet) -> None:
    if tuple(a.letters) != tuple(b.letters):
        raise AlphabetMismatch("alphabets differ")
