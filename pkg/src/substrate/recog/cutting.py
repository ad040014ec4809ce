"""Desubstitution cuttings and the recognisability radius."""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from ..errors import IllegalPatch
from ..patches import Box, Patch
from ..rules import SubstitutionRule
from ..subst import ADMITTED, DEFAULT_SATURATION_DEPTH, Language, mode_name

DEFAULT_RECOGNISABILITY_CAP = 64


@dataclass(frozen=True, order=True)
class Cutting:
    """The centre cell sits at ``offset`` inside the image of supertile ``letter``."""

    letter: object
    offset: tuple

    def to_json(self):
        return {"letter": str(self.letter), "offset": list(self.offset)}


@dataclass(frozen=True)
class Realisation:
    """A legal predecessor patch whose substitute shows the patch at ``position``."""

    predecessor: Patch
    position: tuple
    cutting: Cutting


def _min_length(rule: SubstitutionRule) -> int:
    return min(len(w) for w in rule.code_images)


def predecessor_size(rule: SubstitutionRule, size) -> tuple:
    """Box size of predecessors large enough to cover any placement of a size-patch."""
    if rule.is_block:
        return tuple(ceil((s + k - 1) / k) for s, k in zip(size, rule.k))
    return (size[0] // _min_length(rule) + 2,)


class _CuttingIndex:
    """All windows of one size in substitutes of legal predecessors, with the
    cutting of a chosen cell of the window."""

    def __init__(self, rule: SubstitutionRule, size, centre, mode, cap, lang_rule=None):
        self.rule = rule
        self.size = tuple(size)
        self.centre = tuple(centre)
        # predecessors are legal in the language of lang_rule (the base rule for powers)
        self.lang = Language.of(lang_rule or rule, mode, cap)
        self.table: dict = {}
        self.pre_size = predecessor_size(rule, size)
        codes = self.lang.codes(self.pre_size)
        for q in sorted(codes):
            self._scan(q)

    def _record(self, key, cut: Cutting, q: bytes, pos):
        bucket = self.table.setdefault(key, {})
        if cut not in bucket:
            bucket[cut] = (q, pos)

    def _scan(self, q: bytes):
        rule = self.rule
        letters = rule.alphabet.letters
        if rule.dim == 1:
            img = rule.substitute_codes(q)
            starts = []
            s = 0
            for c in q:
                starts.append(s)
                s += len(rule.code_images[c])
            h = self.size[0]
            (cz,) = self.centre
            tile = 0
            for i in range(len(img) - h + 1):
                c = i + cz
                while tile + 1 < len(starts) and starts[tile + 1] <= c:
                    tile += 1
                cut = Cutting(letters[q[tile]], (c - starts[tile],))
                self._record(img[i : i + h], cut, q, (i,))
            return
        arr = np.frombuffer(q, dtype=np.uint8).reshape(self.pre_size)
        img = rule.substitute_array(arr)
        view = np.lib.stride_tricks.sliding_window_view(img, self.size)
        for pos in np.ndindex(view.shape[: rule.dim]):
            c = tuple(p + z for p, z in zip(pos, self.centre))
            tile = tuple(v // k for v, k in zip(c, rule.k))
            off = tuple(v % k for v, k in zip(c, rule.k))
            key = np.ascontiguousarray(view[pos]).tobytes()
            self._record(key, Cutting(letters[int(arr[tile])], off), q, pos)

    def realisations(self, key: bytes) -> list:
        alpha = self.rule.alphabet
        box = Box.sized(self.pre_size)
        out = []
        for cut, (q, pos) in sorted(self.table.get(key, {}).items()):
            out.append(Realisation(Patch(box, alpha.decode(q)), pos, cut))
        return out


_index_cache: dict = {}


def _index(rule, size, centre, mode, cap, lang_rule=None) -> _CuttingIndex:
    key = (id(rule), tuple(size), tuple(centre), id(mode) if mode != ADMITTED else ADMITTED, cap, id(lang_rule))
    hit = _index_cache.get(key)
    if hit is None:
        hit = _CuttingIndex(rule, size, centre, mode, cap, lang_rule)
        _index_cache[key] = (hit, rule, lang_rule)
        return hit
    return hit[0]


def cuttings_of_patch(rule: SubstitutionRule, p: Patch, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH,
                      power: int = 1) -> set:
    """All cuttings of the cell at relative position 0 of ``p`` under sigma^power
    that are realised by the substitute of a legal predecessor patch."""
    if (0,) * p.box.dim not in p.box:
        raise IllegalPatch("patch box must contain its centre cell 0")
    if not Language.of(rule, mode, cap).contains(p):
        raise IllegalPatch(f"patch is not legal in the {mode_name(mode)} language")
    centre = tuple(-v for v in p.box.lo)
    R = rule.power(power)
    idx = _index(R, p.box.size, centre, mode, cap, rule if power > 1 else None)
    return set(idx.table.get(rule.alphabet.encode(p.values), {}))


def cutting_table(rule: SubstitutionRule, power: int, r: int, mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH) -> dict:
    """Map from radius-r patch codes to the set of centre cuttings under sigma^power."""
    d = rule.dim
    R = rule.power(power)
    idx = _index(R, (2 * r + 1,) * d, (r,) * d, mode, cap, rule if power > 1 else None)
    return idx.table


@dataclass
class RecognisabilityReport:
    rule: str
    mode: str
    cap: int
    radius: int | None
    witness: dict | None
    checked: tuple  # radii examined, in order

    @property
    def found(self) -> bool:
        return self.radius is not None

    def to_json(self):
        out = {"rule": self.rule, "mode": self.mode, "cap": self.cap, "checked_radii": list(self.checked)}
        if self.radius is not None:
            out["result"] = "found"
            out["radius"] = self.radius
        else:
            out["result"] = "ambiguous_at_cap"
            out["witness"] = self.witness
        return out


def _ambiguity(rule, r, mode, cap):
    """None if every legal radius-r patch has exactly one centre cutting, else a witness."""
    d = rule.dim
    size = (2 * r + 1,) * d
    idx = _index(rule, size, (r,) * d, mode, cap)
    legal = Language.of(rule, mode, cap).codes(size)
    for key in sorted(legal):
        cuts = idx.table.get(key, {})
        if len(cuts) != 1:
            return key, idx
    return None


def _witness_json(rule, r, key, idx) -> dict:
    alpha = rule.alphabet
    box = Box.radius(r, rule.dim)
    reals = idx.realisations(key)
    out = {"radius": r, "patch": Patch(box, alpha.decode(key)).to_json(), "realisations": []}
    for rl in reals[:2]:
        out["realisations"].append(
            {"predecessor": rl.predecessor.to_json(), "position": list(rl.position), "cutting": rl.cutting.to_json()}
        )
    if not reals:
        out["note"] = "legal patch not covered by the substitute of any legal patch"
    return out


def verify_witness(rule: SubstitutionRule, witness: dict) -> bool:
    """Re-extract both realisations and check they show the same patch with
    different centre cuttings."""
    from ..rules import substitute_patch

    alpha = rule.alphabet
    patch = Patch.from_json(witness["patch"], alpha)
    reals = witness["realisations"]
    if len(reals) < 2:
        return False
    cuts = set()
    for rl in reals:
        pre = Patch.from_json(rl["predecessor"], alpha)
        img = substitute_patch(rule, pre)
        pos = tuple(rl["position"])
        box = Box(tuple(l + p for l, p in zip(img.box.lo, pos)), tuple(l + p + s - 1 for l, p, s in zip(img.box.lo, pos, patch.box.size)))
        window = tuple(img[c] for c in box.cells())
        if window != patch.values:
            return False
        cuts.add((rl["cutting"]["letter"], tuple(rl["cutting"]["offset"])))
    return len(cuts) >= 2


def recognisability_radius(rule: SubstitutionRule, cap: int = DEFAULT_RECOGNISABILITY_CAP, mode=ADMITTED,
                           saturation_cap: int = DEFAULT_SATURATION_DEPTH) -> RecognisabilityReport:
    """Least r <= cap at which every legal radius-r patch has a unique centre cutting.

    Uniqueness is inherited by larger radii, so the search doubles r and then
    bisects.  If r = cap is still ambiguous the report carries a witness."""
    checked = []
    memo = {}

    def amb(r):
        if r not in memo:
            checked.append(r)
            memo[r] = _ambiguity(rule, r, mode, saturation_cap)
        return memo[r]

    lo, hi = -1, None  # lo: known ambiguous, hi: known unique
    r = 0
    while True:
        r = min(r, cap)
        if amb(r) is None:
            hi = r
            break
        lo = r
        if r == cap:
            key, idx = memo[r]
            return RecognisabilityReport(rule.name, mode_name(mode), cap, None, _witness_json(rule, r, key, idx), tuple(checked))
        r = 1 if r == 0 else 2 * r
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if amb(mid) is None:
            hi = mid
        else:
            lo = mid
    return RecognisabilityReport(rule.name, mode_name(mode), cap, hi, None, tuple(checked))


__all__ = [
    "Cutting",
    "RecognisabilityReport",
    "cuttings_of_patch",
    "recognisability_radius",
    "verify_witness",
    "predecessor_size",
]
