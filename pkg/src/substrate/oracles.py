"""Brute-force reference computations.

Nothing here calls the engine: rules are plain ``{letter: image}`` dicts,
words are tuples, lattices are integer column lists.  The acceptance suite
and the tests compare engine output against these (or against values they
produced and that were frozen in ``data/oracle_values.json``).
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from importlib import resources


def frozen_values() -> dict:
    """Oracle outputs recorded before the engine existed."""
    text = resources.files("substrate").joinpath("data/oracle_values.json").read_text()
    return json.loads(text)


# -- words -------------------------------------------------------------------------

def expand_word(images: dict, word, n: int) -> tuple:
    w = tuple(word)
    for _ in range(n):
        w = tuple(b for a in w for b in images[a])
    return w


def factors(words, length: int) -> set:
    out = set()
    for w in words:
        for i in range(len(w) - length + 1):
            out.add(tuple(w[i:i + length]))
    return out


def legal_words(images: dict, length: int, depth: int = 8) -> set:
    """Factors of the given length of sigma^m(a), m <= depth, over all letters a."""
    found = set()
    for a in images:
        w = (a,)
        for _ in range(depth + 1):
            found |= factors([w], length)
            if len(w) > 4096:
                break
            w = expand_word(images, w, 1)
    return found


def expand_block(images: dict, grid, n: int):
    """Square block substitution on nested lists grid[x][y] (2-D) or a tuple (1-D)."""
    if not grid or not isinstance(grid[0], (list, tuple)):
        return expand_word(images, grid, n)
    for _ in range(n):
        k = len(next(iter(images.values())))
        out = [[None] * (len(grid[0]) * k) for _ in range(len(grid) * k)]
        for x, row in enumerate(grid):
            for y, a in enumerate(row):
                img = images[a]
                for i in range(k):
                    for j in range(k):
                        out[x * k + i][y * k + j] = img[i][j]
        grid = out
    return grid


# -- cuttings ----------------------------------------------------------------------

def recognisability_radius(images: dict, depth: int, pre_depth: int, r_max: int = 12):
    """Least r such that every legal (2r+1)-word (factor of sigma^depth of a
    letter) has one centre cutting among all substitutes of legal words.

    A cutting is (letter, offset) of the supertile covering the centre."""
    letters = sorted(images)
    big = [expand_word(images, (a,), depth) for a in letters]
    pre = [expand_word(images, (a,), pre_depth) for a in letters]
    shortest = min(len(v) for v in images.values())
    for r in range(r_max + 1):
        n = 2 * r + 1
        predecessors = set()
        for t in range(1, n // shortest + 3):
            predecessors |= factors(pre, t)
        ok = True
        for w in factors(big, n):
            cuts = set()
            for u in predecessors:
                img = expand_word(images, u, 1)
                starts, s = [], 0
                for c in u:
                    starts.append(s)
                    s += len(images[c])
                for pos in range(len(img) - n + 1):
                    if img[pos:pos + n] != w:
                        continue
                    c = pos + r
                    for i, st in enumerate(starts):
                        if st <= c < st + len(images[u[i]]):
                            cuts.add((u[i], c - st))
            if len(cuts) != 1:
                ok = False
                break
        if ok:
            return r
    return None


# -- lattices ----------------------------------------------------------------------

def _mat_pow(L, n):
    d = len(L)
    M = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(n):
        M = [[sum(M[i][k] * L[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    return M


def _solve2(M, v):
    """M^{-1} v for a nonsingular 2x2 or 1x1 rational matrix."""
    if len(M) == 1:
        return [Fraction(v[0]) / M[0][0]]
    (a, b), (c, d) = M
    det = Fraction(a * d - b * c)
    return [(d * v[0] - b * v[1]) / det, (-c * v[0] + a * v[1]) / det]


def lattice_index(L, basis, n: int = 1) -> int:
    """[K : L^n K] for a full-rank lattice K in Z^d (d <= 2) with columns ``basis``:
    count points of K in the half-open parallelepiped spanned by L^n K."""
    d = len(L)
    Ln = _mat_pow(L, n)
    B = [[basis[j][i] for j in range(d)] for i in range(d)]  # columns -> matrix
    M = [[sum(Ln[i][k] * B[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    corners = []
    for t in itertools.product((0, 1), repeat=d):
        corners.append([sum(M[i][j] * t[j] for j in range(d)) for i in range(d)])
    lo = [min(c[i] for c in corners) for i in range(d)]
    hi = [max(c[i] for c in corners) for i in range(d)]
    count = 0
    for z in itertools.product(*(range(lo[i], hi[i] + 1) for i in range(d))):
        coeff = _solve2(B, z)
        if any(c.denominator != 1 for c in coeff):
            continue  # not in K
        t = _solve2(M, z)
        if all(0 <= x < 1 for x in t):
            count += 1
    return count


# -- fibres of periodic patterns ---------------------------------------------------

def periodic_fibre_count(images: dict, value, period: int, phase: Fraction, n: int, legal: set, window: int) -> int:
    """Number of patterns Q (1-D, constant length k) with sigma^n(Q) equal to the
    periodic pattern x -> value(x) of the given period and cell phase.

    Q ranges over words of period period*k^n at each phase j/k^n; cell y of Q
    at phase p covers cells k^n y + i + m of the image, where
    s = k^n p - (k^n - 1)/2, the image phase is frac(s) and m = floor(s).
    Q must have all cyclic windows of the given length in ``legal``."""
    k = len(next(iter(images.values())))
    K = k ** n
    img = {a: expand_word(images, (a,), n) for a in images}
    q = period * K
    total = 0
    for j in range(K):
        p = Fraction(j, K)
        s = K * p - Fraction(K - 1, 2)
        if s - (s.numerator // s.denominator) != phase:
            continue
        m = s.numerator // s.denominator
        choices = []
        for y in range(q):
            target = tuple(value(K * y + i + m) for i in range(K))
            choices.append([a for a in images if img[a] == target])
        total += _count_cyclic(choices, legal, window)
    return total


def _count_cyclic(choices, legal: set, window: int) -> int:
    """Cyclic words with letter y from choices[y] whose windows are all legal
    (depth-first, pruning on each window as soon as it is complete)."""
    q = len(choices)
    word = []
    count = 0

    def ok_cyclic():
        return all(tuple(word[(y + t) % q] for t in range(window)) in legal for y in range(q - window + 1, q))

    def rec(y):
        nonlocal count
        if y == q:
            count += ok_cyclic()
            return
        for a in choices[y]:
            word.append(a)
            if y + 1 < window or tuple(word[y + 1 - window:]) in legal:
                rec(y + 1)
            word.pop()

    rec(0)
    return count


__all__ = [
    "expand_block",
    "expand_word",
    "factors",
    "frozen_values",
    "lattice_index",
    "legal_words",
    "periodic_fibre_count",
    "recognisability_radius",
]
