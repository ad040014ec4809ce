"""Pre-image fibres of sigma^n with exact phases.

Every pre-image Q of P under sigma^n lies in one of |det L^n| phase classes:
its phase is fixed by the phase of P up to the choice of the integer m with
which the supertiles of Q line up with the cells of P.  Inside a class every
cell y of Q must carry a letter whose image equals the block of P covered by
y.  Two engines then decide the class:

* 1-D anchors with an eventually periodic description are handled exactly:
  pre-images are the bi-infinite walks through the graph of legal words
  compatible with the candidate letters, and these are counted and listed
  through strongly connected components.
* other anchors are handled by propagation in growing windows (which can
  only remove classes soundly) together with a symbolic pre-image and, when
  available, a local cutting certificate that proves uniqueness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

import networkx as nx

from ..errors import NotStabilized, UnsupportedSource, ValidationError
from ..patches import Box
from ..patterns import (
    EventuallyPeriodic,
    LatticePattern,
    SubstitutiveSource,
    ep_to_pattern,
    eventually_periodic_form,
    extract_box,
    fixed_decomposition,
    fmt_fraction,
    pattern_equal,
    pattern_translate,
    value_at,
)
from ..rules import SubstitutionRule
from ..subst import (
    ADMITTED,
    DEFAULT_SATURATION_DEPTH,
    Language,
    pattern_language_codes,
    substitute_pattern,
    substitution_offsets,
)

DEFAULT_WINDOW_SCHEDULE = (8, 16, 32, 64, 128, 256)
SFT_WORD_LENGTHS = (2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256)
LOCAL_CUTTING_RADII = (1, 2, 3, 4, 6, 8)
VERIFY_RADIUS = 50
INF = float("inf")
MAX_ELEMENTS = 20000


@dataclass
class PhaseClass:
    phase: tuple
    m: tuple
    status: str = "open"
    count: int | float = 0
    detail: dict = field(default_factory=dict)

    def to_json(self):
        out = {"phase": [fmt_fraction(p) for p in self.phase], "m": list(self.m), "status": self.status}
        if self.status != "eliminated":
            out["count"] = "infinite" if self.count == INF else self.count
        out.update(self.detail)
        return out


@dataclass
class Fibre:
    rule: str
    power: int
    anchor: LatticePattern
    elements: list
    classes: list
    certificate: dict

    @property
    def count(self) -> int:
        return len(self.elements)

    def canonical(self) -> LatticePattern:
        return self.elements[0]

    def to_json(self, include_elements: bool = True):
        out = {
            "rule": self.rule,
            "power": self.power,
            "anchor": self.anchor.describe(),
            "count": self.count,
            "certificate": self.certificate,
            "phase_classes": [c.to_json() for c in self.classes],
        }
        if include_elements:
            out["elements"] = [_element_json(Q) for Q in self.elements]
        return out


def _element_json(Q: LatticePattern) -> dict:
    out = {"phase": [fmt_fraction(p) for p in Q.phase], "shift": list(Q.shift)}
    ep = eventually_periodic_form(Q) if Q.dim == 1 else None
    if ep is not None:
        out["eventually_periodic"] = ep.to_json()
    else:
        out["source"] = Q.describe()["source"]
    return out


# -- phase classes ----------------------------------------------------------------

def phase_classes(R: SubstitutionRule, phase) -> list:
    """All (phase of Q, m) with sigma^n(Q) at the given phase, one per class."""
    per_axis = []
    for K, ph in zip(R.k, phase):
        opts = []
        for j in range(K):
            q = (Fraction(j) + Fraction(ph) + Fraction(K - 1, 2)) / K
            q -= q.numerator // q.denominator
            p2, m = substitution_offsets(K, q)
            if p2 != ph:
                raise AssertionError("phase class arithmetic is inconsistent")
            opts.append((q, m))
        per_axis.append(sorted(opts))
    out = []
    for combo in itertools.product(*per_axis):
        out.append((tuple(c[0] for c in combo), tuple(c[1] for c in combo)))
    return out


def _inverse_images(R: SubstitutionRule) -> dict:
    inv: dict = {}
    for c in range(len(R.alphabet)):
        inv.setdefault(R.image_codes(c).tobytes() if R.dim > 1 else R.code_images[c], []).append(c)
    return {k: tuple(v) for k, v in inv.items()}


class _Candidates:
    """Candidate letter codes for cell y of a pre-image in one phase class."""

    def __init__(self, R, value, m, alpha):
        self.R = R
        self.value = value
        self.m = m
        self.alpha = alpha
        self.inv = _inverse_images(R)
        self.cache: dict = {}

    def __call__(self, y) -> tuple:
        y = tuple(y)
        hit = self.cache.get(y)
        if hit is not None:
            return hit
        K = self.R.k
        origin = tuple(k * v + mm for k, v, mm in zip(K, y, self.m))
        cells = Box(origin, tuple(o + k - 1 for o, k in zip(origin, K))).cells()
        block = bytes(self.alpha.index(self.value(c)) for c in cells)
        hit = self.inv.get(block, ())
        self.cache[y] = hit
        return hit


# -- exact 1-D engine for eventually periodic anchors -------------------------------------------

def _legal_graph(lang: Language, w: int):
    words = lang.codes((w,))
    succ: dict = {}
    for u in words:
        succ.setdefault(u[:-1], []).append(u[1:])
        succ.setdefault(u[1:], succ.get(u[1:], []))
    for k in succ:
        succ[k] = sorted(set(succ[k]))
    return succ


def _path_counts(nodes, succ):
    """Number of infinite forward paths from each node (INF when unbounded), and
    for nodes on a simple cycle the cycle itself (for listing)."""
    G = nx.DiGraph()
    G.add_nodes_from(nodes)
    for v in nodes:
        for u in succ(v):
            G.add_edge(v, u)
    cond = nx.condensation(G)
    count: dict = {}
    cycle_of: dict = {}
    for comp in reversed(list(nx.topological_sort(cond))):
        X = cond.nodes[comp]["members"]
        internal = sum(1 for v in X for u in G.successors(v) if u in X)
        cyclic = internal > 0
        if cyclic:
            live_exit = any(count[u] != 0 for v in X for u in G.successors(v) if u not in X)
            if internal != len(X) or live_exit:
                for v in X:
                    count[v] = INF
            else:
                start = min(X)
                cyc = [start]
                while True:
                    nxt = next(u for u in G.successors(cyc[-1]) if u in X)
                    if nxt == start:
                        break
                    cyc.append(nxt)
                for i, v in enumerate(cyc):
                    count[v] = 1
                    cycle_of[v] = cyc[i:] + cyc[:i]
        else:
            (v,) = X
            total = 0
            for u in G.successors(v):
                total += count[u]
            count[v] = total
    return count, cycle_of, G


def _list_paths(v, G, count, cycle_of):
    """All infinite paths from v as (prefix nodes, cycle nodes); requires finite count."""
    if v in cycle_of:
        return [([], cycle_of[v])]
    out = []
    for u in sorted(G.successors(v)):
        if count[u]:
            for pre, cyc in _list_paths(u, G, count, cycle_of):
                out.append(([v] + pre, cyc))
    return out


def _tail_range(ep: EventuallyPeriodic, K: int, m: int):
    """Q-cells y < Y0 see only the left tail of P, cells y >= Y1 only the right tail."""
    Y0 = (ep.start - m) // K - 1
    Y1 = -((m - ep.stop) // K) + 1
    return Y0, max(Y1, Y0)


def _sft_class(R, ep: EventuallyPeriodic, m: int, succ, alpha, limit: int):
    """Count (and list when finite) the pre-images in one class of an eventually
    periodic anchor, over the shift of finite type given by ``succ``."""
    K = R.k[0]
    cand = _Candidates(R, lambda c: ep.value(c[0]), (m,), alpha)
    states = sorted(succ)
    Y0, Y1 = _tail_range(ep, K, m)
    pl, pr = len(ep.left), len(ep.right)

    def ok(s, y):
        return s[0] in cand((y,))

    # left part: backward paths from position Y0-1 through positions y < Y0 (label y mod pl)
    pred: dict = {}
    for s in states:
        for t in succ[s]:
            pred.setdefault(t, []).append(s)
    lnodes = [(s, r) for r in range(pl) for s in states if ok(s, Y0 - pl + (r - (Y0 - pl)) % pl)]
    lset = set(lnodes)

    def lsucc(v):
        s, r = v
        return [u for u in ((p, (r - 1) % pl) for p in pred.get(s, ())) if u in lset]

    lcount, lcyc, LG = _path_counts(lnodes, lsucc)
    rnodes = [(s, r) for r in range(pr) for s in states if ok(s, Y1 + (r - Y1) % pr)]
    rset = set(rnodes)

    def rsucc(v):
        s, r = v
        return [u for u in ((t, (r + 1) % pr) for t in succ[s]) if u in rset]

    rcount, rcyc, RG = _path_counts(rnodes, rsucc)
    ra = (Y0 - 1) % pl
    rb = Y1 % pr
    starts = [s for s in states if (s, ra) in lset and lcount[(s, ra)]]
    ends = {s for s in states if (s, rb) in rset and rcount[(s, rb)]}
    # middle: positions Y0 .. Y1-1
    combos = []  # (a, middle states, b)
    total = 0
    for a in starts:
        layer = {a: [[]]}
        for y in range(Y0, Y1):
            nxt: dict = {}
            for s, paths in layer.items():
                for t in succ[s]:
                    if ok(t, y):
                        nxt.setdefault(t, []).extend(p + [t] for p in paths)
            layer = nxt
            if sum(len(p) for p in layer.values()) > limit:
                return INF, None
        for s, paths in layer.items():
            for b in succ[s]:
                if b in ends:
                    c = lcount[(a, ra)] * rcount[(b, rb)] * len(paths)
                    total += c
                    if c:
                        for p in paths:
                            combos.append((a, p, b))
    if total == INF or total > limit:
        return total, None
    elements = []
    for a, mid, b in combos:
        for lpre, lc in _list_paths((a, ra), LG, lcount, lcyc):
            for rpre, rc in _list_paths((b, rb), RG, rcount, rcyc):
                elements.append(_assemble(alpha, Y0, Y1, lpre, lc, mid, rpre, rc))
    return total, elements


def _assemble(alpha, Y0, Y1, lpre, lcyc, mid, rpre, rcyc) -> EventuallyPeriodic:
    L = alpha.letters
    yl = Y0 - 1 - len(lpre)  # left cycle holds for y <= yl
    cl = len(lcyc)
    left = tuple(L[lcyc[(yl - r) % cl][0][0]] for r in range(cl))
    yr = Y1 + len(rpre)  # right cycle holds for y >= yr
    cr = len(rcyc)
    right = tuple(L[rcyc[(r - yr) % cr][0][0]] for r in range(cr))
    middle = [L[s[0]] for s, _ in reversed(lpre)] + [L[s[0]] for s in mid] + [L[s[0]] for s, _ in rpre]
    return EventuallyPeriodic(left, yl + 1, tuple(middle), right).normalise()


def _ep_fibre(rule, R, P, ep, classes, mode, cap, lengths):
    alpha = rule.alphabet
    lang = Language.of(rule, mode, cap)
    history = []
    prev_total = None
    for w in lengths:
        succ = _legal_graph(lang, w)
        total = 0
        per_class = []
        found = []
        for phase, m in classes:
            cnt, els = _sft_class(R, ep, m[0], succ, alpha, MAX_ELEMENTS)
            per_class.append(cnt)
            total += cnt
            if els is not None:
                found.append((phase, m, els))
        history.append({"word_length": w, "count": "infinite" if total == INF else total})
        if total != INF and total == prev_total:
            return w, per_class, found, history
        prev_total = total
    raise NotStabilized(f"pre-image count did not stabilise up to word length {lengths[-1]}", lower_bound=None)


# -- windowed engine ---------------------------------------------------------------

def _propagate_1d(cand, W: int, succ, w: int):
    """Exact projection of the window constraints onto each cell of [-W, W]:
    letters occurring in some assignment whose (w)-windows are all legal."""
    lo, hi = -W, W - w + 2
    if hi < lo:
        return {}
    states = list(succ)
    valid = {}
    for y in range(lo, hi + 1):
        allowed = [set(cand((y + i,))) for i in range(w - 1)]
        valid[y] = {s for s in states if all(s[i] in allowed[i] for i in range(w - 1))}
    fwd = {lo: valid[lo]}
    for y in range(lo, hi):
        fwd[y + 1] = {t for s in fwd[y] for t in succ[s]} & valid[y + 1]
    bwd = {hi: fwd[hi]}
    for y in range(hi, lo, -1):
        keep = bwd[y]
        bwd[y - 1] = {s for s in fwd[y - 1] if any(t in keep for t in succ[s])}
    dom: dict = {}
    for y in range(lo, hi + 1):
        for s in bwd[y]:
            for i in range(w - 1):
                dom.setdefault(y + i, set()).add(s[i])
    for y in range(lo, hi + w - 1):
        dom.setdefault(y, set())
    return {(y,): v for y, v in dom.items()}


def _propagate_nd(cand, W: int, legal: frozenset, size):
    box = Box.radius(W, len(size))
    dom = {y: set(cand(y)) for y in box.cells()}
    offs = list(Box.sized(size).cells())
    positions = [y for y in Box(box.lo, tuple(h - s + 1 for h, s in zip(box.hi, size))).cells()]
    words = [tuple(u) for u in legal]
    changed = True
    while changed:
        changed = False
        support = {y: set() for y in dom}
        for p in positions:
            cells = [tuple(a + b for a, b in zip(p, o)) for o in offs]
            doms = [dom[c] for c in cells]
            for u in words:
                if all(u[i] in doms[i] for i in range(len(u))):
                    for i, c in enumerate(cells):
                        support[c].add(u[i])
        for y in positions_cells(positions, offs):
            new = dom[y] & support[y]
            if new != dom[y]:
                dom[y] = new
                changed = True
    return dom


def positions_cells(positions, offs):
    seen = set()
    for p in positions:
        for o in offs:
            c = tuple(a + b for a, b in zip(p, o))
            if c not in seen:
                seen.add(c)
                yield c


def symbolic_preimage(rule: SubstitutionRule, P: LatticePattern, n: int):
    """A pattern V with sigma^n(V) = P built from the fixed point under P, or None."""
    src = P.source
    if not isinstance(src, SubstitutiveSource) or src.rule.base is not rule.base or not rule.is_block:
        return None
    F, u = fixed_decomposition(P)
    n_fix = src.power * src.rule.power_of_base
    n_app = n * rule.power_of_base
    j = (-n_app) % n_fix
    G = substitute_pattern(rule.base, F, j) if j else F
    K = rule.power(n).k
    return pattern_translate(G, tuple(Fraction(v) / k for v, k in zip(u, K)))


def _local_cutting_certificate(rule, P, n, mode, cap):
    """Radius r at which every patch of P itself has exactly one centre cutting."""
    from .cutting import cutting_table

    holder = SimpleNamespace(alphabet=rule.alphabet)
    for r in LOCAL_CUTTING_RADII:
        try:
            own, _ = pattern_language_codes(P, (2 * r + 1,) * P.dim, holder, cap)
        except ValidationError:
            return None
        table = cutting_table(rule, n, r, mode, cap)
        counts = {len(table.get(p, {})) for p in own}
        if counts == {1}:
            return r
        if 0 in counts:
            return None
    return None


def _windowed_fibre(rule, R, P, n, classes, mode, cap, schedule):
    d = P.dim
    alpha = rule.alphabet
    lang = Language.of(rule, mode, cap)
    V = symbolic_preimage(rule, P, n)
    if V is None:
        raise UnsupportedSource("no exact pre-image engine for this anchor (needs an eventually periodic 1-D "
                                "description or a substitutive source of the same rule)")
    info = [PhaseClass(ph, m) for ph, m in classes]
    r_local = _local_cutting_certificate(rule, P, n, mode, cap)
    if r_local is not None:
        for c in info:
            if c.phase == V.phase:
                c.status, c.count = "unique", 1
            else:
                c.status = "eliminated"
                c.detail["by"] = "local_cuttings"
        cert = {"method": "local_cuttings", "complete": True, "radius": r_local,
                "notes": "every patch of the anchor of this radius has exactly one centre cutting"}
        return [V], info, cert
    w = 12 if d == 1 else 2
    succ = _legal_graph(lang, w) if d == 1 else None
    legal = lang.codes((2,) * d) if d > 1 else None
    value = lambda c: value_at(P, c)
    pinned_at = []
    for W in schedule:
        for c in info:
            if c.status == "eliminated":
                continue
            cand = _Candidates(R, value, c.m, alpha)
            dom = _propagate_1d(cand, W, succ, w) if d == 1 else _propagate_nd(cand, W, legal, (2,) * d)
            if any(not v for v in dom.values()):
                c.status = "eliminated"
                c.detail["by"] = "window_propagation"
                c.detail["window_radius"] = W
                continue
            if c.phase == V.phase:
                core = Box.radius(W // 2, d)
                vals = {y: alpha.index(value_at(V, y)) for y in core.cells()}
                if all(dom[y] == {vals[y]} for y in core.cells()):
                    c.status, c.count = "pinned", 1
                    c.detail["core_radius"] = W // 2
                    c.detail["window_radius"] = W
        others = [c for c in info if c.phase != V.phase and c.status != "eliminated"]
        if any(c.phase == V.phase and c.status == "pinned" for c in info) and not others:
            pinned_at.append(W)
            if len(pinned_at) >= 2:
                cert = {"method": "window_propagation", "complete": False, "window_radius": W,
                        "stable_from": pinned_at[0],
                        "notes": "other classes eliminated soundly; the remaining class is pinned to the "
                                 "symbolic pre-image on the core of two successive windows"}
                return [V], info, cert
        else:
            pinned_at = []
    raise NotStabilized("windowed fibre search did not stabilise", lower_bound=1)


# -- public entry point ------------------------------------------------------------

def _canonical_key(Q: LatticePattern, alpha):
    box = Box.radius(2, Q.dim)
    return (Q.phase, Q.shift, tuple(alpha.index(value_at(Q, x)) for x in box.cells()))


def enumerate_fibre(rule: SubstitutionRule, P: LatticePattern, n: int = 1, window_schedule=DEFAULT_WINDOW_SCHEDULE,
                    mode=ADMITTED, cap: int = DEFAULT_SATURATION_DEPTH, verify_radius: int = VERIFY_RADIUS) -> Fibre:
    """All Q in the space with sigma^n(Q) = P."""
    if n < 1:
        raise ValidationError("power must be >= 1")
    if not rule.is_block:
        raise UnsupportedSource("fibres need a constant-length or block rule")
    if P.dim != rule.dim:
        raise ValidationError("pattern and rule dimensions differ")
    R = rule.power(n)
    classes = phase_classes(R, P.phase)
    ep = eventually_periodic_form(P) if P.dim == 1 else None
    if ep is not None:
        lengths = tuple(w for w in SFT_WORD_LENGTHS if w <= max(window_schedule))
        w, per_class, found, history = _ep_fibre(rule, R, P, ep, classes, mode, cap, lengths)
        info = []
        elements = []
        by_phase = {(ph, m): els for ph, m, els in found}
        for (ph, m), cnt in zip(classes, per_class):
            c = PhaseClass(ph, m, "eliminated" if cnt == 0 else "listed", cnt)
            info.append(c)
            for e in by_phase.get((ph, m), []):
                elements.append(ep_to_pattern(e, ph, rule.alphabet))
        cert = {"method": "legal_word_graph", "complete": True, "word_length": w, "history": history,
                "notes": "pre-images are exactly the bi-infinite walks of the legal word graph at this length; "
                         "the count was unchanged at the previous length"}
    else:
        elements, info, cert = _windowed_fibre(rule, R, P, n, classes, mode, cap, window_schedule)
    # verification: sigma^n(Q) = P (exactly where possible, and on a window), pairwise distinct
    box = Box.radius(verify_radius, P.dim)
    target = extract_box(P, box)
    for Q in elements:
        img = substitute_pattern(rule, Q, n)
        res = pattern_equal(img, P)
        if not res.value or extract_box(substitute_pattern(rule, Q, n, normalise=False), box) != target:
            raise ValidationError(f"fibre element {Q!r} does not substitute to the anchor")
    alpha = rule.alphabet
    elements.sort(key=lambda Q: _canonical_key(Q, alpha))
    for A, B in itertools.combinations(elements, 2):
        if A.phase == B.phase and pattern_equal(A, B).value:
            raise ValidationError("fibre contains duplicate elements")
    cert["verified_radius"] = verify_radius
    return Fibre(rule.name, n, P, elements, info, cert)


__all__ = ["Fibre", "PhaseClass", "enumerate_fibre", "phase_classes", "symbolic_preimage"]
