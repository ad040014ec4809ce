"""The acceptance matrix: ten criteria run against the built-in corpus.

Each criterion returns a list of named checks (observed against expected).
A criterion passes when every check holds and it finished within its time
budget.  ``run_suite`` is shared by ``substrate verify`` and the test-suite.

Fault injection (``faults``) perturbs one engine output before comparison so
the runner can be seen to fail loudly; it never touches the expected side.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import oracles
from .corpus import default_mode, named_pattern, named_patterns
from .lattice import PeriodGroup, det, index_of_inflated, snf_diagonal
from .patches import Box, Patch, SparsePatch, patch_glue, patch_restrict, patch_shift, patch_transform
from .patterns import pattern_equal, value_at
from .rules import builtin_rule, substitute_patch
from .subst import ADMITTED, Language, fixed_points

FAULTS = ("wrong_index", "wrong_radius", "wrong_area")


@dataclass
class Check:
    name: str
    ok: bool
    observed: object = None
    expected: object = None

    def to_json(self):
        return {"check": self.name, "ok": self.ok, "observed": _plain(self.observed), "expected": _plain(self.expected)}


def _plain(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return str(v)


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list
    seconds: float
    limit: float | None
    error: str | None = None

    @property
    def in_time(self) -> bool:
        return self.limit is None or self.seconds <= self.limit

    @property
    def passed(self) -> bool:
        return self.error is None and self.in_time and all(c.ok for c in self.checks)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f", limit {self.limit:g} s" if self.limit is not None else ""
        extra = ""
        if self.error:
            extra = f" error: {self.error}"
        elif not self.passed:
            failed = [c.name for c in self.checks if not c.ok]
            shown = ", ".join(failed[:3]) + (f" (+{len(failed) - 3} more)" if len(failed) > 3 else "")
            extra = f" failed: {shown if failed else 'time budget'}"
        return f"criterion {self.number:>2} {status} {self.title} ({self.seconds:.2f} s{budget}, {len(self.checks)} checks){extra}"

    def to_json(self, timing: bool = False):
        out = {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "time_limit_s": self.limit,
            "checks_run": len(self.checks),
            "failed_checks": [c.to_json() for c in self.checks if not c.ok],
        }
        # keep reports small: list individual checks only when there are few
        if len(self.checks) <= 40:
            out["checks"] = [c.to_json() for c in self.checks]
        if self.error:
            out["error"] = self.error
        if timing:
            out["seconds"] = round(self.seconds, 3)
            out["within_time_limit"] = self.in_time
        return out


@dataclass
class Context:
    seed: int = 0
    faults: frozenset = frozenset()
    rules: frozenset | None = None  # restrict rule sweeps (criteria 4, 6, 9)
    frozen: dict = field(default_factory=oracles.frozen_values)

    def wants(self, rule_name: str) -> bool:
        return self.rules is None or rule_name in self.rules

    def rng(self, salt: int) -> random.Random:
        return random.Random(self.seed * 1000003 + salt)


def _index(ctx: Context, K, L, n):
    v = index_of_inflated(K, L, n)
    return v + 1 if "wrong_index" in ctx.faults else v


# -- 1 ---------------------------------------------------------------------------

def criterion_mask5(ctx: Context) -> list:
    from .recog.fibre import enumerate_fibre
    from .recog.lipower import li_fixing_power
    from .recog.periods import compute_periods

    rule = builtin_rule("mask5")
    P_A, P_B = named_pattern("mask5", "P_A"), named_pattern("mask5", "P_B")
    oracle = ctx.frozen["periodic_fibres"]
    checks = [Check("li_fixing_power", (p := li_fixing_power(rule).power) == 2, p, 2)]
    fB1 = enumerate_fibre(rule, P_B, 1)
    checks.append(Check("|sigma^-1(P_B)|", fB1.count == 1 == oracle["mask5/P_B/1"], fB1.count, 1))
    eq = pattern_equal(fB1.elements[0], P_A) if fB1.count else None
    checks.append(Check("sigma^-1(P_B) = {P_A} (certified)", bool(eq and eq.value and eq.certified),
                        eq.to_json() if eq else None, "equal, certified"))
    K_A, K_B = compute_periods(P_A), compute_periods(P_B)
    i2 = _index(ctx, K_A, [[5]], 2)
    checks.append(Check("index_of_inflated(K, 5, 2)", i2 == 25, i2, 25))
    for name, P, K in (("P_A", P_A, K_A), ("P_B", P_B, K_B)):
        f = enumerate_fibre(rule, P, 2)
        idx = _index(ctx, K, [[5]], 2)
        checks.append(Check(f"|sigma^-2({name})| = [L^2 K : K]", f.count == idx == oracle[f"mask5/{name}/2"],
                            [f.count, idx], [oracle[f"mask5/{name}/2"]] * 2))
    fA1 = enumerate_fibre(rule, P_A, 1)
    i1 = _index(ctx, K_A, [[5]], 1)
    checks.append(Check("|sigma^-1(P_A)| (phase-enumeration oracle)", fA1.count == oracle["mask5/P_A/1"],
                        fA1.count, oracle["mask5/P_A/1"]))
    checks.append(Check("[L K_PA : K_PA] = 5 differs from the fibre size at n = 1", i1 == 5 and fA1.count != i1,
                        [fA1.count, i1], ["!= 5", 5]))
    return checks


# -- 2 ---------------------------------------------------------------------------

def criterion_half_and_half(ctx: Context) -> list:
    from .recog.fibre import enumerate_fibre
    from .recog.uc import uc_verify

    rule = builtin_rule("half_and_half")
    mode = default_mode("half_and_half")
    oracle = ctx.frozen["periodic_fibres"]
    checks = []
    for name, expected in (("all_b", oracle["half_and_half/all_b/1"]), ("all_w", oracle["half_and_half/all_w/1"]), ("T", 1)):
        P = named_pattern("half_and_half", name)
        f = enumerate_fibre(rule, P, 1, mode=mode)
        checks.append(Check(f"|sigma^-1({name})|", f.count == expected, f.count, expected))
        rep = uc_verify(rule, P, 1, mode=mode, fibre=f)
        idx = rep.index + 1 if "wrong_index" in ctx.faults else rep.index
        checks.append(Check(f"uc_verify({name})", rep.bijection and idx == f.count, [rep.bijection, idx], [True, f.count]))
    return checks


# -- 3 ---------------------------------------------------------------------------

def criterion_thue_morse(ctx: Context) -> list:
    from .recog.cutting import recognisability_radius
    from .recog.fibre import enumerate_fibre
    from .recog.periods import compute_periods

    rule = builtin_rule("thue_morse")
    F = named_pattern("thue_morse", "fixed")
    K = compute_periods(F)
    cert = K.certificate
    checks = [Check("periods of the sigma^2-fixed point = {0}, certified complete",
                    not K.lattice and not K.subspace and cert.kind == "certified" and cert.complete,
                    K.to_json(), "trivial, certified")]
    rep = recognisability_radius(rule)
    expected = ctx.frozen["recognisability_radius"]["thue_morse"]
    r = rep.radius + 1 if "wrong_radius" in ctx.faults and rep.radius is not None else rep.radius
    checks.append(Check("recognisability_radius = oracle r_TM", r == expected, r, expected))
    for name in ("tm_aa", "tm_ab", "tm_ba", "tm_bb"):
        f = enumerate_fibre(rule, named_pattern("thue_morse", name), 1)
        checks.append(Check(f"|sigma^-1({name})| = 1", f.count == 1, f.count, 1))
    return checks


# -- 4 ---------------------------------------------------------------------------

SWEEP_RULES = ("thue_morse", "doubling", "half_and_half", "mask5")


def criterion_fibre_sweep(ctx: Context) -> list:
    from .recog.fibre import enumerate_fibre
    from .recog.lipower import li_fixing_power
    from .recog.periods import compute_periods

    checks = []
    for name in SWEEP_RULES:
        if not ctx.wants(name):
            continue
        rule = builtin_rule(name)
        mode = default_mode(name)
        n = li_fixing_power(rule, mode=mode).power
        # sigma^2-fixed points are sigma^n-periodic too; the sweep includes them
        for fp in fixed_points(rule, max(2, n), mode):
            K = compute_periods(fp.pattern)
            f = enumerate_fibre(rule, fp.pattern, n, mode=mode)
            idx = _index(ctx, K, [[rule.k[0]]], n)
            checks.append(Check(f"{name} {fp.seed.to_json()} (n={n})", f.count == idx, f.count, idx))
    return checks


# -- 5 ---------------------------------------------------------------------------

def _random_patch(rng, d, alphabet, lo_range=3, max_side=5):
    lo = tuple(rng.randint(-lo_range, lo_range) for _ in range(d))
    size = tuple(rng.randint(1, max_side) for _ in range(d))
    box = Box.sized(size, lo)
    return Patch(box, tuple(rng.choice(alphabet) for _ in range(len(box))))


def _random_subbox(rng, box: Box) -> Box:
    lo, hi = [], []
    for a, b in zip(box.lo, box.hi):
        x, y = sorted((rng.randint(a, b), rng.randint(a, b)))
        lo.append(x)
        hi.append(y)
    return Box(tuple(lo), tuple(hi))


def _legal_tm_patch(rng, lang, length):
    word = rng.choice(sorted(lang.codes((length,))))
    lo = rng.randint(-4, 4)
    return Patch(Box((lo,), (lo + length - 1,)), lang.rule.alphabet.decode(word))


def _agree_on(p, q, cells) -> bool:
    return all(p[c] == q[c] for c in cells)


def criterion_patch_algebra(ctx: Context, total: int = 1000) -> list:
    rng = ctx.rng(5)
    tm = Language.of(builtin_rule("thue_morse"))
    failures = []
    counts = {"restriction": 0, "shifting": 0, "transformation": 0, "glueing": 0}
    unimodular = [((1, 1), (0, 1)), ((0, -1), (1, 0)), ((2, 1), (1, 1)), ((1, 0), (-3, 1))]
    for i in range(total):
        kind = ("restriction", "shifting", "transformation", "glueing")[i % 4]
        d = 1 if i % 8 < 4 else 2
        if d == 1 and rng.random() < 0.5:
            p = _legal_tm_patch(rng, tm, rng.randint(1, 9))
        else:
            p = _random_patch(rng, d, "ab")
        counts[kind] += 1
        if kind == "restriction":
            V = _random_subbox(rng, p.box)
            U = _random_subbox(rng, V)
            ok = patch_restrict(patch_restrict(p, V), U) == patch_restrict(p, U) and patch_restrict(p, p.box) == p
        elif kind == "shifting":
            # q agrees with p on V; after shifting both by z they agree on U whenever U + z lies in V
            V = _random_subbox(rng, p.box)
            q = Patch(p.box, tuple(v if c in V else rng.choice("ab") for c, v in p.items()))
            U = _random_subbox(rng, V)
            z = tuple(rng.randint(a - u, b - w) for a, b, u, w in zip(V.lo, V.hi, U.lo, U.hi))
            Uz = U.translate(z)
            ps, qs = patch_shift(p, z), patch_shift(q, z)
            ok = V.contains_box(Uz) and _agree_on(ps, qs, U.cells())
            ok = ok and all(ps[u] == p[tuple(a + b for a, b in zip(u, z))] for u in ps.box.cells())
        elif kind == "transformation":
            if d == 1:
                L = ((rng.choice((-1, 1)),),)
                Linv = L
            else:
                L = rng.choice(unimodular)
                (a, b), (c, e) = L
                dt = a * e - b * c
                Linv = ((e * dt, -b * dt), (-c * dt, a * dt))
            q = Patch(p.box, tuple(rng.choice("ab") for _ in p.values)) if rng.random() < 0.5 else p
            tp, tq = patch_transform(p, L), patch_transform(q, L)
            back = patch_transform(tp, Linv)
            ok = back == SparsePatch(p.as_dict()) and ((p == q) == (tp == tq))
        else:
            U1, U2 = _random_subbox(rng, p.box), _random_subbox(rng, p.box)
            q = Patch(p.box, tuple(v if rng.random() < 0.85 else rng.choice("ab") for v in p.values))
            union = set(U1.cells()) | set(U2.cells())
            lhs = _agree_on(p, q, union)
            rhs = _agree_on(p, q, U1.cells()) and _agree_on(p, q, U2.cells())
            g = patch_glue(patch_restrict(p, U1), patch_restrict(p, U2))
            ok = lhs == rhs and g is not None and g.cells == {c: p[c] for c in sorted(union)}
        if not ok:
            failures.append((kind, repr(p)))
    checks = [Check(f"{k} identities", not any(f[0] == k for f in failures), f"{n} checks", "no failures") for k, n in counts.items()]
    checks.append(Check("total randomized checks", sum(counts.values()) == total, sum(counts.values()), total))
    if failures:
        checks.append(Check("first failure", False, failures[0], None))
    return checks


# -- 6 ---------------------------------------------------------------------------

AGREEMENT_SIZES = {1: 9, 2: 4}


def _image_span(rule, p: Patch, lo: tuple, size: tuple):
    """Cells of substitute_patch(p) produced by the sub-box lo..lo+size-1 of p."""
    if rule.is_block:
        k = rule.k
        return Box(tuple(a * ki for a, ki in zip(lo, k)), tuple((a + s) * ki - 1 for a, s, ki in zip(lo, size, k)))
    lens = [len(rule.images[v]) for v in p.values]
    start = sum(lens[: lo[0] - p.box.lo[0]])
    width = sum(lens[lo[0] - p.box.lo[0]: lo[0] - p.box.lo[0] + size[0]])
    return Box((start,), (start + width - 1,))


def criterion_agreement(ctx: Context, pairs: int = 200) -> list:
    checks = []
    for name in ("thue_morse", "fibonacci", "doubling", "half_and_half", "mask5", "chair"):
        if not ctx.wants(name):
            continue
        rule = builtin_rule(name)
        rng = ctx.rng(600 + len(name))
        d = rule.dim
        s = AGREEMENT_SIZES[d]
        size = (s,) * d
        lang = Language.of(rule, default_mode(name))
        words = sorted(lang.codes(size))
        patches = [Patch(Box.sized(size), rule.alphabet.decode(w)) for w in words]
        # index of sub-patches: (shape, values) -> [(patch index, lo)]
        index: dict = {}
        for i, p in enumerate(patches):
            for sub_size in Box.sized(size, (1,) * d).cells():
                for lo in Box.sized(tuple(s - t + 1 for t in sub_size)).cells():
                    sub = Box.sized(sub_size, lo)
                    index.setdefault((sub_size, tuple(p[c] for c in sub.cells())), []).append((i, lo))
        bad = 0
        for _ in range(pairs):
            i = rng.randrange(len(patches))
            p = patches[i]
            sub_size = tuple(rng.randint(1, s) for _ in range(d))
            lo = tuple(rng.randint(0, s - t) for t in sub_size)
            content = tuple(p[c] for c in Box.sized(sub_size, lo).cells())
            j, lo_q = rng.choice(index[(sub_size, content)])
            q = patches[j]
            sp, sq = substitute_patch(rule, p), substitute_patch(rule, q)
            Bp, Bq = _image_span(rule, p, lo, sub_size), _image_span(rule, q, lo_q, sub_size)
            # derivation radius c = 0 for these rules, so the shrunk box is the box itself
            ok = Bp.size == Bq.size and all(sp[a] == sq[b] for a, b in zip(Bp.cells(), Bq.cells()))
            bad += not ok
        checks.append(Check(f"{name}: {pairs} legal pairs", bad == 0, f"{bad} failures", 0))
    return checks


# -- 7 ---------------------------------------------------------------------------

def _random_invariant_lattice(rng):
    while True:
        L = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
        dt = L[0][0] * L[1][1] - L[0][1] * L[1][0]
        if dt != 0 and abs(dt) <= 6:
            break
    v = (rng.randint(-3, 3), rng.randint(-3, 3))
    Lv = (L[0][0] * v[0] + L[0][1] * v[1], L[1][0] * v[0] + L[1][1] * v[1])
    c = rng.randint(1, 4)
    # Z v + Z Lv + c Z^2 is L-invariant: L^2 v lies in Z v + Z Lv by Cayley-Hamilton
    gens = [v, Lv, (c, 0), (0, c)]
    return L, PeriodGroup(2, (), tuple(g for g in gens if any(g)))


def criterion_lattice(ctx: Context, trials: int = 50) -> list:
    rng = ctx.rng(7)
    bad_index, bad_snf = [], []
    for _ in range(trials):
        L, K = _random_invariant_lattice(rng)
        n = rng.randint(1, 2)
        got = _index(ctx, K, L, n)
        basis = [list(b) for b in K.lattice]
        want = oracles.lattice_index(L, basis, n)
        if got != want:
            bad_index.append({"L": L, "K": basis, "n": n, "engine": got, "oracle": want})
        m = rng.randint(2, 3)
        M = [[rng.randint(-6, 6) for _ in range(m)] for _ in range(m)]
        diag = snf_diagonal(M)
        dv = abs(int(det([[Fraction(x) for x in row] for row in M])))
        prod = 1
        for x in diag:
            prod *= x
        nz = [x for x in diag if x != 0]
        ok = all(b % a == 0 for a, b in zip(nz, nz[1:])) and len(nz) == len(diag) - diag.count(0)
        ok = ok and (prod == dv if dv else 0 in diag or len(diag) < m)
        if not ok:
            bad_snf.append({"M": M, "diag": diag, "det": dv})
    return [
        Check(f"index_of_inflated = lattice-point count ({trials} random L, K)", not bad_index, bad_index[:3] or "all equal", "all equal"),
        Check(f"snf diagonals divide successively ({trials} random matrices)", not bad_snf, bad_snf[:3] or "all ok", "all ok"),
    ]


# -- 8 ---------------------------------------------------------------------------

def golden_svg(name: str) -> str:
    return resources.files("substrate").joinpath(f"data/golden/{name}.svg").read_text()


def criterion_geometry(ctx: Context) -> list:
    from .geom import polygon as poly
    from .geom.inflation import builtin_geometry, iterate, support_area, verify_stone
    from .geom.svg import inflated_boundary, render_svg

    chair = builtin_geometry("chair")
    tiles = iterate(chair, None, 3)
    seed_area = chair.prototiles[chair.ids[0]].area
    area = support_area(chair, tiles)
    if "wrong_area" in ctx.faults:
        area = area + 1
    hull = poly.area(inflated_boundary(chair, chair.ids[0], 3))
    stone = verify_stone(chair)
    checks = [
        Check("chair iterate-3 tile count", len(tiles) == 64, len(tiles), 64),
        Check("chair support area = 64 area(seed) = area(L^3 seed)", area == 64 * seed_area == hull,
              [str(area), str(hull)], str(64 * seed_area)),
        Check("chair is a stone inflation", stone.stone, stone.stone, True),
    ]
    penta = builtin_geometry("penta_gaps")
    rep = verify_stone(penta)
    unc = [e["uncovered_area"] for e in rep.prototiles]
    exact = all("√5" in u for u in unc)
    checks.append(Check("pentagon reported non-stone with uncovered area in Q(sqrt5)", not rep.stone and exact, unc, "nonzero, exact in Q(sqrt5)"))
    chair_svg = render_svg(chair, iterate(chair, None, 2))
    penta_svg = render_svg(penta, iterate(penta, "up", 2), boundary=inflated_boundary(penta, "up", 2))
    checks.append(Check("chair_2.svg byte-identical to golden", chair_svg == golden_svg("chair_2"), len(chair_svg), "golden"))
    checks.append(Check("pentagon_2.svg byte-identical to golden", penta_svg == golden_svg("pentagon_2"), len(penta_svg), "golden"))
    return checks


# -- 9 ---------------------------------------------------------------------------

def _corpus_patterns(ctx: Context):
    for name in ("thue_morse", "fibonacci", "doubling", "half_and_half", "mask5", "chair"):
        if not ctx.wants(name):
            continue
        for pname, P in named_patterns(name).items():
            yield name, pname, P
        rule = builtin_rule(name)
        if rule.dim == 1:
            for fp in fixed_points(rule, 2, default_mode(name)):
                yield name, f"fixed:{fp.power}:{fp.seed.to_json()}", fp.pattern


def criterion_period_soundness(ctx: Context) -> list:
    from .recog.periods import certify_period, compute_periods

    checks = []
    verified = 0
    for name, pname, P in _corpus_patterns(ctx):
        K = compute_periods(P)
        gens = [tuple(g) for g in K.lattice]
        vectors = set(gens)
        for a in gens:
            for b in gens:
                vectors.add(tuple(x + y for x, y in zip(a, b)))
        falsified = []
        for g in sorted(vectors):
            if not any(g):
                continue
            if K.certificate.kind != "certified":
                c = certify_period(P, g)
                if c.value is not True:
                    continue
                base = c.radius or 1
            else:
                base = certify_period(P, g).radius or 1
            R = 10 * max(base, max(abs(x) for x in g), 4 if P.dim == 1 else 2)
            box = Box.radius(R, P.dim)
            for x in box.cells():
                y = tuple(a + b for a, b in zip(x, g))
                if value_at(P, x) != value_at(P, y):
                    falsified.append((g, x))
                    break
            verified += 1
        checks.append(Check(f"{name}/{pname}: {len(vectors)} period vectors re-verified on 10x windows", not falsified,
                            falsified[:2] or "none falsified", "none falsified"))
    checks.append(Check("certified periods re-verified", verified > 0, verified, "> 0"))
    return checks


# -- 10 --------------------------------------------------------------------------

def criterion_inverse(ctx: Context) -> list:
    from .ldmap import find_inverse_rule, subdivision_as_ld

    r_tm = ctx.frozen["recognisability_radius"]["thue_morse"]
    S = subdivision_as_ld(builtin_rule("thue_morse"), 1)
    res = find_inverse_rule(S, radius_cap=r_tm)
    checks = [Check("thue_morse subdivision has a local inverse of radius <= r_TM", res.found and res.radius <= r_tm,
                    res.radius, f"<= {r_tm}")]
    S5 = subdivision_as_ld(builtin_rule("mask5"), 1, ADMITTED)
    res5 = find_inverse_rule(S5, radius_cap=r_tm + 2)
    wit = (res5.witness or {}).get("periodic")
    checks.append(Check("mask5 subdivision: no inverse, periodic witness returned", not res5.found and wit is not None,
                        wit["pattern"] if wit else res5.to_json()["result"], "periodic witness"))
    if wit:
        checks.append(Check("witness has a nonzero discrete period and a fibre of size >= 2",
                            bool(wit["periods"]["lattice"]) and wit["fibre_count"] >= 2,
                            [wit["periods"]["lattice"], wit["fibre_count"]], ["nonempty", ">= 2"]))
    return checks


# -- runner ----------------------------------------------------------------------

CRITERIA = {
    1: ("MASK5 fibres and LI-fixing power", criterion_mask5, 10.0, {"mask5", "fibre"}),
    2: ("half-and-half fibres and UC", criterion_half_and_half, 5.0, {"half_and_half", "fibre", "uc"}),
    3: ("Thue-Morse periods, recognisability, singleton fibres", criterion_thue_morse, 20.0, {"thue_morse", "recognise"}),
    4: ("fibre size = [L^n K : K] sweep", criterion_fibre_sweep, 30.0, set(SWEEP_RULES) | {"fibre", "sweep"}),
    5: ("patch algebra (1000 randomized checks)", criterion_patch_algebra, None, {"patches", "thue_morse"}),
    6: ("agreement propagation (200 pairs per rule)", criterion_agreement, None,
        {"thue_morse", "fibonacci", "doubling", "half_and_half", "mask5", "chair", "agreement"}),
    7: ("lattice index against point counting", criterion_lattice, None, {"lattice"}),
    8: ("geometry: stone identity, pentagon gaps, golden SVGs", criterion_geometry, None, {"chair", "penta_gaps", "geometry"}),
    9: ("period-certificate soundness", criterion_period_soundness, None,
        {"thue_morse", "fibonacci", "doubling", "half_and_half", "mask5", "chair", "periods"}),
    10: ("local inverse of subdivision", criterion_inverse, None, {"thue_morse", "mask5", "mld"}),
}

RULE_TAGS = {"thue_morse", "fibonacci", "doubling", "half_and_half", "mask5", "chair", "penta_gaps"}


def select(only) -> tuple[list, frozenset | None]:
    """Criterion numbers and rule filter from tokens such as ["mask5"], ["1", "4"] or ["geometry"]."""
    if not only:
        return sorted(CRITERIA), None
    nums, rules = set(), set()
    for tok in only:
        for t in str(tok).split(","):
            t = t.strip()
            if not t:
                continue
            if t.isdigit():
                if int(t) not in CRITERIA:
                    raise ValueError(f"no criterion {t}")
                nums.add(int(t))
                continue
            hit = [n for n, c in CRITERIA.items() if t in c[3]]
            if not hit:
                raise ValueError(f"--only {t!r} matches no criterion")
            nums.update(hit)
            if t in RULE_TAGS:
                rules.add(t)
    return sorted(nums), (frozenset(rules) if rules else None)


def run_criterion(number: int, ctx: Context | None = None) -> CriterionResult:
    ctx = ctx or Context()
    title, fn, limit, _ = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        checks = fn(ctx)
        error = None
    except Exception as exc:  # a crash is a failure of the criterion, reported by name
        checks, error = [], f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, title, checks, time.perf_counter() - t0, limit, error)


@dataclass
class SuiteResult:
    results: list
    seed: int
    faults: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self, timing: bool = False):
        out = {
            "verdict": "pass" if self.passed else "fail",
            "seed": self.seed,
            "criteria": [r.to_json(timing) for r in self.results],
            "failed": [r.number for r in self.results if not r.passed],
        }
        if self.faults:
            out["injected_faults"] = list(self.faults)
        return out


def run_suite(only=None, seed: int = 0, faults=(), echo=None) -> SuiteResult:
    bad = [f for f in faults if f not in FAULTS]
    if bad:
        raise ValueError(f"unknown fault(s) {bad}; known: {list(FAULTS)}")
    numbers, rules = select(only)
    ctx = Context(seed=seed, faults=frozenset(faults), rules=rules)
    results = []
    for n in numbers:
        res = run_criterion(n, ctx)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return SuiteResult(results, seed, tuple(faults))


__all__ = ["CRITERIA", "FAULTS", "Check", "Context", "CriterionResult", "SuiteResult", "run_criterion", "run_suite", "select"]
