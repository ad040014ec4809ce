"""Command-line front end: ``substrate <command> [options]``.

Every command prints one JSON report (see ``report.py``) to ``--out`` or
stdout, except ``render`` which writes SVG.  Exit codes: 0 success,
1 a checked claim is false (uc-verify, verify), 2 invalid input,
3 inconclusive within the caps (a partial report is still written).
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .errors import (
    ConfigRadiusUnstable,
    NotStabilized,
    SaturationCapExceeded,
    SubstrateError,
    UCViolation,
    ValidationError,
)
from .report import (
    EXIT_CHECK_FAILED,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_VALIDATION,
    dumps,
    make_report,
    rule_digest,
)

COMMANDS = (
    "info", "language", "complexity", "primitivity", "fixed-points", "periods", "fibre",
    "recognise", "li-power", "uc-verify", "mld-check", "render", "verify",
)
PATTERN_COMMANDS = ("periods", "fibre", "uc-verify")
DEFAULT_CAPS = {"saturation_depth": 12, "recognisability": 64, "window_schedule": (8, 16, 32, 64, 128, 256)}
LIST_LIMIT = 2000

WORKSPACE_KEYS = {"rule", "mode", "patterns", "power", "caps", "output"}
CAP_KEYS = {"saturation_depth", "recognisability", "window_schedule"}
OUTPUT_KEYS = {"report", "svg"}


class Inconclusive(Exception):
    """Raised by a command that produced a partial result within its caps."""

    def __init__(self, reason: str, message: str, result=None):
        super().__init__(message)
        self.reason = reason
        self.result = result


class CheckFailed(Exception):
    def __init__(self, reason: str, message: str, result=None):
        super().__init__(message)
        self.reason = reason
        self.result = result


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- workspace -------------------------------------------------------------------

def _positive_int(name, v) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ValidationError(f"{name} must be a positive integer, got {v!r}")
    return v


def parse_schedule(text) -> tuple:
    """'8..256' (doubling), '8,16,32' or a list of ints."""
    if isinstance(text, (list, tuple)):
        vals = list(text)
    elif isinstance(text, str) and ".." in text:
        lo, hi = text.split("..", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ValidationError(f"bad window schedule {text!r}") from None
        if lo < 1 or hi < lo:
            raise ValidationError(f"bad window schedule {text!r}")
        vals = []
        w = lo
        while w <= hi:
            vals.append(w)
            w *= 2
    else:
        try:
            vals = [int(x) for x in str(text).split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"bad window schedule {text!r}") from None
    vals = [_positive_int("window size", v) for v in vals]
    if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValidationError("window schedule must be a nonempty increasing list")
    return tuple(vals)


def load_workspace(path: str) -> dict:
    """Read and validate a workspace TOML (schema in docs/config.md)."""
    from .rules import load_toml

    data = load_toml(path)
    unknown = set(data) - WORKSPACE_KEYS
    if unknown:
        raise ValidationError(f"{path}: unknown workspace keys {sorted(unknown)}")
    ws = {}
    if "rule" in data:
        if not isinstance(data["rule"], str):
            raise ValidationError("workspace 'rule' must be a string")
        ref = data["rule"]
        if ref.endswith(".toml") and not os.path.isabs(ref):
            ref = os.path.join(os.path.dirname(os.path.abspath(path)), ref)
        ws["rule"] = ref
    if "mode" in data:
        if not isinstance(data["mode"], str):
            raise ValidationError("workspace 'mode' must be a string")
        ws["mode"] = data["mode"]
    if "patterns" in data:
        pats = data["patterns"]
        if not isinstance(pats, list) or not all(isinstance(p, str) for p in pats):
            raise ValidationError("workspace 'patterns' must be a list of strings")
        ws["patterns"] = pats
    if "power" in data:
        ws["power"] = _positive_int("power", data["power"])
    caps = data.get("caps", {})
    if not isinstance(caps, dict) or set(caps) - CAP_KEYS:
        raise ValidationError(f"[caps] accepts only {sorted(CAP_KEYS)}")
    if "saturation_depth" in caps:
        ws["saturation_cap"] = _positive_int("caps.saturation_depth", caps["saturation_depth"])
    if "recognisability" in caps:
        ws["recognisability_cap"] = _positive_int("caps.recognisability", caps["recognisability"])
    if "window_schedule" in caps:
        ws["window_schedule"] = parse_schedule(caps["window_schedule"])
    out = data.get("output", {})
    if not isinstance(out, dict) or set(out) - OUTPUT_KEYS:
        raise ValidationError(f"[output] accepts only {sorted(OUTPUT_KEYS)}")
    for k in OUTPUT_KEYS & set(out):
        if not isinstance(out[k], str):
            raise ValidationError(f"output.{k} must be a path string")
        ws[f"out_{k}"] = out[k]
    return ws


# -- resolution of rules, modes, patterns ------------------------------------------

def load_symbolic(ref: str):
    from .rules import GEOMETRIC_ONLY, load_rule

    if ref in GEOMETRIC_ONLY:
        raise ValidationError(f"{ref} is a geometric rule; only 'render' and 'info' accept it")
    return load_rule(ref)


def load_geometric(ref: str):
    from .geom.inflation import GEOMETRIC_RULES, builtin_geometry, geometry_from_mapping
    from .rules import load_toml

    if ref in GEOMETRIC_RULES:
        return builtin_geometry(ref)
    if ref.endswith(".toml"):
        data = load_toml(ref)
        if data.get("kind") != "geometric":
            raise ValidationError(f"{ref}: render needs a rule file with kind = \"geometric\"")
        return geometry_from_mapping(data, data.get("name"))
    raise ValidationError(f"no geometric rule {ref!r}; known: {sorted(GEOMETRIC_RULES)} or a .toml file")


def resolve_pattern(rule, ref: str, mode=None):
    """Named corpus pattern, fixed:<i>, constant:<letter> or periodic:<a,b,...>."""
    from .corpus import named_patterns
    from .patterns import constant_pattern, periodic_pattern
    from .subst import ADMITTED, fixed_points

    named = named_patterns(rule.name) if _is_builtin(rule) else {}
    if ref in named:
        return named[ref]
    kind, _, arg = ref.partition(":")
    if kind == "fixed":
        try:
            i = int(arg)
        except ValueError:
            raise ValidationError(f"fixed:<index> expects an integer, got {arg!r}") from None
        fps = fixed_points(rule, 2, mode if mode is not None else ADMITTED)
        if not 0 <= i < len(fps):
            raise ValidationError(f"fixed:{i} out of range; {len(fps)} fixed points (see fixed-points)")
        return fps[i].pattern.with_name(ref)
    if kind == "constant":
        if arg not in rule.alphabet:
            raise ValidationError(f"letter {arg!r} not in alphabet {list(rule.alphabet)}")
        return constant_pattern(arg, rule.dim, alphabet=rule.alphabet, name=ref)
    if kind == "periodic":
        if rule.dim != 1:
            raise ValidationError("periodic:<word> patterns are 1-D")
        letters = arg.split(",") if "," in arg else list(arg)
        bad = [a for a in letters if a not in rule.alphabet]
        if not letters or bad:
            raise ValidationError(f"periodic word {arg!r} uses letters outside the alphabet")
        return periodic_pattern(letters, alphabet=rule.alphabet, name=ref)
    known = sorted(named) + ["fixed:<i>", "constant:<letter>", "periodic:<word>"]
    raise ValidationError(f"unknown pattern {ref!r} for rule {rule.name}; known: {known}")


def _is_builtin(rule) -> bool:
    """The corpus names patterns only for the built-in rule objects, not for files reusing a name."""
    from .rules import BUILTIN_RULES, GEOMETRIC_ONLY, builtin_rule

    return rule.name in BUILTIN_RULES and rule.name not in GEOMETRIC_ONLY and rule is builtin_rule(rule.name)


def resolve_mode(rule, text: str | None):
    from .corpus import default_mode
    from .subst import ADMITTED, HullOfPattern

    if text in (None, "default"):
        return default_mode(rule.name) if _is_builtin(rule) else ADMITTED
    if text == "admitted":
        return ADMITTED
    if text.startswith("hull:"):
        return HullOfPattern(resolve_pattern(rule, text[5:], ADMITTED))
    raise ValidationError(f"mode must be 'default', 'admitted' or 'hull:<pattern>', got {text!r}")


def workers() -> int:
    raw = os.environ.get("SUBSTRATE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"SUBSTRATE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"SUBSTRATE_THREADS must be a positive integer, got {raw!r}")
    return n


def _map(fn, items):
    """Order-preserving map, parallel up to SUBSTRATE_THREADS workers."""
    items = list(items)
    n = min(workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# -- command implementations -------------------------------------------------------
# each returns (result, certificates, uncertified-paths)

def _word_json(rule, images):
    if rule.dim == 1:
        return [str(a) for a in images]
    return [[str(a) for a in row] for row in images]


def cmd_info(ctx):
    from .corpus import named_patterns
    from .geom.inflation import GEOMETRIC_RULES
    from .rules import GEOMETRIC_ONLY, is_primitive

    ref = ctx.rule_ref
    if ref in GEOMETRIC_ONLY or (ref.endswith(".toml") and _is_geometric_file(ref)):
        from .geom.inflation import metrics

        g = load_geometric(ref)
        out = g.to_json()
        out["kind"] = "geometric"
        out["substitution_matrix"] = g.matrix()
        try:
            out["metrics"] = metrics(g).to_json()
        except SubstrateError as exc:
            out["metrics"] = {"error": exc.reason}
        return out, [], []
    rule = ctx.rule
    out = {
        "name": rule.name,
        "kind": rule.kind,
        "dim": rule.dim,
        "alphabet": [str(a) for a in rule.alphabet],
        "images": {str(a): _word_json(rule, rule.images[a]) for a in rule.alphabet},
        "expansion": list(rule.k) if rule.k else None,
        "constant_length_or_block": rule.is_block,
        "primitive": is_primitive(rule),
        "named_patterns": sorted(named_patterns(rule.name)) if _is_builtin(rule) else [],
        "geometric_rendering": rule.name in GEOMETRIC_RULES,
        "default_mode": _mode_label(ctx.mode),
    }
    return out, [], []


def _is_geometric_file(path) -> bool:
    from .rules import load_toml

    return load_toml(path).get("kind") == "geometric"


def _mode_label(mode) -> str:
    from .subst import mode_name

    return mode_name(mode)


def _patch_json(rule, codes, size):
    letters = [str(a) for a in rule.alphabet.decode(codes)]
    if rule.dim == 1:
        return letters
    rows = size[1]
    return [letters[i:i + rows] for i in range(0, len(letters), rows)]


def cmd_language(ctx):
    from .subst import Language

    size = (ctx.args.size,) * ctx.rule.dim
    lang = Language.of(ctx.rule, ctx.mode, ctx.saturation_cap)
    try:
        entry = lang.entry(size)
    except SaturationCapExceeded as exc:
        raise Inconclusive(exc.reason, str(exc), {"size": list(size), "partial_count": len(exc.partial or ()),
                                                  "saturation_depth": exc.depth}) from None
    out = entry.to_json()
    codes = sorted(entry.codes)
    out["patches"] = [_patch_json(ctx.rule, c, size) for c in codes[:LIST_LIMIT]]
    out["truncated"] = len(codes) > LIST_LIMIT
    cert = {"kind": "certified", "method": "substitution_closure", "complete": True,
            "rounds": entry.depth, "notes": ["closure of the seed windows under u -> windows(sigma(u)) reached a fixed set"]}
    return out, [cert], []


def cmd_complexity(ctx):
    from .subst import complexity

    rows = []
    try:
        for n in range(1, ctx.args.max_length + 1):
            rows.append({"n": n, "count": complexity(ctx.rule, n, ctx.mode, ctx.saturation_cap)})
    except SaturationCapExceeded as exc:
        raise Inconclusive(exc.reason, str(exc), {"complexity": rows}) from None
    cert = {"kind": "certified", "method": "substitution_closure", "complete": True,
            "notes": ["counts of legal n-words (1-D) or n x n blocks (2-D)"]}
    return {"rule": ctx.rule.name, "mode": _mode_label(ctx.mode), "complexity": rows}, [cert], []


def cmd_primitivity(ctx):
    from .rules import is_primitive, pf_eigenvalue_is_integer, substitution_matrix

    rule = ctx.rule
    out = {"rule": rule.name, "primitive": is_primitive(rule), "substitution_matrix": substitution_matrix(rule).to_json()}
    if not rule.is_block:
        out["pf_eigenvalue_integer"] = pf_eigenvalue_is_integer(rule)
    cert = {"kind": "certified", "method": "boolean_matrix_powers", "complete": True,
            "notes": ["primitive iff some Boolean power of the incidence matrix is all ones (Wielandt bound)"]}
    return out, [cert], []


def cmd_fixed_points(ctx):
    from .subst import fixed_points

    fps = fixed_points(ctx.rule, ctx.args.power, ctx.mode)
    out = []
    for i, fp in enumerate(fps):
        item = fp.to_json()
        item["ref"] = f"fixed:{i}"
        out.append(item)
    cert = {"kind": "certified", "method": "seed_enumeration", "complete": True,
            "notes": ["every interior and corner seed of sigma^n, n <= power, legal in the mode's language"]}
    return {"rule": ctx.rule.name, "max_power": ctx.args.power, "mode": _mode_label(ctx.mode), "fixed_points": out}, [cert], []


def cmd_periods(ctx, P, key):
    from .recog.periods import compute_periods

    K = compute_periods(P, ctx.args.norm_bound)
    out = {"pattern": P.name, "periods": K.to_json()}
    unc = [] if K.certificate.kind == "certified" else [f"{key}.periods"]
    return out, [K.certificate.to_json()], unc


def cmd_fibre(ctx, P, key):
    from .recog.fibre import enumerate_fibre

    try:
        f = enumerate_fibre(ctx.rule, P, ctx.power, ctx.window_schedule, ctx.mode, ctx.saturation_cap)
    except NotStabilized as exc:
        raise Inconclusive(exc.reason, str(exc), {"pattern": P.name, "count_lower_bound": exc.lower_bound}) from None
    out = f.to_json(include_elements=not ctx.args.no_elements)
    unc = [] if f.certificate.get("complete") else [f"{key}.count"]
    return out, [f.certificate], unc


def cmd_uc_verify(ctx, P, key):
    from .recog.uc import uc_verify

    try:
        rep = uc_verify(ctx.rule, P, ctx.power, ctx.mode, ctx.saturation_cap)
    except UCViolation as exc:
        raise CheckFailed(exc.reason, str(exc), {"pattern": P.name, "uc_holds": False}) from None
    except NotStabilized as exc:
        raise Inconclusive(exc.reason, str(exc), {"pattern": P.name}) from None
    out = rep.to_json()
    certs = [rep.fibre.certificate, rep.periods.certificate.to_json()]
    unc = [] if rep.fibre.certificate.get("complete") else [f"{key}.count"]
    if not rep.bijection:
        out["note"] = "fibre and cosets of L^n K in K differ in size: the power is below the LI-fixing power"
    return out, certs, unc


def cmd_recognise(ctx):
    from .recog.cutting import recognisability_radius, verify_witness

    rep = recognisability_radius(ctx.rule, ctx.recognisability_cap, ctx.mode, ctx.saturation_cap)
    out = rep.to_json()
    if not rep.found:
        out["witness_verified"] = verify_witness(ctx.rule, rep.witness) if rep.witness else False
        raise Inconclusive("recognisability_cap_exceeded",
                           f"centre cuttings still ambiguous at radius {rep.cap}", out)
    cert = {"kind": "certified", "method": "exhaustive_centre_cuttings", "complete": True, "bound": rep.radius,
            "notes": ["every legal patch of this radius has exactly one centre cutting; smaller radii checked ambiguous"]}
    return out, [cert], []


def cmd_li_power(ctx):
    from .recog.lipower import li_fixing_power

    try:
        rep = li_fixing_power(ctx.rule, ctx.args.config_radius, ctx.mode, ctx.saturation_cap)
    except ConfigRadiusUnstable as exc:
        raise Inconclusive(exc.reason, str(exc)) from None
    cert = {"kind": "certified", "method": rep.method, "complete": True,
            "notes": ["configuration orbits closed and the power was unchanged at config radius + 1"]}
    return rep.to_json(), [cert], []


def cmd_mld_check(ctx):
    from .ldmap import find_inverse_rule, subdivision_as_ld

    S = subdivision_as_ld(ctx.rule, ctx.power, ctx.mode, ctx.saturation_cap)
    inv = find_inverse_rule(S, radius_cap=ctx.args.radius_cap)
    out = {
        "rule": ctx.rule.name,
        "power": ctx.power,
        "mode": _mode_label(ctx.mode),
        "subdivision": {"radius": S.radius, "labels": list(S.size)},
        "local_surjectivity": S.surjectivity.to_json(),
        "inverse": inv.to_json(),
    }
    certs = [{"kind": "certified", "method": "table_search", "complete": True,
              "notes": ["radius-r inverse exists iff equal output windows always have equal input centres"]}]
    if not inv.found:
        periodic = (inv.witness or {}).get("periodic")
        if periodic is None:
            raise Inconclusive("inverse_radius_cap_exceeded",
                               f"no inverse up to radius {ctx.args.radius_cap} and no periodic witness", out)
        certs.append({"kind": "certified", "method": "periodic_witness", "complete": True,
                      "notes": [periodic["note"]]})
    return out, certs, []


def cmd_render(ctx):
    from .geom.inflation import iterate, tile_counts
    from .geom.svg import inflated_boundary, render_svg

    g = ctx.geometry
    seed = ctx.args.seed or g.ids[0]
    if seed not in g.prototiles:
        raise ValidationError(f"unknown prototile {seed!r}; known: {g.ids}")
    tiles = iterate(g, seed, ctx.args.depth)
    boundary = inflated_boundary(g, seed, ctx.args.depth) if ctx.args.boundary else None
    svg = render_svg(g, tiles, ctx.args.precision, boundary)
    out = {"rule": g.name, "seed": seed, "depth": ctx.args.depth, "tiles": len(tiles),
           "tile_counts": tile_counts(g, tiles), "precision": ctx.args.precision, "boundary": bool(boundary)}
    return out, svg


def cmd_verify(ctx):
    from .acceptance import run_suite

    echo = (lambda line: print(line, file=sys.stderr)) if not ctx.args.quiet else None
    try:
        suite = run_suite(ctx.args.only, ctx.args.rng_seed, ctx.args.inject_fault or (), echo=echo)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    out = suite.to_json(timing=ctx.args.timing)
    if not suite.passed:
        raise CheckFailed("acceptance_failure", f"failed criteria: {out['failed']}", out)
    return out, [], []


# -- argument parsing -------------------------------------------------------------

def _common(p, pattern=False, power=False):
    p.add_argument("--rule", help="built-in rule name or path to a rule TOML")
    p.add_argument("--config", help="workspace TOML supplying defaults (see docs/config.md)")
    p.add_argument("--mode", help="'default' (the corpus choice), 'admitted' or 'hull:<pattern>'")
    p.add_argument("--saturation-cap", type=int, help="language saturation depth cap (default 12)")
    p.add_argument("--recognisability-cap", type=int, help="largest radius tried by recognise (default 64)")
    p.add_argument("--window-schedule", help="fibre windows, '8..256' (doubling) or a comma list")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing (reports are no longer byte-stable)")
    if pattern:
        p.add_argument("--pattern", action="append",
                       help="named pattern, fixed:<i>, constant:<letter> or periodic:<word>; repeatable")
    if power:
        p.add_argument("--power", type=int, help="power n of sigma (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="substrate", description="Toolkit for substitution pattern spaces.")
    parser.add_argument("--version", action="version", version=f"substrate {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="command")
    sub.required = True

    p = sub.add_parser("info", help="describe a rule")
    _common(p)
    p = sub.add_parser("language", help="legal patches of one box size")
    _common(p)
    p.add_argument("--size", type=int, default=3, help="box side length (default 3)")
    p = sub.add_parser("complexity", help="number of legal words (blocks) by length")
    _common(p)
    p.add_argument("--max-length", type=int, default=10)
    p = sub.add_parser("primitivity", help="substitution matrix and primitivity")
    _common(p)
    p = sub.add_parser("fixed-points", help="seeds of sigma^n-fixed points")
    _common(p)
    p.add_argument("--power", type=int, default=2, help="largest power searched (default 2)")
    p = sub.add_parser("periods", help="period group of a pattern")
    _common(p, pattern=True)
    p.add_argument("--norm-bound", type=int, help="max-norm bound for the candidate period search")
    p = sub.add_parser("fibre", help="all pre-images of a pattern under sigma^n")
    _common(p, pattern=True, power=True)
    p.add_argument("--no-elements", action="store_true", help="report counts and certificates only")
    p = sub.add_parser("recognise", help="recognisability radius (unique centre cuttings)")
    _common(p)
    p = sub.add_parser("li-power", help="least power of sigma fixing every LI class")
    _common(p)
    p.add_argument("--config-radius", type=int, default=1)
    p = sub.add_parser("uc-verify", help="check the fibre against the cosets of L^n K in K")
    _common(p, pattern=True, power=True)
    p = sub.add_parser("mld-check", help="local surjectivity and local inverse of the subdivision map")
    _common(p, power=True)
    p.add_argument("--radius-cap", type=int, default=16)
    p = sub.add_parser("render", help="SVG of an iterated geometric inflation")
    _common(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--seed", help="prototile id to start from (default: the first)")
    p.add_argument("--precision", type=int, default=4, help="decimal places in the SVG (display only)")
    p.add_argument("--boundary", action="store_true", help="overlay the inflated seed outline")
    p.add_argument("--report", help="also write a JSON report here")
    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--only", action="append", help="criterion numbers or tags such as mask5, geometry; repeatable")
    p.add_argument("--seed", dest="rng_seed", type=int, default=0, help="seed of the randomized criteria")
    p.add_argument("--inject-fault", action="append", help="perturb an engine output: wrong_index, wrong_radius, wrong_area")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--quiet", action="store_true", help="no per-criterion lines on stderr")
    p.add_argument("--config", help=argparse.SUPPRESS)
    return parser


class Ctx:
    """Resolved arguments: CLI flags over workspace values over defaults."""

    def __init__(self, args):
        self.args = args
        ws = load_workspace(args.config) if getattr(args, "config", None) else {}
        self.workspace = ws
        self.rule_ref = getattr(args, "rule", None) or ws.get("rule")
        cap = getattr(args, "saturation_cap", None)
        self.saturation_cap = _positive_int("--saturation-cap", cap if cap is not None else ws.get("saturation_cap", DEFAULT_CAPS["saturation_depth"]))
        cap = getattr(args, "recognisability_cap", None)
        self.recognisability_cap = _positive_int("--recognisability-cap", cap if cap is not None else ws.get("recognisability_cap", DEFAULT_CAPS["recognisability"]))
        sched = getattr(args, "window_schedule", None)
        self.window_schedule = parse_schedule(sched) if sched is not None else ws.get("window_schedule", DEFAULT_CAPS["window_schedule"])
        power = getattr(args, "power", None)
        self.power = _positive_int("--power", power if power is not None else ws.get("power", 1))
        self.out = getattr(args, "out", None) or ws.get("out_svg" if args.command == "render" else "out_report")
        for name in ("size", "max_length", "config_radius", "radius_cap", "norm_bound", "precision"):
            v = getattr(args, name, None)
            if v is not None:
                if name in ("radius_cap", "precision") and isinstance(v, int) and v >= 0:
                    continue
                _positive_int(f"--{name.replace('_', '-')}", v)
        if args.command == "render" and args.depth < 0:
            raise ValidationError("--depth must be >= 0")
        self.rule = None
        self.mode = None
        self.geometry = None
        if args.command == "verify":
            return
        if not self.rule_ref:
            raise ValidationError("--rule is required (or a workspace with rule = ...)")
        if args.command == "render":
            self.geometry = load_geometric(self.rule_ref)
            return
        if args.command == "info" and (self.rule_ref.endswith(".toml") and _is_geometric_file(self.rule_ref)
                                       or self.rule_ref in ("penta_gaps",)):
            return
        self.rule = load_symbolic(self.rule_ref)
        self.mode = resolve_mode(self.rule, getattr(args, "mode", None) or ws.get("mode"))
        self.pattern_refs = (getattr(args, "pattern", None) or ws.get("patterns") or [])

    def inputs(self) -> dict:
        a = self.args
        skip = {"out", "timing", "config", "report", "quiet", "command"}
        out = {"command": a.command, "options": {k: v for k, v in sorted(vars(a).items()) if k not in skip and v is not None}}
        if a.command == "verify":
            return out
        out["rule"] = self.rule_ref
        target = self.geometry if self.geometry is not None else self.rule
        if target is None and a.command == "info":
            target = load_geometric(self.rule_ref)
        out["rule_sha256"] = rule_digest(target)
        if self.rule is not None:
            out["mode"] = _mode_label(self.mode)
            out["caps"] = {"saturation_depth": self.saturation_cap, "recognisability": self.recognisability_cap,
                           "window_schedule": list(self.window_schedule)}
            out["power"] = self.power
            if a.command in PATTERN_COMMANDS:
                out["patterns"] = list(self.pattern_refs)
        return out


HANDLERS = {
    "info": cmd_info,
    "language": cmd_language,
    "complexity": cmd_complexity,
    "primitivity": cmd_primitivity,
    "fixed-points": cmd_fixed_points,
    "recognise": cmd_recognise,
    "li-power": cmd_li_power,
    "mld-check": cmd_mld_check,
    "verify": cmd_verify,
}
PATTERN_HANDLERS = {"periods": cmd_periods, "fibre": cmd_fibre, "uc-verify": cmd_uc_verify}


def _run_patterns(ctx, handler):
    if not ctx.pattern_refs:
        raise ValidationError("--pattern is required (or workspace patterns = [...])")
    pats = [resolve_pattern(ctx.rule, ref, ctx.mode) for ref in ctx.pattern_refs]
    single = len(pats) == 1
    keys = ["result" if single else f"result.patterns[{i}]" for i in range(len(pats))]
    outs = _map(lambda ik: handler(ctx, pats[ik[0]], ik[1]), list(enumerate(keys)))
    if single:
        return outs[0]
    result = {"patterns": [o[0] for o in outs]}
    certs = [c for o in outs for c in o[1]]
    unc = [u for o in outs for u in o[2]]
    return result, certs, unc


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = next((a for a in argv if a in COMMANDS), None) or "substrate"
    t0 = time.perf_counter()
    ctx = None
    out_path = None
    try:
        args = build_parser().parse_args(argv)
        out_path = getattr(args, "out", None)
        ctx = Ctx(args)
        out_path = ctx.out
        if args.command == "render":
            result, svg = cmd_render(ctx)
            _write(out_path, svg)
            if args.report:
                rep = make_report("render", argv, ctx.inputs(), "ok", result,
                                  [{"kind": "certified", "method": "exact_field_arithmetic", "complete": True}],
                                  timing=time.perf_counter() - t0 if args.timing else None)
                rep["svg_sha256"] = _sha(svg)
                _write(args.report, dumps(rep))
            return EXIT_OK
        if args.command in PATTERN_HANDLERS:
            result, certs, unc = _run_patterns(ctx, PATTERN_HANDLERS[args.command])
        else:
            result, certs, unc = HANDLERS[args.command](ctx)
        rep = make_report(args.command, argv, ctx.inputs(), "ok", result, certs, unc,
                          timing=time.perf_counter() - t0 if args.timing else None)
        _write(out_path, dumps(rep))
        return EXIT_OK
    except UsageError as exc:
        return _fail(command, argv, ctx, out_path, "usage_error", str(exc), EXIT_VALIDATION)
    except Inconclusive as exc:
        return _fail(command, argv, ctx, out_path, exc.reason, str(exc), EXIT_INCONCLUSIVE, exc.result, "inconclusive")
    except CheckFailed as exc:
        return _fail(command, argv, ctx, out_path, exc.reason, str(exc), EXIT_CHECK_FAILED, exc.result, "failed")
    except (SaturationCapExceeded, NotStabilized, ConfigRadiusUnstable) as exc:
        return _fail(command, argv, ctx, out_path, exc.reason, str(exc), EXIT_INCONCLUSIVE, None, "inconclusive")
    except SubstrateError as exc:
        return _fail(command, argv, ctx, out_path, exc.reason, str(exc), EXIT_VALIDATION)
    except (OSError, UnicodeDecodeError) as exc:
        return _fail(command, argv, ctx, out_path, "io_error", str(exc), EXIT_VALIDATION)


def _sha(text: str) -> str:
    import hashlib

    return hashlib.sha256(text.encode()).hexdigest()


def _fail(command, argv, ctx, out_path, reason, message, code, partial=None, status="error") -> int:
    try:
        inputs = ctx.inputs() if ctx is not None else {"command": command}
    except SubstrateError:
        inputs = {"command": command}
    rep = make_report(command, argv, inputs, status, partial, error={"reason": reason, "message": message})
    print(f"substrate {command}: {reason}: {message}", file=sys.stderr)
    if ctx is not None and command == "render":
        out_path = None  # never write a JSON error into the SVG path
    try:
        _write(out_path, dumps(rep))
    except OSError:
        _write(None, dumps(rep))
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()


__all__ = ["build_parser", "load_workspace", "main", "parse_schedule", "resolve_pattern", "run"]
