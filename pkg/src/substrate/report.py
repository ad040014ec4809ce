"""JSON report envelope shared by every CLI command.

Reports are byte-identical for identical inputs: keys are sorted, nothing
time- or host-dependent is included unless timing was requested, and the
inputs hash covers the resolved rule contents as well as the arguments.
"""
from __future__ import annotations

import hashlib
import json

from . import __version__

SCHEMA_VERSION = "substrate.report/1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_INCONCLUSIVE = 3


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def rule_digest(rule) -> str:
    """Content hash of a symbolic or geometric rule (independent of where it was loaded from)."""
    if hasattr(rule, "images"):
        body = {"kind": rule.kind, "alphabet": [str(a) for a in rule.alphabet],
                "images": {str(a): rule.images[a] for a in rule.alphabet}}
    else:
        body = rule.to_json()
    return digest(body)


def make_report(command: str, argv: list, inputs: dict, status: str, result=None, certificates=None,
                uncertified=None, error=None, timing: float | None = None) -> dict:
    out = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "inputs": inputs,
        "inputs_sha256": digest(inputs),
        "status": status,
    }
    if result is not None:
        out["result"] = result
    out["certificates"] = certificates or []
    if uncertified:
        out["uncertified"] = sorted(uncertified)
    if error is not None:
        out["error"] = error
    if timing is not None:
        out["timing_s"] = round(timing, 3)
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


__all__ = [
    "EXIT_CHECK_FAILED",
    "EXIT_INCONCLUSIVE",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "SCHEMA_VERSION",
    "digest",
    "dumps",
    "make_report",
    "rule_digest",
]
