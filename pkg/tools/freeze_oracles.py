"""Run the brute-force oracles and freeze their outputs.

    python3 tools/freeze_oracles.py > src/substrate/data/oracle_values.json

The engine is never imported here, only the oracle module.
"""
import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src" / "substrate"))
import oracles  # noqa: E402  (loaded as a plain module so the package is not imported)

TM = {"a": "ab", "b": "ba"}
FIB = {"a": "ab", "b": "a"}
HALF = {"w": "ww", "b": "bb"}
MASK5 = {
    "S1": ("S2", "A", "S1", "B", "S2"),
    "S2": ("S1", "B", "S2", "A", "S1"),
    "A": ("C", "B", "B", "B", "C"),
    "B": ("A",) * 5,
    "C": ("A",) * 5,
}


def main():
    mask_legal = oracles.legal_words(MASK5, 5, depth=4)
    half_legal = oracles.legal_words(HALF, 3, depth=4)
    p_b = lambda x: "CBBBC"[(x + 2) % 5]  # noqa: E731  sigma(P_A) with phase 0
    out = {
        "recognisability_radius": {
            "method": "centre cuttings of factors of sigma^6 (thue_morse) and sigma^14 (fibonacci)",
            "thue_morse": oracles.recognisability_radius(TM, 6, 5),
            "fibonacci": oracles.recognisability_radius(FIB, 14, 12),
        },
        "periodic_fibres": {
            "method": "phase enumeration over words of period p*k^n with legal windows",
            "mask5/P_A/1": oracles.periodic_fibre_count(MASK5, lambda x: "A", 1, Fraction(0), 1, mask_legal, 5),
            "mask5/P_A/2": oracles.periodic_fibre_count(MASK5, lambda x: "A", 1, Fraction(0), 2, mask_legal, 5),
            "mask5/P_B/1": oracles.periodic_fibre_count(MASK5, p_b, 5, Fraction(0), 1, mask_legal, 5),
            "mask5/P_B/2": oracles.periodic_fibre_count(MASK5, p_b, 5, Fraction(0), 2, mask_legal, 5),
            "half_and_half/all_b/1": oracles.periodic_fibre_count(HALF, lambda x: "b", 1, Fraction(1, 2), 1, half_legal, 3),
            "half_and_half/all_w/1": oracles.periodic_fibre_count(HALF, lambda x: "w", 1, Fraction(1, 2), 1, half_legal, 3),
        },
    }
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
