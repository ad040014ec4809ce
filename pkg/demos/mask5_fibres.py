"""Fibres of periodic patterns under the five-letter rule.

The rule has two letters S1, S2 whose images differ only at the centre, so
a periodic pattern can have many pre-images.  We count them, compare with
the lattice index the period group predicts, and check which power of the
substitution fixes every local-indistinguishability class.

    python3 demos/mask5_fibres.py
"""
from substrate.corpus import named_patterns
from substrate.lattice import index_of_inflated
from substrate.recog import compute_periods, enumerate_fibre, li_fixing_power, uc_verify
from substrate.rules import builtin_rule

rule = builtin_rule("mask5")
patterns = named_patterns("mask5")

for name in ("P_A", "P_B"):
    P = patterns[name]
    K = compute_periods(P)
    print(f"{name}: period lattice {[list(b) for b in K.lattice]}")
    for n in (1, 2):
        F = enumerate_fibre(rule, P, n)
        idx = index_of_inflated(K, [[5]], n)
        print(f"  n={n}: |fibre| = {F.count:3d}   [K : L^n K] = {idx}")

rep = uc_verify(rule, patterns["P_A"], 2)
print(f"P_A, n=2: fibre elements pair off with cosets one-to-one: {rep.bijection}")

li = li_fixing_power(rule)
print(f"least power fixing every LI class: {li.power}")
