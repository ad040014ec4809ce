"""Recognisability and the local inverse of the subdivision map.

For Thue-Morse every legal word of length 5 has exactly one centre cutting,
and that radius is also the radius of a local rule undoing the subdivision.
For mask5 no radius works, and a periodic witness shows why.

    python3 demos/thue_morse_inverse.py
"""
from substrate.ldmap import find_inverse_rule, subdivision_as_ld
from substrate.recog import recognisability_radius
from substrate.rules import builtin_rule

tm = builtin_rule("thue_morse")
rep = recognisability_radius(tm)
print(f"thue_morse: unique centre cuttings from radius {rep.radius} (checked {list(rep.checked)})")

inv = find_inverse_rule(subdivision_as_ld(tm, 1), radius_cap=4)
print(f"thue_morse: subdivision inverse of radius {inv.radius}, {len(inv.rule.table)} table entries")

mask5 = builtin_rule("mask5")
res = find_inverse_rule(subdivision_as_ld(mask5, 1), radius_cap=6)
w = res.witness["periodic"]
print(f"mask5: no inverse up to radius {res.radius_cap}")
print(f"  witness {w['pattern']}: {w['fibre_count']} pre-images that subdivide identically,")
print(f"  inflations differ at cell {w['cell']}: {w['labels'][0]} vs {w['labels'][1]}")
