"""Draw the chair and the pentagon inflation and report exact areas.

Writes chair_3.svg and pentagon_3.svg to the current directory.

    python3 demos/render_tilings.py
"""
from substrate.geom import builtin_geometry, inflated_boundary, iterate, render_svg, support_area, verify_stone
from substrate.geom import polygon as poly

chair = builtin_geometry("chair")
tiles = iterate(chair, None, 3)
print(f"chair, 3 steps: {len(tiles)} tiles, area {support_area(chair, tiles)}, "
      f"stone: {verify_stone(chair).stone}")
with open("chair_3.svg", "w") as fh:
    fh.write(render_svg(chair, tiles))

penta = builtin_geometry("penta_gaps")
tiles = iterate(penta, "up", 3)
outline = inflated_boundary(penta, "up", 3)
covered = support_area(penta, tiles)
print(f"pentagons, 3 steps: {len(tiles)} tiles covering {covered} of {poly.area(outline)}")
for entry in verify_stone(penta).prototiles:
    print(f"  gap left by one step on {entry['prototile']}: {entry['uncovered_area']}")
with open("pentagon_3.svg", "w") as fh:
    fh.write(render_svg(penta, tiles, boundary=outline))
