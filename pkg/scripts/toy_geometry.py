"""Build the notched sticks for a toy weave, verify the tiling exactly, write SVG.

    python3 scripts/toy_geometry.py [n] [rows] [blocks] [outdir]
"""
import sys
import time
from pathlib import Path

from stickweave.geometry import (area_balance, build_polygons, emit_svg, encode_spots,
                                 instantiate_patch, save_polygons, verify_planar)
from stickweave.stick import base_rules, synthesize_weave, toy_schematic

args = sys.argv[1:]
n, rows, blocks = (int(a) for a in (args + ["5", "2", "2"][len(args):])[:3])
out = Path(args[3] if len(args) > 3 else "toy_out")
out.mkdir(parents=True, exist_ok=True)

rules = base_rules(n)
enc = encode_spots(rules)
sticks = synthesize_weave(toy_schematic(n, rows, blocks))
t0 = time.time()
pset = instantiate_patch(sticks, enc, rules)
rep = verify_planar(pset)
total, expect = area_balance(pset, enc, sticks)
print(f"{len(sticks)} sticks, {pset.count('staple')} staples, {time.time() - t0:.1f}s")
print(rep.summary())
print("area balance", "exact" if total == expect else f"off: {total} vs {expect}")
save_polygons(build_polygons(n, enc), out / "polygons.json")
(out / "toy.svg").write_text(emit_svg(pset))
print("wrote", out / "polygons.json", out / "toy.svg")
sys.exit(0 if rep.ok and total == expect else 2)
