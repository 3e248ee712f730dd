"""Run the command-line pipeline on two small inputs and print the reports.

    python3 scripts/pipeline_demo.py [outdir]
"""
import json
import sys
from pathlib import Path

from stickweave.cli import main
from stickweave.schematic import StateTable
from stickweave.wang import WangInstance, WangTile

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

checker = WangInstance(2, (WangTile(1, 1, 1, 2), WangTile(1, 2, 1, 1)))
(out / "wang.json").write_text(json.dumps(checker.to_json()))
(out / "table33.json").write_text(json.dumps(StateTable.uniform(3, 3, (-2, 2)).to_json()))

# full-size compile stops at the schematic: its sticks are ~345k cells long
code = main(["compile", str(out / "wang.json"), "--to", "schematic", "--torus", "2x1",
             "--out", str(out / "checkerboard")])
print("checkerboard exit", code)
# the s=3, v=3 table is small enough to reach the toy geometry stage (~2 min)
code = main(["compile", str(out / "table33.json"), "--from", "table", "--to", "geometry", "--toy",
             "--out", str(out / "table33")])
print("table33 exit", code)
