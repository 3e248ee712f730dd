import json

import pytest
from conftest import CHECKERBOARD

from stickweave.cli import EXIT_CAP, EXIT_FAIL, EXIT_MALFORMED, EXIT_OK, main
from stickweave.schematic import StateTable
from stickweave.stick import base_rules, save_patch, synthesize_weave, toy_schematic


@pytest.fixture
def files(tmp_path):
    wang = tmp_path / "wang.json"
    wang.write_text(json.dumps(CHECKERBOARD.to_json()))
    table = tmp_path / "table.json"
    table.write_text(json.dumps(StateTable.uniform(3, 3, (-2, 2)).to_json()))
    return tmp_path, wang, table


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_compile_wang_to_ab(files, capsys):
    tmp, wang, _ = files
    code, rep = run(capsys, "compile", wang, "--to", "ab", "--torus", "2x1", "--out", tmp / "o")
    assert code == EXIT_OK
    ab = json.loads((tmp / "o" / "ab.json").read_text())
    assert len(ab["a_tiles"]) == len(ab["b_tiles"]) == 2
    assert rep["stages"][-1]["wang_count"] == rep["stages"][-1]["ab_count"] == 2


def test_compile_through_schematic(files, capsys):
    tmp, wang, _ = files
    code, rep = run(capsys, "compile", wang, "--to", "schematic", "--torus", "2x1", "--out", tmp / "o")
    assert code == EXIT_OK
    assert [s["stage"] for s in rep["stages"]] == ["wang", "ab", "table", "assignment", "schematic"]
    # full-size sticks are far beyond the patch budget
    code, rep = run(capsys, "compile", wang, "--to", "patch", "--torus", "2x1", "--out", tmp / "o")
    assert code == EXIT_CAP


def test_compile_table_to_patch(files, capsys):
    tmp, _, table = files
    code, rep = run(capsys, "compile", table, "--from", "table", "--to", "patch", "--out", tmp / "o",
                    "--seed", 3)
    assert code == EXIT_OK
    assert rep["stages"][-1]["orientations"] == [0, 2, 5]
    # the emitted artifacts pass their standalone checks
    code, _ = run(capsys, "verify", "gaps", tmp / "o" / "assignment.json", "--table", table)
    assert code == EXIT_OK
    code, _ = run(capsys, "verify", "schematic", tmp / "o" / "schematic.json", "--table", table)
    assert code == EXIT_OK
    code, _ = run(capsys, "verify", "patch", tmp / "o" / "patch.json", "--rules", tmp / "o" / "rules.json")
    assert code == EXIT_OK


def test_corrupted_assignment_fails(files, capsys):
    tmp, _, table = files
    run(capsys, "compile", table, "--from", "table", "--to", "assignment", "--out", tmp / "o")
    path = tmp / "o" / "assignment.json"
    data = json.loads(path.read_text())
    data["rows"][1]["gaps"][0] = [3, 3]
    data["rows"][1]["gaps"][1] = [3, 3]
    path.write_text(json.dumps(data))
    code, rep = run(capsys, "verify", "gaps", path, "--table", table)
    assert code == EXIT_FAIL and rep["violations"]


def test_verify_bijection_and_roundtrip(files, capsys):
    tmp, wang, _ = files
    code, rep = run(capsys, "verify", "bijection", wang, "--torus", "2x1")
    assert code == EXIT_OK and rep["wang_count"] == rep["ab_count"] == 2
    run(capsys, "compile", wang, "--to", "ab", "--out", tmp / "o")
    code, rep = run(capsys, "verify", "roundtrip", tmp / "o" / "ab.json", "--torus", "2x1")
    assert code == EXIT_OK and rep["tilings"] == 2


def test_solve_wang_and_cap(files, capsys):
    tmp, wang, _ = files
    code, rep = run(capsys, "solve", "wang", wang, "--torus", "2x1", "--out", tmp)
    assert code == EXIT_OK and rep["count"] == 2
    code, rep = run(capsys, "solve", "wang", wang, "--torus", "2x2", "--cap", 1, "--out", tmp)
    assert code == EXIT_CAP and rep["partial"] == 1


def test_solve_stick_with_weave_seed(tmp_path, capsys):
    n = 5
    save_patch(synthesize_weave(toy_schematic(n, 2, 2)), tmp_path / "patch.json")
    (tmp_path / "rules.json").write_text(json.dumps(base_rules(n).to_json()))
    code, rep = run(capsys, "solve", "stick", tmp_path / "patch.json", "--rules", tmp_path / "rules.json",
                    "--region", "hex:radius=2,q=2,r=2", "--out", tmp_path)
    assert code == EXIT_OK and rep["count"] == 1


def test_verify_planarity_toy(tmp_path, capsys):
    n = 5
    save_patch(synthesize_weave(toy_schematic(n, 2, 2)), tmp_path / "patch.json")
    (tmp_path / "rules.json").write_text(json.dumps(base_rules(n).to_json()))
    args = ["verify", "planarity", tmp_path / "patch.json", "--rules", tmp_path / "rules.json",
            "--out", tmp_path / "g"]
    code, _ = run(capsys, *args)
    assert code == EXIT_MALFORMED  # geometry needs --toy
    code, rep = run(capsys, *args, "--toy")
    assert code == EXIT_OK and rep["region_cells"] > 0 and rep["unmatched"] == 0
    assert (tmp_path / "g" / "geometry.svg").exists() and (tmp_path / "g" / "polygons.json").exists()


def test_malformed_inputs(files, capsys):
    tmp, wang, table = files
    assert run(capsys, "compile", wang, "--from", "patch", "--to", "ab")[0] == EXIT_MALFORMED
    assert run(capsys, "compile", tmp / "missing.json")[0] == EXIT_MALFORMED
    bad = tmp / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify", "gaps", bad, "--table", table)[0] == EXIT_MALFORMED
    assert run(capsys, "compile", table, "--from", "schematic", "--to", "patch")[0] == EXIT_MALFORMED
