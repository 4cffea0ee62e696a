import json

import pytest

from tok.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_homology_trefoil(capsys, diagrams_dir):
    code, out, _ = run(capsys, "homology", "--input", str(diagrams_dir / "trefoil.json"), "--reduced", "--marks-at-basepoint")
    assert code == 0
    data = json.loads(out)
    assert data["ring"] == "Z" and data["total_rank"] == 3
    assert len(data["delta_graded"]) == 1 and data["delta_graded"][0]["torsion"] == []


def test_homology_evaluated(capsys, diagrams_dir):
    code, out, _ = run(capsys, "homology", "--input", str(diagrams_dir / "fig8.json"), "--reduced")
    data = json.loads(out)
    assert code == 0 and data["ring"] == "Q" and data["total_rank"] == 5


def test_verify_trefoil(capsys, diagrams_dir):
    code, out, err = run(capsys, "verify", "--input", str(diagrams_dir / "trefoil.json"), "--checks", "d2,faces,slide,r1")
    data = json.loads(out)
    assert code == 0 and data["failures"] == 0
    assert set(data["summary"]) >= {"d2", "tau_cocycle", "slide_chain_map", "invariance"}
    assert "checks passed" in err


def test_spantree_figure8(capsys, diagrams_dir):
    code, out, _ = run(capsys, "spantree", "--input", str(diagrams_dir / "fig8.json"), "--eval", "generic")
    data = json.loads(out)
    assert code == 0
    assert len(data["generators"]) == 5 == data["tait_spanning_trees"]
    assert data["homology"]["total_rank"] == 5


def test_build_writes_output_file(capsys, diagrams_dir, tmp_path):
    target = tmp_path / "c.json"
    code, out, _ = run(capsys, "build", "--input", str(diagrams_dir / "hopf.json"), "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["crossings"] == 2


def test_output_is_deterministic(capsys, diagrams_dir):
    args = ("verify", "--input", str(diagrams_dir / "trefoil.json"), "--checks", "d2,faces,configuration,mod2")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    assert run(capsys, *args, "--jobs", "2")[1] == first


def test_failed_check_exits_1(capsys, diagrams_dir):
    code, out, _ = run(capsys, "verify", "--input", str(diagrams_dir / "overslide_control.json"), "--checks", "slide")
    data = json.loads(out)
    assert code == 1 and data["failures"] > 0
    bad = [c for c in data["checks"] if c["result"] == "fail"]
    assert all("witness" in c for c in bad if c["name"] == "slide_chain_map")


@pytest.mark.parametrize(
    "argv",
    [
        ("build", "--input", "does/not/exist.json"),
        ("verify", "--checks", "nonsense"),
        ("spantree", "--eval", "x1=1"),
        ("spantree", "--eval", "x1=-2"),
    ],
)
def test_bad_input_exits_2(capsys, diagrams_dir, argv):
    if "--input" not in argv:
        argv = (*argv, "--input", str(diagrams_dir / "trefoil.json"))
    code, _, err = run(capsys, *argv)
    assert code == 2 and "input error" in err


def test_malformed_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"crossings": [{"ends": [1, 2, 3, 7], "over": 1}]}')
    code, _, err = run(capsys, "build", "--input", str(bad))
    assert code == 2 and "edge multiplicity" in err


def test_link_spantree_exits_2(capsys, diagrams_dir):
    assert run(capsys, "spantree", "--input", str(diagrams_dir / "hopf.json"))[0] == 2
