import json
import os

from marsim.cli import main

SCEN = os.path.join(os.path.dirname(__file__), "..", "scenarios")
LIGHT = os.path.join(SCEN, "table3_scenario3.yaml")


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["simulate", "--scenario", LIGHT, "--seed-list", "0,1",
                 "--algos", "mars,ub,max", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("scenario_id,seed,algorithm")
    assert len(lines) == 1 + 2 * 3


def test_simulate_identical_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["simulate", "--scenario", LIGHT, "--seed-list", "0",
                     "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_validate_roundtrip(tmp_path):
    out = tmp_path / "r.csv"
    allocs = tmp_path / "allocs"
    assert main(["simulate", "--scenario", LIGHT, "--seed-list", "0",
                 "--out", str(out), "--save-allocations", str(allocs)]) == 0
    (alloc_file,) = list(allocs.iterdir())
    assert main(["validate", "--scenario", LIGHT,
                 "--allocation", str(alloc_file)]) == 0

    doc = json.loads(alloc_file.read_text())
    doc["assignments"].append(list(doc["assignments"][0]))
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    assert main(["validate", "--scenario", LIGHT,
                 "--allocation", str(broken)]) == 2


def test_unknown_algorithm_fails(tmp_path):
    code = main(["simulate", "--scenario", LIGHT, "--seed-list", "0",
                 "--algos", "sorcery", "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_bad_scenario_fails(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("scenario_id: x\nttis: 1\n")
    code = main(["simulate", "--scenario", str(p), "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_oracle_compare_runs(capsys):
    assert main(["oracle-compare", "--trials", "15", "--seed", "3"]) == 0
    assert "0 failures" in capsys.readouterr().out


def test_oracle_compare_no_prune(capsys):
    assert main(["oracle-compare", "--trials", "4", "--seed", "1",
                 "--max-cells", "5", "--no-prune"]) == 0
