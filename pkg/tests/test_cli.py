import csv
import json

import pytest

from lfwave import serialization as ser
from lfwave.cli import main, parse_levels

CHAIN_VALUES_DOC = {
    "values": [
        {"digits": {}, "re": 1.0, "im": 0.0},
        {"digits": {"-2": [1]}, "re": 0.8, "im": 0.0},
        {"digits": {"-2": [1], "-1": [1]}, "re": 1.2, "im": 0.0},
        {"digits": {"-1": [1], "0": [1]}, "re": 0.9, "im": 0.0},
    ]
}


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def chain_files(tmp_path):
    d = tmp_path
    assert run("tree", "basic", "--p", 2, "--s", 1, "--N", 2, "-o", d / "t.json") == 0
    assert run("tree", "step", d / "t.json", "--node", 3, "--target", 4, "-o", d / "c.json") == 0
    (d / "vals.json").write_text(json.dumps(CHAIN_VALUES_DOC))
    assert run("mask", "build", "--tree", d / "c.json", "--values", d / "vals.json",
               "--A", 0.5, "--B", 1.6, "-o", d / "m.json") == 0
    assert run("mra", "build", "--tree", d / "c.json", "--mask", d / "m.json", "-o", d / "f.json") == 0
    assert run("wavelets", "build", d / "f.json", "-o", d / "w.json") == 0
    return d


def test_tree_commands(tmp_path, capsys, chain_tree):
    assert run("tree", "basic", "--p", 2, "--s", 1, "--N", 2, "-o", tmp_path / "t.json") == 0
    t = ser.load(tmp_path / "t.json", "tree")
    assert t.node_count == 5
    assert run("tree", "validate", tmp_path / "t.json") == 0
    assert json.loads(capsys.readouterr().out)["valid"] is True
    assert run("tree", "step", tmp_path / "t.json", "--node", 3, "--target", 4, "-o", tmp_path / "c.json") == 0
    assert ser.load(tmp_path / "c.json", "tree") == chain_tree
    # the reversed pair is not an admissible move
    assert run("tree", "step", tmp_path / "t.json", "--node", 4, "--target", 3) == 2
    assert "window context mismatch" in capsys.readouterr().err
    assert run("tree", "windows", tmp_path / "c.json", "--k", 3) == 0
    assert "windows" in capsys.readouterr().out


def test_set_commands(chain_files, capsys):
    d = chain_files
    assert run("set", "build", "--tree", d / "c.json", "-o", d / "s.json") == 0
    E = ser.load(d / "s.json", "set")
    assert len(E.cosets) == 4 and E.M == 1
    assert run("set", "validate", d / "s.json") == 0
    assert run("set", "validate", d / "s.json", "--M", 2) == 2
    out = capsys.readouterr().out
    assert '"valid": false' in out


def test_chain_pipeline(chain_files, capsys):
    d = chain_files
    fam = ser.load(d / "f.json", "family")
    assert fam.H == 4 and fam.bounds()[0] == pytest.approx(0.64)
    assert run("mra", "verify", d / "f.json") == 0
    assert run("wavelets", "verify", d / "w.json") == 0
    capsys.readouterr()
    assert run("verify", "all", d / "w.json", "--depth", 3, "--levels", "-1..1", "--report", d / "r.json") == 0
    rep = json.loads((d / "r.json").read_text())
    assert rep["passed"] and rep["kind"] == "report"
    riesz = next(c for c in rep["checks"] if c["name"] == "riesz")
    lo, hi = riesz["witness"]["gram_eigen_range"]
    assert lo == pytest.approx(0.64, abs=1e-9) and hi == pytest.approx(1.0, abs=1e-9)


def test_haar_pipeline(tmp_path):
    d = tmp_path
    assert run("tree", "basic", "--p", 2, "--s", 1, "--N", 2, "-o", d / "t.json") == 0
    (d / "v.json").write_text(json.dumps({"values": [
        {"digits": dig, "re": 1.0, "im": 0.0} for dig in ({}, {"-2": [1]}, {"-1": [1]}, {"-2": [1], "-1": [1]})
    ]}))
    assert run("mask", "build", "--tree", d / "t.json", "--values", d / "v.json", "-o", d / "m.json") == 0
    assert run("mra", "build", "--tree", d / "t.json", "--mask", d / "m.json", "-o", d / "f.json") == 0
    assert run("wavelets", "build", d / "f.json", "-o", d / "w.json") == 0
    assert run("verify", "all", d / "w.json", "--report", d / "r.json") == 0
    rep = json.loads((d / "r.json").read_text())
    bio = next(c for c in rep["checks"] if c["name"] == "biorthogonality_wavelets")
    assert bio["witness"]["max_deviation"] < 1e-12


def test_seeded_builds_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        t = tmp_path / f"t{k}.json"
        f = tmp_path / f"f{k}.json"
        assert run("tree", "basic", "--p", 3, "--s", 1, "--N", 2, "-o", t) == 0
        assert run("mra", "build", "--tree", t, "--seed", 11, "--phases", "-o", f) == 0
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]


def test_tampered_family_fails(chain_files, capsys):
    d = chain_files
    data = json.loads((d / "f.json").read_text())
    data["phi_hat"]["values"][1]["re"] += 1e-3
    (d / "bad.json").write_text(json.dumps(data))
    capsys.readouterr()
    assert run("mra", "verify", d / "bad.json") == 2
    rep = json.loads(capsys.readouterr().out)
    failing = {c["name"] for c in rep["checks"] if not c["passed"]}
    assert {"scaling_product", "refinement"} <= failing


def test_schema_errors(tmp_path, chain_files):
    (tmp_path / "junk.json").write_text("{not json")
    assert run("tree", "validate", tmp_path / "junk.json") == 3
    assert run("mra", "verify", chain_files / "c.json") == 3
    assert run("export", "grid", chain_files / "c.json") == 3


def test_usage_errors(tmp_path, monkeypatch, chain_files):
    with pytest.raises(SystemExit) as e:
        run("tree", "basic", "--p", 2)
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        run("frobnicate")
    assert e.value.code == 1
    assert run("tree", "validate", tmp_path / "missing.json") == 1
    assert run("tree", "basic", "--p", 4, "--s", 1, "--N", 2) == 1
    assert run("mra", "verify", chain_files / "f.json", "--tol", -1) == 1
    monkeypatch.setenv("LFWAVE_TOL", "abc")
    assert run("mra", "verify", chain_files / "f.json") == 1


def test_env_tolerance(chain_files, capsys, monkeypatch):
    monkeypatch.setenv("LFWAVE_TOL", "1e-6")
    capsys.readouterr()
    assert run("mra", "verify", chain_files / "f.json") == 0
    rep = json.loads(capsys.readouterr().out)
    assert next(c for c in rep["checks"] if c["name"] == "refinement")["witness"]["tol"] == 1e-6


def test_bad_mask_rejected(tmp_path, chain_files):
    doc = json.loads(json.dumps(CHAIN_VALUES_DOC))
    doc["values"][1]["re"] = 0.0
    (tmp_path / "zero.json").write_text(json.dumps(doc))
    assert run("mask", "build", "--tree", chain_files / "c.json", "--values", tmp_path / "zero.json") == 2


def test_export_grid(chain_files):
    d = chain_files
    assert run("export", "grid", d / "w.json", "-o", d / "g.csv") == 0
    rows = list(csv.DictReader((d / "g.csv").open()))
    names = {r["function"] for r in rows}
    assert names == {"phi", "dual_phi", "psi_0", "dual_psi_0", "psi_1", "dual_psi_1"}
    origin = next(r for r in rows if r["function"] == "phi" and set(r["digits"].split()) == {"0"})
    assert float(origin["re"]) == pytest.approx(0.906) and origin["lowest_index"] == "-2"
    assert run("export", "grid", d / "f.json", "-o", d / "h.csv") == 0


def test_parse_levels():
    assert parse_levels("-1..1") == (-1, 0, 1)
    assert parse_levels("0,2") == (0, 2)
