import json

import pytest

from stmodent.certificates import data_text
from stmodent.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_algebra_summary(capsys):
    code, out, _ = run(capsys, "algebra", "builtin:A1")
    assert code == 0
    assert "dimension 8" in out and "gorenstein d=6" in out and "cocommutative yes" in out
    code, out, _ = run(capsys, "algebra", "--algebra", "builtin:trivial")
    assert code == 0 and "dimension 1" in out


def test_algebra_export_round_trip(capsys, tmp_path):
    first = tmp_path / "m.json"
    second = tmp_path / "m2.json"
    assert run(capsys, "algebra", "builtin:M", "--export", str(first))[0] == 0
    assert run(capsys, "algebra", str(first), "--export", str(second))[0] == 0
    assert first.read_text() == second.read_text()


def test_algebra_invalid_exit_codes(capsys, tmp_path):
    assert run(capsys, "algebra", "builtin:nope")[0] == 2
    bad = json.loads(json.dumps({"p": 2, "basis": [{"label": "1", "degree": 0}, {"label": "x", "degree": 1}],
                                 "unit": 0, "mult": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]}))
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, _, err = run(capsys, "algebra", str(path))
    assert code == 2 and "degree" in err
    assert run(capsys, "nonsense")[0] == 2


def test_ext_csv(capsys):
    code, out, _ = run(capsys, "ext", "builtin:ext-1", "--smax", "5", "--tmax", "5")
    assert code == 0
    assert out.splitlines() == ["s,t,dim"] + [f"{s},{s},1" for s in range(6)]
    code, out, _ = run(capsys, "ext", "builtin:trivial", "--smax", "3", "--tmax", "3")
    assert out.splitlines() == ["s,t,dim", "0,0,1"]


def test_ext_oracle_and_json(capsys, tmp_path):
    code, _, err = run(capsys, "ext", "builtin:M", "--smax", "4", "--tmax", "12", "--oracle")
    assert code == 0 and "agreement" in err
    path = tmp_path / "ext.json"
    code, _, _ = run(capsys, "ext", "builtin:A1", "--smax", "3", "--tmax", "8", "--format", "json",
                     "--out", str(path))
    doc = json.loads(path.read_text())
    assert [1, 1, 1] in doc["entries"] and doc["algebra"] == "A1"
    assert run(capsys, "ext", "builtin:A1", "--smax", "-1")[0] == 2


def test_verify_shipped_and_mutated(capsys, tmp_path):
    for stem in ("a1_staircase", "m_ladder"):
        code, out, _ = run(capsys, "verify", f"builtin:{stem}")
        assert code == 0 and "PASS" in out
    doc = json.loads(data_text("a1_staircase"))
    mat = doc["segments"][3][1]["matrix"]
    mat[0] = [1 - x for x in mat[0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 1 and "FAIL" in out and "segment 3" in out
    path.write_text("{not json")
    assert run(capsys, "verify", str(path))[0] == 2


def test_verify_plain_sequence(capsys, tmp_path):
    doc = json.loads(data_text("m_ladder"))
    seq = {"algebra": "M", "modules": doc["modules"], "sequence": doc["segments"][0]}
    path = tmp_path / "seq.json"
    path.write_text(json.dumps(seq))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0 and out.startswith("PASS")


def test_entropy_command(capsys, tmp_path):
    path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "entropy", "builtin:M", "--next", "40", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["h_pol_upper"]["value"] == 1
    assert [c["value"] for c in doc["h_pol_upper"]["candidates"]] == [1, 2]
    assert "h_pol <=" in out


def test_entropy_with_pyramid_file(capsys, tmp_path):
    tower = tmp_path / "tower.json"
    tower.write_text(json.dumps({"storeys": ["e1", "e2"]}))
    code, out, _ = run(capsys, "entropy", "builtin:ext-1-1", "--next", "30", "--pyramid", str(tower))
    doc = json.loads(out)
    assert code == 0 and doc["h_pol_upper"]["source"] == "tower" and doc["h_pol_upper"]["value"] == 1
    assert run(capsys, "entropy", "builtin:ext-1-1", "--window", "9")[0] == 2


def test_accept_subset(capsys, tmp_path):
    path = tmp_path / "acc.json"
    code, out, err = run(capsys, "accept", "--only", "partitions,9", "--out", str(path))
    assert code == 0
    assert [line[:9] for line in out.splitlines()] == ["[PASS]  7", "[PASS]  9"]
    doc = json.loads(path.read_text())
    assert doc["passed"] and [c["id"] for c in doc["criteria"]] == [7, 9]
    assert run(capsys, "accept", "--only", "42")[0] == 2


def test_accept_reduced_window_widens_tolerance(capsys):
    code, out, _ = run(capsys, "accept", "--only", "growth", "--nmax", "40")
    assert code == 0, out
    assert "<= 0.3" in out and "<= 0.5" in out
