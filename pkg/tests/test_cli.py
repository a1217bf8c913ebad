import json

import pytest

from ksl.cli import family_specs, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_gf3(capsys):
    code, out, _ = run(capsys, "compute", "--ring", "GF(3)")
    data = json.loads(out)
    assert code == 0
    assert data["schema"] == 1
    assert data["C"] == pytest.approx(1.41421356, abs=1e-8)
    assert data["extremal"] is True
    assert {"ring", "size", "units", "C", "C_squared", "sqrt_units", "argmax", "extremal", "bounds"} <= set(data)
    assert all(b["verdict"] == "PASS" for b in data["bounds"])


def test_compute_boolean_power(capsys):
    data = json.loads(run(capsys, "compute", "--ring", "Z/2 ^ 5")[1])
    assert data["C"] == 1.0 and data["extremal"] is True


def test_compute_gf5_not_extremal(capsys):
    assert json.loads(run(capsys, "compute", "--ring", "GF(5)")[1])["extremal"] is False


def test_compute_csv(capsys):
    code, out, _ = run(capsys, "compute", "--ring", "Z/3", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "m,n,re,im,abs" and len(lines) == 10


def test_scan_fields(capsys):
    code, out, _ = run(capsys, "scan", "--family", "fields:q<=13")
    rows = [l.split(",") for l in out.splitlines()[1:]]
    assert [r[0] for r in rows] == [f"GF({q})" for q in (2, 3, 4, 5, 7, 8, 9, 11, 13)]
    assert [r[5] for r in rows] == ["true"] * 3 + ["false"] * 6


def test_scan_boolean_constant(capsys):
    out = run(capsys, "scan", "--family", "boolean:n<=6")[1]
    assert all(l.split(",")[3] == "1" for l in out.splitlines()[1:])


def test_scan_zmod_mixed(capsys):
    out = run(capsys, "scan", "--family", "zmod:n<=32")[1]
    verdicts = {l.split(",")[5] for l in out.splitlines()[1:]}
    assert verdicts == {"true", "false"}


def test_family_patterns():
    assert len(family_specs("list:Z/3;GF(4) x Z/2")) == 2
    assert len(family_specs("fields:q<=16")) == 10


def test_graph(capsys, tmp_path):
    path = tmp_path / "f3.txt"
    code, out, _ = run(capsys, "graph", "--ring", "GF(3)", "--edges", str(path))
    data = json.loads(out)
    assert data["vertices"] == 9 and data["edges"] == 9 and data["components"] == 3
    assert len(path.read_text().splitlines()) == 10
    data = json.loads(run(capsys, "graph", "--ring", "GF(5)")[1])
    assert data["connected"] and data["edges"] == 50
    data = json.loads(run(capsys, "graph", "--ring", "Z/8")[1])
    assert data["extremal"] and not data["connected"]


def test_edges_format(capsys):
    out = run(capsys, "graph", "--ring", "GF(3)", "--format", "edges")[1]
    assert out.startswith("# vertices=9 degree=2 ring=GF(3)\n")


def test_exit_codes(capsys, monkeypatch):
    assert run(capsys, "compute", "--ring", "GF(6)")[0] == 2
    assert run(capsys, "compute", "--ring", "Z/5000")[0] == 3
    assert run(capsys, "compute", "--ring", "Z/5000", "--guard", "10")[0] == 3
    assert run(capsys, "verify", "nonsense")[0] == 2
    monkeypatch.setenv("KSL_GUARD", "8")
    code, out, err = run(capsys, "compute", "--ring", "Z/9")
    assert code == 3 and out == "" and "guard" in err


def test_verify_suite(capsys, tmp_path):
    out_path = tmp_path / "v.json"
    code, out, err = run(capsys, "verify", "extremal-fields", "--out", str(out_path))
    assert code == 0 and out == ""
    data = json.loads(out_path.read_text())
    assert data["passed"] and data["suites"][0]["suite"] == "extremal-fields"
    assert "PASS extremal-fields" in err


def test_deterministic_output(capsys):
    a = run(capsys, "scan", "--family", "zmod:n<=20")[1]
    b = run(capsys, "scan", "--family", "zmod:n<=20", "--jobs", "4")[1]
    assert a == b
