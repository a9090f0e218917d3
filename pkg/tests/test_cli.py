import io
import json
import subprocess
import sys

import pytest

from quasistrat.cli import main, parse_config, run

from conftest import FIXTURES


def invoke(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_pyramid(capsys):
    code, out, _ = invoke(capsys, "analyze", FIXTURES / "pyramid.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["face_count"] == 19
    assert doc["singular_faces"] == [{"I": [2, 3, 4, 5], "p": 0}]
    assert doc["rationality"] == "lattice"
    assert doc["pieces"] == 2
    assert doc["input"] == "pyramid"
    assert doc["notes"]


def test_analyze_nonrational(capsys):
    code, out, _ = invoke(capsys, "analyze", FIXTURES / "triangle_sqrt2.json")
    assert code == 0 and json.loads(out)["rationality"] == "nonrational"


def test_verify_interval(capsys):
    code, out, _ = invoke(capsys, "verify", FIXTURES / "interval.json", "--samples", 100, "--seed", 7)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and all(c["passed"] for c in doc["checks"])


def test_verify_is_byte_identical(capsys):
    args = ("verify", FIXTURES / "square.json", "--samples", 50, "--seed", 123)
    _, a, _ = invoke(capsys, *args)
    _, b, _ = invoke(capsys, *args)
    assert a == b


def test_verify_text_table(capsys):
    code, out, _ = invoke(capsys, "verify", FIXTURES / "interval.json", "--samples", 20, "--format", "text")
    assert code == 0
    assert out.splitlines()[-1] == "overall: PASS"


def test_missing_file(capsys, tmp_path):
    code, _, err = invoke(capsys, "faces", tmp_path / "missing.json")
    assert code == 2
    doc = json.loads(err)
    assert doc["error"] == "io" and "cannot read input" in doc["message"]


def test_invalid_polytope(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dimension": 1, "facets": [{"normal": [1], "offset": 0}, {"normal": [1], "offset": -1}]}))
    code, _, err = invoke(capsys, "faces", bad)
    assert code == 2 and json.loads(err)["error"] == "unbounded"
    bad.write_text("{")
    code, _, err = invoke(capsys, "faces", bad)
    assert code == 2 and json.loads(err)["error"] == "malformed_json"


@pytest.mark.parametrize("argv", [
    ["frobnicate", "x.json"],
    ["faces", "x.json", "--bogus"],
    ["faces", "x.json", "--tol", "zero"],
    ["faces", "x.json", "--tol", "zero=abc"],
    ["faces", "x.json", "--samples", "-1"],
    ["faces", "x.json", "--epsilon", "0"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = invoke(capsys, *argv)
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_unknown_tolerance_name(capsys):
    code, _, err = invoke(capsys, "faces", FIXTURES / "interval.json", "--tol", "bogus=1")
    assert code == 2 and "unknown tolerance" in json.loads(err)["message"]


def test_tolerance_override_is_applied():
    cfg = parse_config(["verify", "x.json", "--tol", "zero=1e-7", "--tol", "rank=1e-9"])
    assert cfg.tol == {"zero": 1e-7, "rank": 1e-9}


def _dot_counts(text):
    lines = text.splitlines()
    nodes = sum(1 for l in lines if "[label=" in l)
    edges = sum(1 for l in lines if "->" in l)
    return nodes, edges


@pytest.mark.parametrize("name, target, counts", [
    ("interval", "faces", (3, 2)),
    ("pyramid", "pieces", (2, 1)),
    ("cube", "pieces", (1, 0)),
    ("pyramid", "faces", (19, 8 * 2 + 8 * 2 + 5)),  # vertex-edge, edge-facet, facet-interior
])
def test_export_dot(capsys, name, target, counts):
    code, out, _ = invoke(capsys, "export", FIXTURES / f"{name}.json", "--dot", target)
    assert code == 0
    assert out.startswith(f"digraph {target} {{")
    assert _dot_counts(out) == counts


def test_faces_and_strata_reports(capsys):
    _, out, _ = invoke(capsys, "faces", FIXTURES / "pyramid.json")
    faces = json.loads(out)["faces"]
    assert len(faces) == 19
    apex = next(f for f in faces if f["I"] == [2, 3, 4, 5])
    assert apex == {"I": [2, 3, 4, 5], "p": 0, "r": 4, "class": "singular", "witness": ["0", "0", "1"]}
    _, out, _ = invoke(capsys, "strata", FIXTURES / "pyramid.json")
    assert [p["dim"] for p in json.loads(out)["pieces"]] == [0, 6]


def test_links_report(capsys):
    _, out, _ = invoke(capsys, "links", FIXTURES / "pyramid_prism.json", "--epsilon", "0.5")
    doc = json.loads(out)
    assert doc["epsilon"] == 0.5
    assert max(len(l["children"]) for l in doc["links"]) == 1


def test_sample_lines(capsys):
    code, out, _ = invoke(capsys, "sample", FIXTURES / "interval.json", "--samples", 5, "--seed", 1)
    assert code == 0
    recs = [json.loads(l) for l in out.splitlines()]
    assert len(recs) == 5 + 3
    assert {tuple(r["face_I"]) for r in recs[5:]} == {(), (1,), (2,)}
    assert all(r["phi_residual"] <= 1e-10 for r in recs)


def test_text_format(capsys):
    code, out, _ = invoke(capsys, "analyze", FIXTURES / "pyramid.json", "--format", "text")
    assert code == 0
    assert "face_count: 19" in out
    assert "rationality: lattice" in out


def test_run_with_stream():
    buf = io.StringIO()
    assert run(parse_config(["strata", str(FIXTURES / "cube.json")]), buf) == 0
    assert json.loads(buf.getvalue()) == {"pieces": [{"kind": "regular", "dim": 6, "face_I": []}]}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "quasistrat", "strata", str(FIXTURES / "pyramid.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)["pieces"]) == 2
