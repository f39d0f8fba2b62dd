"""Command-line interface: exit codes, report schema, and determinism."""

import json
import shutil
import subprocess
import sys

import pytest

from wlab.cli import main

GAMMA_I_DOC = {
    "schema": 1, "kind": "weierstrass", "backend": "exact",
    "g": {"num": [["0", "0"], ["1", "0"]], "den": [["1", "0"]]},
    "eta": {"num": [["0", "1"]], "den": [["0", "0"], ["0", "0"], ["1", "0"]]},
    "punctures": [["0", "0"], "inf"],
    "tau_symmetric": False,
}


def _write_doc(tmp_path, doc, name="surface.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _build(tmp_path, *args):
    out = tmp_path / "built.json"
    rc = main(["catalog", "build", *args, "-o", str(out)])
    assert rc == 0
    return str(out)


def test_catalog_list_names_families(capsys):
    assert main(["catalog", "list"]) == 0
    text = capsys.readouterr().out
    for name in ("catenoid", "enneper", "nodoid", "carlos_first", "carlos_second", "qstar"):
        assert name in text


def test_catalog_build_writes_surface_doc(tmp_path):
    path = _build(tmp_path, "catenoid")
    doc = json.loads(open(path).read())
    assert doc["backend"] == "exact"
    assert doc["family"]["name"] == "catenoid"


def test_catalog_build_qstar_emits_quad_differential(tmp_path):
    path = _build(tmp_path, "qstar", "--t", "0.5")
    doc = json.loads(open(path).read())
    assert doc["kind"] == "quad_differential"
    assert "num" in doc["coeff"] and "den" in doc["coeff"]


def test_verify_passes_catalog_surface(tmp_path, capsys):
    path = _build(tmp_path, "carlos_second", "--lam", "1", "--branch", "X+")
    assert main(["verify", path]) == 0
    assert "ok" in capsys.readouterr().out


def test_verify_reports_period_failure(tmp_path, capsys):
    path = _write_doc(tmp_path, GAMMA_I_DOC)
    rc = main(["verify", path])
    captured = capsys.readouterr()
    assert rc == 1
    assert "periods" in captured.out + captured.err
    assert "gamma not real" in captured.out + captured.err


def test_malformed_json_gives_located_input_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"schema": 1, "kind": ')
    rc = main(["verify", str(path)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "input error" in captured.err
    assert str(path) in captured.err


def test_unknown_backend_is_a_schema_error(tmp_path, capsys):
    doc = dict(GAMMA_I_DOC)
    doc["backend"] = "quad"
    rc = main(["verify", _write_doc(tmp_path, doc)])
    assert rc == 2
    assert "$.backend" in capsys.readouterr().err


def test_missing_file_is_an_input_error(tmp_path, capsys):
    rc = main(["verify", str(tmp_path / "nope.json")])
    assert rc == 2


def test_classify_lists_every_end(tmp_path):
    path = _build(tmp_path, "nodoid", "--n", "2")
    out = tmp_path / "cls.json"
    assert main(["classify", path, "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["ends"]) == 3
    for entry in doc["ends"]:
        assert entry["end_type"] == "PlanarEmbedded"
        assert entry["foliation"]["kind"] == "CircularMaxRadialMin"


def test_report_schema_and_determinism(tmp_path):
    path = _build(tmp_path, "catenoid")
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["report", path, "-o", str(out1)]) == 0
    assert main(["report", path, "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rep = json.loads(out1.read_text())
    assert list(rep) == ["schema", "tool", "surface", "backend", "checks",
                        "topology", "ends", "class_C", "config"]
    assert rep["checks"]["periods"]["status"] == "ok"
    assert rep["checks"]["tau_laws"]["status"] == "skipped"
    assert rep["topology"]["jorge_meeks_ok"]
    assert rep["class_C"]["in_class_C"]


def test_report_failure_sets_exit_code(tmp_path, capsys):
    path = _write_doc(tmp_path, GAMMA_I_DOC)
    out = tmp_path / "r.json"
    rc = main(["report", path, "-o", str(out)])
    captured = capsys.readouterr()
    assert rc == 1
    assert "periods:" in captured.err
    # the report itself is still written for inspection
    rep = json.loads(out.read_text())
    assert rep["checks"]["periods"]["status"] == "failed"


def test_render_surface_and_foliation(tmp_path):
    path = _build(tmp_path, "catenoid")
    obj = tmp_path / "m.obj"
    assert main(["render", "surface", path, "-o", str(obj), "--radial", "4", "--angular", "8"]) == 0
    lines = obj.read_text().splitlines()
    assert sum(1 for l in lines if l.startswith("v ")) == (2 * 4 - 1) * 8

    svg = tmp_path / "f.svg"
    assert main(["render", "foliation", path, "-o", str(svg), "--leaves", "2"]) == 0
    text = svg.read_text()
    assert text.startswith("<svg")
    assert 'class="puncture"' in text


def test_config_file_reaches_the_report(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"closure_tol": 2e-6}))
    monkeypatch.setenv("WLAB_CONFIG", str(cfg))
    path = _build(tmp_path, "catenoid")
    out = tmp_path / "r.json"
    assert main(["report", path, "-o", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["closure_tol"] == 2e-6


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"closure_tolerance": 1e-6}))
    rc = main(["--config", str(cfg), "catalog", "list"])
    assert rc == 2


@pytest.mark.skipif(shutil.which("wlab") is None, reason="console script not installed")
def test_console_script_runs():
    proc = subprocess.run(["wlab", "catalog", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "catenoid" in proc.stdout
