import io
import json
import subprocess
import sys
from importlib import resources

import pytest

from akfronts.cli import dumps, main
from akfronts.definitions import parse_definition, parse_front

DATA = resources.files("akfronts") / "data"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_classify_swallowtail_both_routes():
    code, text = run("classify", "swallowtail", "--point", "0", "0", "--route", "both")
    doc = json.loads(text)
    assert code == 0
    entry = doc["entries"][0]
    assert entry["class"] == "A3" and entry["routes_agree"] is True
    assert list(doc) == ["tool", "version", "command", "input_digest", "config", "entries",
                         "warnings"]


def test_classify_examples():
    assert json.loads(run("classify", "immersion", "--point", "0.3", "-0.2")[1])[
        "entries"][0]["class"] == "Regular"
    code, text = run("classify", "tangent_developable", "--point", "0.5", "0", "0")
    assert code == 0 and json.loads(text)["entries"][0]["class"] == "A3"


def test_classify_morin_file(tmp_path):
    path = tmp_path / "m.front"
    path.write_text(run("fixture", "morin", "--k", "2", "--n", "2")[1])
    code, text = run("classify", str(path), "--point", "0", "0")
    assert code == 0 and json.loads(text)["entries"][0]["class"] == "A2"


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.front"
    bad.write_text("front f vars x map (x, x")
    assert run("classify", str(bad), "--point", "0")[0] == 1
    assert run("classify", "swallowtail", "--point", "0")[0] == 1
    assert run("classify", "no_such_file", "--point", "0")[0] == 1
    assert run("classify", "swallowtail", "--point", "0", "0", "--tol-zero", "-1")[0] == 1
    assert run("classify", "swallowtail", "--bogus-flag")[0] == 1
    assert run("fixture", "ak-front", "--k", "5", "--n", "3")[0] == 1
    flat = tmp_path / "flat.front"
    flat.write_text("front flat vars x, y map (x^2, y^2, x*y) normal (y^2, x^2, -2*x*y)")
    assert run("classify", str(flat), "--point", "0", "0")[0] == 2
    a4 = tmp_path / "a4.front"
    a4.write_text(run("fixture", "ak-front", "--k", "3", "--n", "3")[1])
    assert run("classify", str(a4), "--point", "0", "0", "0", "--jet-order", "4")[0] == 2
    edge = tmp_path / "edge.front"
    edge.write_text("front edge vars x, y map (x, y^2, y^3) normal (0, 3*y, -2)")
    code, text = run("classify", str(edge), "--point", "0", "5e-9")
    assert code == 3 and json.loads(text)["warnings"]


def test_json_is_byte_identical(tmp_path):
    first = run("scan", "swallowtail", "--box", "-0.5", "0.5", "--grid", "9")[1]
    second = run("scan", "swallowtail", "--box", "-0.5", "0.5", "--grid", "9",
                 "--timing", str(tmp_path / "t.json"))[1]
    assert first == second
    timing = json.loads((tmp_path / "t.json").read_text())
    assert timing["input_digest"] == json.loads(first)["input_digest"]
    assert timing["wall_time_s"] >= 0


def test_digest_tracks_inputs_and_config():
    a = json.loads(run("classify", "swallowtail", "--point", "0", "0")[1])["input_digest"]
    b = json.loads(run("classify", "swallowtail", "--point", "0", "0",
                       "--tol-zero", "1e-7")[1])["input_digest"]
    c = json.loads(run("classify", "immersion", "--point", "0", "0")[1])["input_digest"]
    assert len({a, b, c}) == 3


def test_dumps_floats_and_order():
    assert dumps({"b": 0.1, "a": [1, 0.25, 24.0, -0.0]}) == (
        '{\n  "b": 0.10000000000000001,\n'
        '  "a": [1, 0.25, 24.0, -0.0]\n}')
    assert json.loads(dumps({"x": 1 / 3}))["x"] == 1 / 3


def test_scan_csv(tmp_path):
    csv_path = tmp_path / "locus.csv"
    code, _ = run("scan", "swallowtail", "--box", "-0.5", "0.5", "--grid", "17",
                  "--csv", str(csv_path))
    lines = csv_path.read_text().splitlines()
    assert code == 0
    assert lines[0].startswith("x1,x2,class,lambda0")
    assert sum(",A3," in line for line in lines) == 1
    code, text = run("scan", "immersion", "--format", "csv")
    assert code == 0 and text == "x1,x2,class\n"


def test_scan_tangent_developable_locus():
    doc = json.loads(run("scan", "tangent_developable", "--grid", "9")[1])
    assert doc["entries"]
    assert all(abs(e["point"][2]) <= 1e-6 for e in doc["entries"])


def test_zigzag_command(tmp_path):
    csv_path = tmp_path / "angle.csv"
    code, text = run("zigzag", "twelve_signs", "full_turn", "--csv", str(csv_path))
    entry = json.loads(text)["entries"][0]
    assert code == 0
    assert entry["normalized"] == "+-+-" and entry["z"] == 2 and entry["consistent"]
    assert csv_path.read_text().startswith("s,theta\n")
    for name in ("astroid", "circle"):
        entry = json.loads(run("zigzag", name, "full_turn")[1])["entries"][0]
        assert entry["consistent"] and abs(entry["maslov"]) == entry["z"]
    code, text = run("zigzag", "deltoid", "full_turn")
    doc = json.loads(text)
    assert code == 0 and not doc["entries"][0]["coorientable"] and doc["warnings"]


def test_text_format():
    code, text = run("classify", "swallowtail", "--point", "0", "0", "--format", "text")
    assert code == 0 and text.startswith("classify: swallowtail\n") and "A3" in text


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for this run\ntol-zero = 1e-7\nroute = mu\n")
    doc = json.loads(run("classify", "swallowtail", "--point", "0", "0", "--config",
                         str(cfg))[1])
    assert doc["config"]["tol_zero"] == 1e-7 and doc["config"]["route"] == "mu"
    doc = json.loads(run("classify", "swallowtail", "--point", "0", "0", "--config",
                         str(cfg), "--route", "lambda")[1])
    assert doc["config"]["route"] == "lambda" and doc["config"]["tol_zero"] == 1e-7
    (tmp_path / "bad.cfg").write_text("colour = red\n")
    assert run("classify", "swallowtail", "--point", "0", "0", "--config",
               str(tmp_path / "bad.cfg"))[0] == 1


@pytest.mark.parametrize("argv, label, point", [
    (["ak-front", "--k", "1", "--n", "1"], "A2", ["0"]),
    (["ak-front", "--k", "2", "--n", "3"], "A3", ["0", "0", "0"]),
    (["morin", "--k", "3", "--n", "3"], "A3", ["0", "0", "0"]),
    (["tangent-developable"], "A3", ["0.5", "0", "0"]),
])
def test_fixture_round_trip_and_reclassify(tmp_path, argv, label, point):
    code, text = run("fixture", *argv)
    assert code == 0
    obj = parse_definition(text)
    assert parse_definition(text) == obj
    path = tmp_path / "fx.front"
    path.write_text(text)
    code, out = run("classify", str(path), "--point", *point)
    assert code == 0 and json.loads(out)["entries"][0]["class"] == label


def test_fixture_text_matches_normal_forms():
    assert "map (2*t^3, -3*t^2)" in run("fixture", "ak-front", "--k", "1", "--n", "1")[1]
    text = run("fixture", "morin", "--k", "2", "--n", "2")[1]
    assert "map (z1*z2 + z2^3, z1)" in text
    gamma = run("fixture", "tangent-developable", "--gamma", "z", "z^2", "z^3", "z^5")[1]
    assert parse_front(gamma).n == 3


def test_selfcheck():
    code, text = run("selfcheck")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) >= 10 and all(line.startswith("PASS") for line in lines)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "akfronts", "classify", "cusp", "--point", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["entries"][0]["class"] == "A2"
