import csv
import io
import json
import subprocess
import sys

import pytest

from qpkit.cli import main

P_SQRT2 = {"field": {"m": 2}, "P": [[{"a": "1", "b": "0"}, {"a": "0", "b": "1"}]]}
P_DEPENDENT = {"field": {"m": 1}, "P": [[{"a": "1", "b": "0"}, {"a": "2", "b": "0"}]]}
PARENT = {"n": 2, "terms": [{"k": [0, 0], "re": 0.5, "im": 0.0}, {"k": [1, 1], "re": 1.0, "im": 0.0}]}


def poly(P, terms):
    return {**P, "terms": [{"k": k, "re": re, "im": im} for k, re, im in terms]}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ergodicity(capsys, files):
    code, out, _ = run(capsys, "ergodicity", "--matrix", files("P.json", P_SQRT2))
    assert code == 0
    rep = json.loads(out)
    assert rep["r_action"] is True and rep["z_action"] is False
    assert rep["witnesses"]["z"] == [1, 0]


def test_weyl_csv_and_json(capsys, files):
    args = ["weyl", "--matrix", files("P.json", P_SQRT2), "--parent", files("F.json", PARENT),
            "--T", "10,100", "--y", "0.25,0.5"]
    code, out, _ = run(capsys, *args)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["T"] for r in rows] == ["10", "100"]
    assert all(float(r["abs_error"]) <= float(r["bound"]) for r in rows)
    code, out, _ = run(capsys, *args, "--format", "json", "--discrete")
    js = json.loads(out)
    assert js["discrete"] is True and len(js["rows"]) == 2


def test_orbit_with_negative_range(capsys, files):
    code, out, _ = run(capsys, "orbit", "--matrix", files("P.json", P_SQRT2), "--range", "-1:1", "--samples", "5")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "y1", "y2"] and len(rows) == 6
    assert float(rows[3][0]) == 0.0 and float(rows[3][1]) == 0.0


def test_lift_project_round_trip(capsys, files, tmp_path):
    f = poly(P_SQRT2, [([0, 0], 1.0, 0.0), ([2, -1], 0.0, 0.5)])
    out_path = tmp_path / "F.json"
    code, _, _ = run(capsys, "lift", "--poly", files("f.json", f), "-o", str(out_path))
    assert code == 0
    code, out, _ = run(capsys, "project", "--parent", str(out_path), "--matrix", files("P.json", P_SQRT2))
    assert code == 0
    back = json.loads(out)
    assert sorted((t["k"], t["re"], t["im"]) for t in back["terms"]) == [([0, 0], 1.0, 0.0), ([2, -1], 0.0, 0.5)]


def test_lift_reports_witness(capsys, files):
    code, out, _ = run(capsys, "lift", "--poly", files("f.json", poly(P_DEPENDENT, [([1, 0], 1.0, 0.0)])))
    assert code == 1
    assert json.loads(out)["witness"] == [2, -1]


def test_norm_and_hy(capsys, files):
    path = files("f.json", poly(P_SQRT2, [([0, 0], 1.0, 0.0), ([0, 1], 2.0, 0.0)]))
    code, out, _ = run(capsys, "norm", "--poly", path, "--q", "4")
    assert code == 0
    assert abs(json.loads(out)["besicovitch"] - 33 ** 0.25) < 1e-12
    code, out, _ = run(capsys, "hy", "--poly", path, "--q", "4")
    assert code == 0 and json.loads(out)["holds"] is True


def test_invert_success_and_failure(capsys, files):
    good = files("g.json", poly(P_SQRT2, [([0, 0], 2.0, 0.0), ([0, 1], 1.0, 0.0)]))
    code, out, _ = run(capsys, "invert", "--poly", good, "--grid", "64")
    assert code == 0
    js = json.loads(out)
    assert js["residual"] < 1e-9
    bad = files("b.json", poly(P_SQRT2, [([0, 0], 1.0, 0.0), ([0, 1], 1.0, 0.0)]))
    code, out, _ = run(capsys, "invert", "--poly", bad)
    assert code == 1 and "error" in json.loads(out)


def test_regularity_modes(capsys, files):
    path = files("f.json", poly(P_SQRT2, [([1, 0], 1.0, 0.0)]))
    code, out, _ = run(capsys, "regularity", "--poly", path, "--mode", "holder", "--r", "4", "--eta", "0.5")
    assert code == 0 and json.loads(out)["guaranteed_class"] == 2
    code, _, err = run(capsys, "regularity", "--poly", path, "--mode", "sobolev", "--s", "3")
    assert code == 2 and "needs --s and --q" in err


def test_meyer_emit_and_summary(capsys, tmp_path):
    pts = tmp_path / "pts.csv"
    code, out, _ = run(capsys, "meyer", "--window", "-0.5:0.5", "--radius", "300", "--emit", str(pts), "--L", "10")
    assert code == 0
    summary = json.loads(out)
    rows = list(csv.DictReader(pts.open()))
    assert summary["points"] == len(rows) > 0
    assert summary["density"]["min_count"] > 0


def test_pathology(capsys):
    code, out, _ = run(capsys, "pathology", "--radii", "100,1000")
    assert code == 0
    js = json.loads(out)
    assert [r["radius"] for r in js["probes"][0]["rows"]] == [100.0, 1000.0]


def test_usage_errors(capsys, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"n\": 2,\n")
    code, _, err = run(capsys, "project", "--parent", str(bad), "--matrix", files("P.json", P_SQRT2))
    assert code == 2 and "malformed JSON" in err and ":3:" in err
    code, _, err = run(capsys, "ergodicity", "--matrix", str(tmp_path / "missing.json"))
    assert code == 2
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2
    code, _, err = run(capsys, "weyl", "--matrix", files("P.json", P_SQRT2), "--parent", files("F.json", PARENT),
                       "--T", "2.5", "--discrete")
    assert code == 2 and "integer" in err


def test_selftest_small_scale(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "3", "--scale", "0.2")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] is True and rep["seed"] == 3
    assert len(rep["checks"]) == 10


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qpkit", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("qpkit ")


def test_fractional_exponent(capsys, files):
    path = files("f.json", poly(P_SQRT2, [([0, 0], 1.0, 0.0), ([0, 1], 2.0, 0.0)]))
    code, out, _ = run(capsys, "hy", "--poly", path, "--q", "4/3")
    js = json.loads(out)
    assert code == 0 and js["holds"] is True and abs(js["q"] - 4 / 3) < 1e-15
    code, _, err = run(capsys, "norm", "--poly", path, "--q", "x")
    assert code == 2 and "invalid exponent" in err
