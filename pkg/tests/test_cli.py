import io
import json
import subprocess
import sys

import pytest

from metriclie.cli import run
from metriclie.report import AnalysisReport, fmt_num


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def spec_file(tmp_path):
    def write(doc, name="alg.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return write


AFF = {"dim": 2, "brackets": [{"i": 0, "j": 1, "k": 1, "value": 1}], "metric": "identity"}


@pytest.mark.parametrize("cmd", ["check", "connection", "parallel", "curvature", "fingerprint", "holonomy", "derham", "report"])
def test_every_command_runs_on_a_catalog_entry(cmd):
    code, out, err = call(cmd, "--entry", "d4.2")
    assert code == 0, err
    assert out.startswith("input: catalog entry d4.2")


@pytest.mark.parametrize("cmd", ["check", "curvature", "derham", "report"])
def test_output_is_byte_identical_across_runs(cmd):
    a = call(cmd, "--entry", "aff_x_aff", "--param", "s=0.5", "--json")
    b = call(cmd, "--entry", "aff_x_aff", "--param", "s=0.5", "--json")
    assert a == b
    assert call(cmd, "--entry", "d4p") == call(cmd, "--entry", "d4p")


def test_json_round_trip():
    code, out, _ = call("report", "--entry", "R2_x_aff", "--json")
    assert code == 0
    rep = AnalysisReport.from_json(out)
    assert rep.to_json() + "\n" == out
    assert rep.sections["derham"]["label"] == "Flat(2) x Surface(-1)"
    assert rep.sections["parallel"]["dimension"] == 2
    assert set(rep.sections) == {"check", "connection", "parallel", "curvature", "fingerprint", "holonomy", "derham"}


def test_file_input(spec_file):
    path = spec_file(AFF)
    code, out, _ = call("derham", "--file", path)
    assert code == 0
    assert "Surface(-1)" in out
    code, out, _ = call("check", "--file", path, "--json")
    doc = json.loads(out)
    assert doc["input"]["file"] == path and len(doc["input"]["sha256"]) == 64


def test_invalid_algebra_exits_1(spec_file):
    bad = {"dim": 3, "brackets": [{"i": 0, "j": 1, "k": 1, "value": 1}, {"i": 0, "j": 2, "k": 1, "value": 1}, {"i": 1, "j": 2, "k": 0, "value": 1}]}
    code, out, _ = call("curvature", "--file", spec_file(bad))
    assert code == 1
    assert "valid Lie algebra: false" in out
    assert "JacobiViolation" in out


def test_non_symmetric_metric_exits_2(spec_file):
    doc = {**AFF, "metric": [[1, 0.5], [0, 1]]}
    code, out, err = call("check", "--file", spec_file(doc))
    assert code == 2 and out == ""
    assert "NotSymmetric" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check"],
        ["check", "--entry", "d4.2", "--file", "x.json"],
        ["check", "--entry", "nope"],
        ["check", "--entry", "aff_x_aff", "--param", "s=3"],
        ["check", "--entry", "aff_x_aff", "--param", "s"],
        ["check", "--entry", "aff_x_aff", "--param", "s=abc"],
        ["check", "--file", "/nonexistent/spec.json"],
        ["check", "--entry", "d4.2", "--tol-rel", "1e-15"],
        ["fingerprint", "--entry", "d4.2", "--tensor", "K"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""


def test_non_parallel_tensor_exits_1(spec_file):
    h3 = {"dim": 3, "brackets": [{"i": 0, "j": 1, "k": 2, "value": 1}]}
    doc = {**h3, "tensors": [{"name": "H", "matrix": [[0, -1, 0], [1, 0, 0], [0, 0, 0]]}]}
    # the Heisenberg holonomy is all of so(3), so no nonzero H is parallel
    code, out, _ = call("parallel", "--file", spec_file(doc))
    assert code == 1
    assert "designated tensor H is not parallel" in out
    code, _, _ = call("fingerprint", "--file", spec_file(doc))
    assert code == 1


def test_parallel_json():
    code, out, _ = call("parallel", "--entry", "d4p", "--json")
    doc = json.loads(out)
    p = doc["sections"]["parallel"]
    assert code == 0 and p["dimension"] == 1 and not p["contains_non_complex_multiple"]
    assert p["designated"]["J"]["in_parallel_space"]


def test_catalog_list():
    code, out, _ = call("catalog", "list")
    assert code == 0
    assert len(out.splitlines()) == 22
    code, out, _ = call("catalog", "list", "--json")
    assert {e["name"] for e in json.loads(out)} >= {"d4.2", "aff_x_aff", "kahler_d4p"}


def test_catalog_verify():
    code, out, _ = call("catalog", "verify", "--entry", "r4p_lambda_0", "--param", "lambda=2")
    assert code == 0
    assert "result: ok" in out
    code, out, _ = call("catalog", "verify", "--entry", "kahler_d4p", "--json")
    assert json.loads(out)["ok"] is True


def test_distinguish():
    code, out, _ = call(
        "distinguish", "--entry", "R2_x_aff", "--param", "a1=1", "--param", "a2=2",
        "--other-entry", "R2_x_aff", "--other-param", "a1=2", "--other-param", "a2=1",
    )
    assert code == 0 and out.startswith("Distinct")
    code, out, _ = call("distinguish", "--entry", "d4p", "--other-entry", "d4p", "--other-param", "c=-1", "--json")
    assert json.loads(out)["verdict"] == "Inconclusive"


def test_seed_and_max_level_flags():
    code, out, _ = call("holonomy", "--entry", "d4.2", "--max-level", "0", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["sections"]["holonomy"]["stabilized"] is False
    assert any("still growing" in w for w in doc["diagnostics"]["warnings"])
    assert call("derham", "--entry", "aff_x_aff", "--seed", "5")[0] == 0


def test_curvature_text_shows_two_forms():
    _, out, _ = call("curvature", "--entry", "d4.2")
    assert "R(0,1) = 1 e^01 + 0.5 e^23" in out
    assert "scalar curvature: -3" in out


def test_fmt_num():
    assert fmt_num(-0.0) == "0"
    assert fmt_num(1e-14) == "0"
    assert fmt_num(1 / 3) == "0.333333"
    assert fmt_num(True) == "true"
    assert fmt_num(None) == "-"


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "metriclie", "derham", "--entry", "aff_x_aff", "--param", "s=0.5"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[3] == "Surface(-1) x Surface(-2)"
