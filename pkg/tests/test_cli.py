import json
import subprocess
import sys

import pytest

from gammaforge.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gamma_eval_schema(capsys):
    code, out, _ = call(capsys, "gamma", "eval", "--field", "R", "--s", "0.5", "--n", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "1" and rep["field"] == "R" and rep["at_pole"] is False
    assert [float(v) for v in rep["value"]] == pytest.approx([0, 1])


def test_gamma_eval_pole_and_bad_field(capsys):
    code, out, _ = call(capsys, "gamma", "eval", "--field", "R", "--s", "0")
    assert code == 0 and json.loads(out)["at_pole"] is True
    code, _, err = call(capsys, "gamma", "eval", "--field", "X", "--s", "1")
    assert code == 2 and "unknown field" in err


def test_no_command_is_usage_error(capsys):
    code, _, _ = call(capsys)
    assert code == 2


def test_covering_table(capsys):
    code, out, _ = call(capsys, "identities", "covering", "--n", "3", "--type", "1,1,1")
    assert code == 0
    rep = json.loads(out)
    assert rep["count"] == 6
    labels = [i["label"] for i in rep["identities"]]
    assert labels == sorted(labels)
    g1 = next(i for i in rep["identities"] if i["label"] == "G1->G3")
    assert g1["b"] == "1/27"
    assert [e["s"] for e in g1["eta"]] == ["-4/3", "1"]


def test_covering_latex(capsys):
    code, out, _ = call(capsys, "identities", "covering", "--n", "3", "--type", "1,1,1", "--latex")
    assert code == 0
    assert out.lstrip().startswith("\\begin{align*}") and "\\end{align*}" in out
    assert out.count("\\widehat") == 6


def test_monomial_negative_exponents(capsys):
    code, out, _ = call(capsys, "identities", "monomial", "--exponents", "-1,3")
    assert code == 0 and json.loads(out)["count"] == 6


def test_pvs_e6(capsys):
    code, out, _ = call(capsys, "identities", "pvs", "--space", "e6")
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 6 and len(rep["fixed_points"]) == 2


def test_legendre_check(capsys):
    code, out, _ = call(capsys, "legendre", "check", "--f", "x^2", "--fstar", "x^2/4")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = call(capsys, "legendre", "check", "--f", "x^3 + y^3", "--fstar", "x^3 + y^3")
    assert code == 1 and json.loads(out)["pass"] is False


def test_verify_cubic_and_control(capsys):
    code, out, _ = call(capsys, "verify", "cubic", "--p", "2", "--precision", "3")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True
    code, out, _ = call(capsys, "verify", "cubic", "--p", "2", "--trivial")
    assert code == 1 and json.loads(out)["pass"] is False


def test_output_file(tmp_path, capsys):
    target = tmp_path / "g.json"
    code, out, _ = call(capsys, "-o", str(target), "gamma", "eval", "--field", "C", "--s", "1.5")
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["field"] == "C"


def test_repeat_output_is_byte_identical():
    argv = [sys.executable, "-m", "gammaforge", "identities", "covering", "--n", "5",
            "--type", "1,1,1,1,1", "--field", "C"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_output_flag_after_subcommand(tmp_path, capsys):
    target = tmp_path / "c.json"
    code, out, _ = call(capsys, "identities", "covering", "--n", "3", "--type", "1,1,1",
                        "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["count"] == 6
