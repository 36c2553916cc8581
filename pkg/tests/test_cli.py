import json
import os
from pathlib import Path

import pytest

from toprec.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT, EXIT_OK, run

GOLDEN = Path(__file__).parent / "golden"


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,argv", [
    ("qmtm_curve_bergman.json", ["qmtm", "curve", "--alpha", "1/3", "--emit", "bergman"]),
    ("gaussian_omega_0_3.txt", ["compute", "--curve", "gaussian", "--g", "0", "--n", "3", "--emit", "form",
                                "--format", "form-text"]),
    ("blob_graphs_0_21.txt", ["qmtm", "blob-graphs", "--g", "0", "--k", "2,1", "--B", "1,2/", "--format", "form-text"]),
    ("wick_4_2_connected.csv", ["oracle", "matrix", "--powers", "4,2", "--connected", "--format", "csv"]),
])
def test_golden_outputs(capsys, name, argv):
    code, out, _ = call(capsys, *argv)
    assert code == EXIT_OK
    assert out == (GOLDEN / name).read_text()


def test_output_is_deterministic(capsys):
    argv = ["compute", "--curve", "quartic", "--order", "2", "--g", "1", "--n", "1", "--format", "json"]
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


def test_moments_csv(capsys):
    code, out, _ = call(capsys, "compute", "--curve", "gaussian", "--g", "1", "--n", "1", "--emit", "moments",
                        "--powers", "4", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "gaussian,1,4,1"


def test_verification_failures_exit_1(capsys):
    assert call(capsys, "verify", "loop-equations", "--max-chi", "1", "--inject-scale", "2")[0] == EXIT_FAIL
    assert call(capsys, "verify", "virasoro", "--p-max", "3", "--sign", "literal")[0] == EXIT_FAIL
    assert call(capsys, "verify", "virasoro", "--p-max", "3", "--perturb", "s1*s2:1/3")[0] == EXIT_FAIL


def test_verifications_pass(capsys):
    code, out, _ = call(capsys, "verify", "loop-equations", "--max-chi", "2", "--format", "form-text")
    assert code == EXIT_OK and "FAIL" not in out
    code, out, _ = call(capsys, "verify", "qmtm-structure", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["status"] == "ok"


@pytest.mark.parametrize("argv", [
    ["compute", "--curve", "gaussian", "--g", "0", "--n", "3", "--emit", "moments", "--powers", "2,x,2"],
    ["compute", "--curve", "elliptic"],
    ["qmtm", "curve", "--alpha", "1"],
    ["qmtm", "blob-graphs", "--g", "0", "--k", "2,1", "--B", "3/"],
    ["oracle", "tensor", "--observable", "9:2"],
    ["nonsense"],
])
def test_input_errors_exit_2(capsys, argv):
    assert call(capsys, *argv)[0] == EXIT_INPUT


def test_budget_exhaustion_exit_3(capsys):
    code, _, err = call(capsys, "oracle", "matrix", "--powers", "10,10", "--budget", "100")
    assert code == EXIT_BUDGET
    assert err


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\ng = 1\nn = 1\nemit = moments\npowers = 4\nformat = csv\n")
    code, out, _ = call(capsys, "compute", "--config", str(cfg))
    assert code == EXIT_OK and out.splitlines()[-1] == "gaussian,1,4,1"
    code, out, _ = call(capsys, "compute", "--config", str(cfg), "--g", "0")
    assert code == EXIT_OK and out.splitlines()[-1] == "gaussian,0,4,2"
    cfg.write_text("colour = 3\n")
    assert call(capsys, "compute", "--config", str(cfg))[0] == EXIT_INPUT
    assert call(capsys, "compute", "--config", str(tmp_path / "missing.cfg"))[0] == EXIT_INPUT


def test_output_file(tmp_path, capsys):
    target = tmp_path / "curve.json"
    code, out, _ = call(capsys, "qmtm", "curve", "--alpha", "1/3", "--emit", "bergman", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text() == (GOLDEN / "qmtm_curve_bergman.json").read_text()
    assert sorted(os.listdir(tmp_path)) == ["curve.json"]


def test_help_exits_cleanly(capsys):
    assert call(capsys, "--help")[0] == EXIT_OK


def test_empty_result_set(capsys):
    code, out, _ = call(capsys, "qmtm", "blob-graphs", "--g", "0", "--k", "2,1", "--format", "form-text")
    assert code == EXIT_OK and out == ""


def test_fail_wins_over_pass():
    from toprec.cli import Check, Report, render
    rep = Report("mixed", checks=[Check("first", True), Check("second", False, "residual 1")])
    assert rep.failed
    text = render(rep, "form-text")
    assert text == "PASS [first]\nFAIL [second] residual 1\n"
    assert json.loads(render(rep, "json"))["status"] == "fail"
    assert render(Report("empty"), "form-text") == ""


def test_mixed_suite_exits_1(capsys):
    code, out, _ = call(capsys, "verify", "virasoro", "--p-max", "3", "--perturb", "s1*s2:1/3", "--format", "form-text")
    assert code == EXIT_FAIL
    assert "PASS" in out and "FAIL" in out
