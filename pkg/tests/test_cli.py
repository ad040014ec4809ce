import json

import pytest

from substrate.cli import run


def _report(capsys, argv, code=0):
    assert run(argv) == code
    return json.loads(capsys.readouterr().out)


def test_info(capsys):
    rep = _report(capsys, ["info", "--rule", "thue_morse"])
    assert rep["schema"] == "substrate.report/1" and rep["status"] == "ok"
    assert rep["result"]["alphabet"] == ["a", "b"]


def test_fibre_count(capsys):
    rep = _report(capsys, ["fibre", "--rule", "mask5", "--pattern", "P_B", "--no-elements"])
    assert rep["result"]["count"] == 1


def test_uc_verify(capsys):
    rep = _report(capsys, ["uc-verify", "--rule", "mask5", "--pattern", "P_A", "--power", "2"])
    assert rep["result"]["count"] == 25 and rep["result"]["bijection_with_cosets"]


def test_recognise_inconclusive(capsys):
    rep = _report(capsys, ["recognise", "--rule", "mask5", "--recognisability-cap", "3"], code=3)
    assert rep["status"] == "inconclusive"
    assert rep["error"]["reason"] == "recognisability_cap_exceeded"
    assert rep["result"]["witness"]


@pytest.mark.parametrize("argv", [
    ["fibre", "--rule", "mask5", "--pattern", "nope"],
    ["fibre", "--rule", "mask5", "--pattern", "P_B", "--power", "0"],
    ["info", "--rule", "configs/missing.toml"],
    ["info", "--rule", "no_such_rule"],
    ["render", "--rule", "thue_morse"],
])
def test_validation_errors(capsys, argv):
    rep = _report(capsys, argv, code=2)
    assert rep["status"] == "error" and rep["error"]["reason"]


def test_usage_error_exit_code(capsys):
    assert run(["fibre", "--bogus"]) == 2


def test_verify_fault_exit_code(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run(["verify", "--only", "7", "--inject-fault", "wrong_index", "--quiet", "--out", str(out)]) == 1
    rep = json.loads(out.read_text())
    assert rep["status"] == "failed" and rep["result"]["failed"] == [7]


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["fibre", "--rule", "mask5", "--pattern", "P_A", "--pattern", "P_B", "--power", "2"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
    ja.pop("argv"), jb.pop("argv")
    assert ja == jb


def test_threads_do_not_change_output(tmp_path, monkeypatch):
    argv = ["fibre", "--rule", "mask5", "--pattern", "P_A", "--pattern", "P_B", "--no-elements"]
    one, four = tmp_path / "1.json", tmp_path / "4.json"
    run(argv + ["--out", str(one)])
    monkeypatch.setenv("SUBSTRATE_THREADS", "4")
    run(argv + ["--out", str(four)])
    assert json.loads(one.read_text())["result"] == json.loads(four.read_text())["result"]
    monkeypatch.setenv("SUBSTRATE_THREADS", "zero")
    assert run(argv + ["--out", str(four)]) == 2


def test_workspace_defaults_and_override(tmp_path, capsys):
    ws = tmp_path / "ws.toml"
    ws.write_text('rule = "mask5"\npatterns = ["P_B"]\npower = 2\n[output]\nreport = "%s"\n'
                  % (tmp_path / "r.json").as_posix())
    assert run(["fibre", "--config", str(ws), "--no-elements"]) == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["inputs"]["power"] == 2 and rep["result"]["count"] == 25
    assert run(["fibre", "--config", str(ws), "--power", "1", "--no-elements", "--out", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["count"] == 1


def test_workspace_rejects_unknown_keys(tmp_path, capsys):
    ws = tmp_path / "ws.toml"
    ws.write_text('rule = "mask5"\ncolour = "red"\n')
    assert run(["info", "--config", str(ws)]) == 2


def test_render(tmp_path):
    svg = tmp_path / "c.svg"
    rep = tmp_path / "c.json"
    assert run(["render", "--rule", "chair", "--depth", "3", "--out", str(svg), "--report", str(rep)]) == 0
    assert svg.read_text().count("<path") == 64
    assert json.loads(rep.read_text())["result"]["tiles"] == 64


def test_shipped_workspace(capsys):
    from pathlib import Path

    ws = Path(__file__).resolve().parents[1] / "configs" / "workspace.toml"
    rep = _report(capsys, ["fibre", "--config", str(ws), "--no-elements", "--out", "-"])
    assert rep["inputs"]["rule"].endswith("mask5.toml")
    assert rep["inputs"]["patterns"] == ["periodic:A", "constant:B"]
