import json
import subprocess
import sys

import pytest

from todatau.cli import main
from todatau.runner import RunConfig, explain, run


def test_list_fixtures(capsys):
    assert main(["list-fixtures"]) == 0
    out = capsys.readouterr().out
    for name in ("vacuum", "constant-u", "perturbed-negative",
                 "kdv-trivial", "kdv-exponential"):
        assert name in out


def test_explain_known_ids(capsys):
    for cid in ("prop2-residue", "fay-id2", "hqe-regularity", "tau-de1",
                "zakharov-shabat", "kdv-parity"):
        assert main(["explain", cid]) == 0
        out = capsys.readouterr().out
        assert "window" in out    # the truncation caveat is always present


def test_explain_unknown_id():
    assert main(["explain", "no-such-check"]) == 3


def test_usage_error_is_exit_3():
    assert main(["run", "--fixture", "not-a-fixture"]) == 3
    assert main(["frobnicate"]) == 3


def test_kdv_run_and_report(tmp_path, capsys):
    path = tmp_path / "report.json"
    code = main(["run", "--fixture", "kdv-trivial", "--pipeline", "kdv",
                 "--report", str(path)])
    assert code == 0
    payload = json.loads(path.read_text())
    assert payload["global_verdict"] == "pass"
    assert {c["check_id"] for c in payload["checks"]} == \
        {"kdv-parity", "kdv-regularity"}


def test_kdv_negative_run():
    assert main(["run", "--fixture", "kdv-perturbed", "--pipeline", "kdv"]) == 1


def test_config_file_round_trip(tmp_path):
    cfg_text = """[truncation]
eps_window = -6 6
lambda_window = 10
Lambda_window = 12
lambda_inner_window = 5
N_max = 2
D = 2
D_y = 2
x_degree_cap = 32
M_max = 1
R = 2

[initial_data]
u = 0:1, 1:1/2
v = 0
q_mode = symbolic

[run]
pipeline = dress
fixture = custom
"""
    path = tmp_path / "run.ini"
    path.write_text(cfg_text)
    cfg = RunConfig.from_file(path)
    assert cfg.eps_window == (-6, 6)
    assert cfg.Lambda_window == 12 and cfg.lambda_window == 10
    assert cfg.u == {0: 1, 1: __import__("fractions").Fraction(1, 2)}
    assert cfg.pipeline == "dress" and cfg.fixture == "custom"


def test_bad_config_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[truncation]\nlambda_inner_window = 99\n")
    with pytest.raises(ValueError):
        RunConfig.from_file(path)


def test_dress_pipeline_determinism():
    cfg1 = RunConfig(pipeline="dress", fixture="vacuum")
    cfg2 = RunConfig(pipeline="dress", fixture="vacuum")
    r1 = run(cfg1).to_json(strip_timing=True)
    r2 = run(cfg2).to_json(strip_timing=True)
    assert r1 == r2


def test_custom_fixture_dress_runs():
    # nonzero v exercises the genuinely infinite eps-expansions: wtilde_0
    # becomes exp of the discrete antiderivative, truncated at the window
    cfg = RunConfig(pipeline="dress", fixture="custom",
                    u={0: 1}, v={0: 1}, Lambda_window=8,
                    eps_window=(-6, 6))
    rep = run(cfg)
    assert rep.global_verdict == "pass"


def test_widen_shifts_all_windows():
    cfg = RunConfig().widen(2)
    assert cfg.eps_window == (-10, 10)
    assert cfg.Lambda_window == 20
    assert cfg.lambda_window == 14
    assert cfg.lambda_inner_window == 8


def test_installed_entry_point():
    out = subprocess.run([sys.executable, "-m", "todatau.cli",
                          "list-fixtures"], capture_output=True, text=True)
    assert out.returncode == 0 and "vacuum" in out.stdout


def test_parallel_jobs_sweep():
    # the cell sweep distributes over a process pool; verdicts unchanged
    cfg = RunConfig(pipeline="hqe", fixture="trivial-tau", jobs=2)
    rep = run(cfg)
    assert rep.global_verdict == "fail"
    witnesses = {c.witness for c in rep.checks if c.verdict == "fail"}
    assert "Q^{1/2}" in witnesses or "-Q^{1/2}" in witnesses


def test_negative_hqe_fixture_exit_code():
    cfg = RunConfig(pipeline="hqe", fixture="perturbed-negative")
    rep = run(cfg)
    assert rep.global_verdict == "fail" and rep.exit_code() == 1
    assert any(c.witness for c in rep.checks if c.verdict == "fail")


def test_unit_q_mode_dress():
    cfg = RunConfig(pipeline="dress", fixture="vacuum", q_mode="unit",
                    Lambda_window=8)
    assert run(cfg).global_verdict == "pass"
