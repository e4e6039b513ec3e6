import json
import subprocess
import sys


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "epflab.cli", *args],
        capture_output=True, text=True, timeout=300,
    )


def test_list_problems():
    out = run_cli("list-problems")
    assert out.returncode == 0
    for name in ("toy-lin-1", "toy-eq-1", "toy-socp-1", "toy-socp-2", "toy-sdp-1"):
        assert name in out.stdout


def test_unknown_problem_exit_3():
    out = run_cli("check-kkt", "--problem", "nope", "--x", "0")
    assert out.returncode == 3


def test_bad_numeric_exit_3():
    out = run_cli("check-kkt", "--problem", "toy-lin-1", "--x", "zero")
    assert out.returncode == 3


def test_check_kkt_pass():
    out = run_cli("check-kkt", "--problem", "toy-socp-1", "--x", "1,1", "--lambda", "-2,2")
    assert out.returncode == 0
    assert "kkt_residual" in out.stdout


def test_check_kkt_fail_exit_2():
    out = run_cli("check-kkt", "--problem", "toy-eq-1", "--x", "1,1", "--mu", "0")
    assert out.returncode == 2


def test_sweep_csv(tmp_path):
    dest = tmp_path / "sweep.csv"
    out = run_cli("sweep", "--problem", "toy-lin-1", "--penalty", "linear",
                  "--c-min", "0.5", "--c-max", "8", "--c-steps", "4",
                  "--starts", "8", "--seed", "0", "--out", str(dest))
    assert out.returncode == 0
    lines = dest.read_text().strip().split("\n")
    assert lines[0] == "c,best_F,best_x_0,feas_gap,dist_to_xstar,starts_agreeing"
    assert len(lines) == 5


def test_estimate_cstar_json(tmp_path):
    dest = tmp_path / "cstar.json"
    out = run_cli("estimate-cstar", "--problem", "toy-lin-1", "--penalty", "linear",
                  "--c-lo", "0.25", "--c-hi", "64", "--starts", "8", "--out", str(dest))
    assert out.returncode == 0
    doc = json.loads(dest.read_text())
    assert abs(doc["c_star"] - 1.0) <= 0.05


def test_estimate_cstar_not_found_exit_2():
    # toy-eq-1 with the HPR multiplier forced to 0 is the plain quadratic
    # penalty, which is not exact at any finite c.
    out = run_cli("estimate-cstar", "--problem", "toy-eq-1", "--penalty", "al-hpr",
                  "--lambda", "0", "--c-lo", "1", "--c-hi", "64", "--starts", "8")
    assert out.returncode == 2
    assert "not found" in out.stderr


def test_gradcheck_smooth_penalty():
    out = run_cli("gradcheck", "--problem", "toy-eq-1", "--penalty", "al-hpr",
                  "--c", "4", "--points", "10")
    assert out.returncode == 0


def test_localize_json(tmp_path):
    dest = tmp_path / "report.json"
    out = run_cli("localize", "--problem", "toy-lin-1", "--penalty", "linear",
                  "--c-min", "0.5", "--c-max", "32", "--c-steps", "6",
                  "--starts", "8", "--out", str(dest))
    assert out.returncode == 0
    doc = json.loads(dest.read_text())
    assert doc["verdicts"]["penalty_type"] is True


def test_config_overrides_defaults(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"c-steps": 4, "starts": 8, "c-max": 8.0}))
    dest = tmp_path / "sweep.csv"
    out = run_cli("sweep", "--problem", "toy-lin-1", "--penalty", "linear",
                  "--config", str(cfg), "--out", str(dest))
    assert out.returncode == 0
    assert len(dest.read_text().strip().split("\n")) == 5
