import csv
import io
import json
import subprocess
import sys

import pytest

from cubic_contest.cli import main
from cubic_contest.scenarios import NAMES, load, reproduce

from oracles import TWO_PEAK


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def uniform_file(tmp_path):
    p = tmp_path / "uniform.json"
    p.write_text(json.dumps({"kind": "uniform", "alpha": 0.25, "beta": 0.75}))
    return str(p)


@pytest.fixture
def two_peak_file(tmp_path):
    p = tmp_path / "mix.json"
    p.write_text(json.dumps({"kind": "beta_mixture", "alpha": 1.0, "beta": 2.0,
                             "components": [list(c) for c in TWO_PEAK["components"]]}))
    return str(p)


def test_solve_complete_neutral(capsys):
    code, out, _ = run(["solve", "complete", "--a", "0", "--b", "1", "--c", "1", "--theta", "0.5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["equilibrium"]["kind"] == "pure"
    assert doc["equilibrium"]["x_star"] == pytest.approx(0.25, abs=1e-15)
    assert set(doc) == {"problem", "equilibrium", "checks"}


def test_solve_complete_mixed_inapplicable(capsys):
    code, out, _ = run(["solve", "complete", "--a", "50", "--b", "0.1", "--c", "1", "--theta", "0.5"], capsys)
    assert code == 0
    assert json.loads(out)["checks"]["branch_admissibility"] == "inapplicable"


def test_solve_bayes_empowerment(uniform_file, capsys):
    code, out, _ = run(["solve", "bayes", "--a", "-1", "--b", "1", "--c", "1", "--dist", uniform_file], capsys)
    assert code == 0
    eq = json.loads(out)["equilibrium"]
    assert eq["kind"] == "affine" and eq["dropout_rate"] == 0.0


def test_solve_bayes_two_peak_cutoff(two_peak_file, capsys):
    code, out, _ = run(["solve", "bayes", "--a", "46.4315598214", "--b", "6", "--c", "2.002930",
                        "--dist", two_peak_file], capsys)
    assert code == 0
    eq = json.loads(out)["equilibrium"]
    assert eq["kind"] == "cutoff"
    assert eq["t"] - 1.0 == pytest.approx(0.7703043128, abs=1e-9)


def test_invalid_input_exit_code(capsys):
    code, _, err = run(["solve", "complete", "--a", "1", "--b", "-1", "--c", "1", "--theta", "0.5"], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "invalid_input"
    code, _, err = run(["solve", "bayes", "--a", "1", "--b", "1", "--c", "1"], capsys)
    assert code == 2


def test_missing_file_is_invalid_input(tmp_path, capsys):
    code, _, err = run(["solve", "bayes", "--a", "1", "--b", "1", "--c", "1",
                        "--dist", str(tmp_path / "nope.json")], capsys)
    assert code == 2


def test_sweep_complete_csv(capsys):
    code, out, _ = run(["sweep", "--var", "a", "--from", "-2", "--to", "6", "--n", "8001",
                        "--b", "1", "--c", "1", "--theta", "0.5"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["a", "regime", "E1", "variance", "dropout_rate", "payoff"]
    body = rows[1:]
    assert len(body) == 8001
    assert float(body[0][0]) == -2 and float(body[-1][0]) == 6
    best = max(body, key=lambda r: float(r[2]))
    assert float(best[0]) == pytest.approx(2.0, abs=1e-3)
    assert 2 * float(best[2]) == pytest.approx(1.0, abs=1e-11)
    assert {r[1] for r in body} == {"pure", "mixed"}
    # 12 significant digits
    assert all(len(r[2].replace("-", "").replace(".", "").lstrip("0").split("e")[0]) <= 12 for r in body)


def test_sweep_two_peak_regimes(two_peak_file, capsys):
    code, out, _ = run(["sweep", "--from", "1", "--to", "120", "--n", "60", "--b", "6", "--c", "2.002930",
                        "--dist", two_peak_file], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    e = [float(r["E1"]) for r in rows]
    a = [float(r["a"]) for r in rows]
    peaks = [a[i] for i in range(1, len(e) - 1) if e[i] > e[i - 1] and e[i] > e[i + 1]]
    troughs = [a[i] for i in range(1, len(e) - 1) if e[i] < e[i - 1] and e[i] < e[i + 1]]
    step = a[1] - a[0]
    assert len(peaks) == 2 and len(troughs) == 1
    assert abs(peaks[0] - 46.43) < step and abs(peaks[1] - 108.97) < step
    assert abs(troughs[0] - 95.86) < step
    # a = 1 already exceeds a_D = 0.956, so every row has dropout
    assert {r["regime"] for r in rows} == {"cutoff"}


def test_sweep_fig_main_transitions(tmp_path, capsys):
    p = tmp_path / "main.json"
    s = 0.125**0.5
    p.write_text(json.dumps({"kind": "discrete", "atoms": [[0.5 - s, 0.5], [0.5 + s, 0.5]]}))
    code, out, _ = run(["sweep", "--from", "-4", "--to", "6", "--n", "101", "--b", "1", "--c", "1",
                        "--dist", str(p)], capsys)
    assert code == 0
    regimes = [r["regime"] for r in csv.DictReader(io.StringIO(out))]
    assert regimes[0] == "affine" and "cutoff" in regimes


def test_sweep_errors(capsys):
    code, _, _ = run(["sweep", "--from", "0", "--to", "1", "--n", "1", "--b", "1", "--c", "1",
                      "--theta", "0.5"], capsys)
    assert code == 2
    code, _, _ = run(["sweep", "--from", "0", "--to", "1", "--n", "5", "--b", "1", "--c", "1"], capsys)
    assert code == 2


def test_solve_verify_round_trip(uniform_file, tmp_path, capsys):
    out_path = tmp_path / "sol.json"
    code, _, _ = run(["solve", "bayes", "--a", "0.4", "--b", "0.6", "--c", "1",
                      "--dist", uniform_file, "--out", str(out_path)], capsys)
    assert code == 0
    # uniform(0.25, 0.75) at c = 1: check the verification exit code agrees with the report
    code, out, _ = run(["verify", "--scenario", str(out_path), "--grid-n", "2000"], capsys)
    rep = json.loads(out)
    assert code == (0 if rep["passed"] else 4)


def test_verify_round_trip_passes(tmp_path, capsys):
    dist = tmp_path / "d.json"
    dist.write_text(json.dumps({"kind": "uniform", "alpha": 0.7, "beta": 0.9}))
    sol = tmp_path / "sol.json"
    assert run(["solve", "bayes", "--a", "0.4", "--b", "0.6", "--c", "1", "--dist", str(dist),
                "--out", str(sol)], capsys)[0] == 0
    code, out, _ = run(["verify", "--scenario", str(sol)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["grid"]["n"] == 10000


def test_verify_extreme_suppression_fails(capsys):
    code, out, _ = run(["verify", "--mode", "complete", "--a", "1000", "--b", "1", "--c", "1",
                        "--theta", "0.5"], capsys)
    assert code == 4
    assert json.loads(out)["raw_max_gain"] > 0


def test_verify_failed_participation(capsys):
    code, out, _ = run(["verify", "--mode", "complete", "--a", "0", "--b", "0.3", "--c", "2",
                        "--theta", "0.9"], capsys)
    assert code == 4
    assert json.loads(out)["argmax_deviation"] == 0.0


def test_verify_needs_problem(capsys):
    assert run(["verify"], capsys)[0] == 2


@pytest.mark.parametrize("name", [n for n in NAMES if n != "two-peak"])
def test_reproduce_scenarios(name, capsys):
    code, out, _ = run(["reproduce", name], capsys)
    assert code == 0, out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["status"] == "PASS" for r in rows)


def test_reproduce_json_and_unknown(capsys):
    code, out, _ = run(["reproduce", "thresholds", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"]
    keys = {r["key"] for r in doc["rows"]}
    assert {"rho1", "rho2"} <= keys
    code, _, err = run(["reproduce", "nope"], capsys)
    assert code == 2


def test_scenarios_carry_provenance():
    for name in NAMES:
        scen = load(name)
        for item in scen["expected"]:
            assert item["provenance"] in {"published", "derived", "exact"}


def test_reproduce_two_peak():
    rows = reproduce("two-peak")
    failed = [r for r in rows if not r.passed]
    assert not failed, failed


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cubic_contest", "solve", "complete", "--a", "0",
                          "--b", "1", "--c", "1", "--theta", "0.5"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["equilibrium"]["x_star"] == 0.25
