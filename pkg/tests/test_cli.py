import json

import numpy as np
import pytest

from povmopt.cli import CSV_COLUMNS, main


@pytest.fixture
def model2(tmp_path):
    path = tmp_path / "model2.json"
    path.write_text(json.dumps({"family": "bloch", "theta": [0, 0, 0], "active": [1, 2]}))
    return str(path)


@pytest.fixture
def dephasing(tmp_path):
    path = tmp_path / "deph.json"
    path.write_text(json.dumps({"family": "dephasing", "theta": [0.3]}))
    return str(path)


def test_optimize_writes_reference_objective(model2, tmp_path):
    out = tmp_path / "run.json"
    code = main(["optimize", "--model", model2, "-K", "3", "--restarts", "3", "--seed", "5", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["run"]["final_objective"] == pytest.approx(4.0, abs=1e-6)
    assert payload["povm"]["dim"] == 2


def test_optimize_with_one_outcome_fails(model2):
    assert main(["optimize", "--model", model2, "-K", "1", "--restarts", "2"]) == 1


def test_optimize_missing_file_fails(tmp_path):
    assert main(["optimize", "--model", str(tmp_path / "nope.json")]) == 1


def test_bounds_dephasing(dephasing, tmp_path):
    out = tmp_path / "bounds.json"
    assert main(["bounds", "--model", dephasing, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["sld"] == pytest.approx(2.0, abs=1e-10)
    assert report["holevo"] == pytest.approx(2.8, abs=1e-10)
    # qubit NH equals the Gill-Massar value (Tr R)^2 = 4 here since J_S = I
    assert report["nh"] == pytest.approx(4.0, abs=1e-5)


def test_sweep_csv_layout_and_determinism(model2, tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = [
        "sweep", "--model", model2, "--grid", "0:0.5:2", "--copies", "1",
        "-K", "3", "--restarts", "2", "--seed", "1", "--bounds", "sld,holevo",
    ]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    text = out1.read_text()
    assert text == out2.read_text()  # byte-identical re-run
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    first = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert first["epsilon"] == "" and first["nh"] == ""  # absent fields stay empty
    assert float(first["objective"]) == pytest.approx(4.0, abs=1e-5)
    assert float(first["sld"]) == pytest.approx(2.0, abs=1e-6)


def test_sweep_dephasing_holevo_column(dephasing, tmp_path):
    out = tmp_path / "deph.csv"
    args = [
        "sweep", "--model", dephasing, "--grid", "0.2,0.8", "--copies", "1",
        "-K", "3", "--restarts", "2", "--seed", "0", "--bounds", "holevo", "--out", str(out),
    ]
    assert main(args) == 0
    rows = [dict(zip(CSV_COLUMNS, line.split(","))) for line in out.read_text().strip().splitlines()[1:]]
    for row in rows:
        eps = float(row["epsilon"])
        assert float(row["holevo"]) == pytest.approx(2 + 2 * abs(2 * eps - 1), abs=1e-8)
        assert row["theta"] == ""


def test_analytic_trine(tmp_path, capsys):
    out = tmp_path / "trine.json"
    assert main(["analytic", "trine", "0.0", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["objective"] == pytest.approx(4.0, abs=1e-9)
    assert payload["optimality_residual"] < 1e-10
    assert payload["povm"]["K"] == 3


def test_analytic_randomized_pvm(tmp_path):
    out = tmp_path / "pvm.json"
    assert main(["analytic", "randomized_pvm", "--r", "0.6", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    weights = sorted({round(sum(el[a][a][0] for a in range(2)), 9) for el in payload["povm"]["elements"]})
    assert weights == [round(0.8 / 1.8, 9), round(1.0 / 1.8, 9)]


def test_analytic_infeasible_exit_code():
    assert main(["analytic", "three_outcome", "--r", "0.5", "--q1", "0.9"]) == 1
