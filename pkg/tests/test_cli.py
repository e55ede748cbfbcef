import copy
import csv
import io
import json

import jsonschema
import pytest

from conftest import load_schema, run_cli
from diracmaxwell.expander import golden_data


def _json(*args, check=0):
    return json.loads(run_cli(*args, "--format", "json", "--no-timestamp", check=check).stdout)


@pytest.fixture
def corrupted_golden(tmp_path):
    data = copy.deepcopy(golden_data())
    term = data["systems"]["eq2_9"]["equations"][2][1]
    term["coeff"] = [-term["coeff"][0], -term["coeff"][1]]
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(data))
    return path


def test_expand_text():
    out = run_cli("expand", "--no-timestamp", check=0).stdout.splitlines()
    assert out[0] == "(1/c)·∂t E_x − ∂y H_z − i(ω/c)·E_x = 0"
    assert len(out) == 4


def test_expand_timestamp_line():
    out = run_cli("expand", check=0).stdout
    assert out.startswith("# generated ")


@pytest.mark.parametrize("args", [("expand", "--axis", "w"), ("expand", "--mass-omega", "x"),
                                  ("bogus",), (), ("simulate", "--format", "yaml")])
def test_usage_errors_exit_2(args):
    proc = run_cli(*args)
    assert proc.returncode == 2


def test_expand_json_schema():
    data = _json("expand", "--axis", "x", "--orientation", "positive")
    jsonschema.validate(data, load_schema("expand"))
    assert data["command"] == "expand" and "timestamp" not in data


def test_timestamp_in_json():
    data = json.loads(run_cli("expand", "--format", "json", check=0).stdout)
    assert "timestamp" in data
    jsonschema.validate(data, load_schema("expand"))


def test_verify_all_passes():
    data = _json("verify", "--all")
    jsonschema.validate(data, load_schema("verify"))
    assert data["passed"] and len(data["checks"]) >= 20


def test_verify_single_reference():
    run_cli("verify", "--reference", "eq2_8", "--side", "row", check=0)
    # Column minus is not the eq2_8 system.
    run_cli("verify", "--reference", "eq2_8", check=1)


def test_verify_corrupted_golden(corrupted_golden):
    proc = run_cli("verify", "--all", "--golden", corrupted_golden)
    assert proc.returncode == 1
    assert "eq2_9 eq 3" in proc.stdout


def test_selftest_passes():
    data = _json("selftest")
    jsonschema.validate(data, load_schema("selftest"))
    assert data["passed"]


def test_selftest_corrupted_golden(corrupted_golden):
    proc = run_cli("selftest", "--golden", corrupted_golden, "--no-timestamp")
    assert proc.returncode == 1
    assert "eq2_9 eq 3" in proc.stdout


def test_selftest_deterministic():
    a = run_cli("selftest", "--seed", 42, "--no-timestamp", check=0).stdout
    b = run_cli("selftest", "--seed", 42, "--no-timestamp", check=0).stdout
    assert a == b


def test_report_example():
    data = _json("report", "--E", 3, 0, 4, "--H", 1, 0, 2)
    jsonschema.validate(data, load_schema("report"))
    text = json.dumps(data)
    assert "20" in text and "22" in text


def test_report_frame_file(tmp_path):
    path = tmp_path / "frame.json"
    path.write_text(json.dumps({"E": [[3, 0], [0, 0], [4, 0]], "H": [[1, 0], [0, 0], [2, 0]]}))
    assert _json("report", "--frame", path) == _json("report", "--E", 3, 0, 4, "--H", 1, 0, 2)


def test_report_frame_rejects_bare_reals(tmp_path):
    path = tmp_path / "frame.json"
    path.write_text(json.dumps({"E": [3, 0, 4], "H": [1, 0, 2]}))
    assert run_cli("report", "--frame", path).returncode == 2


def test_simulate_csv():
    out = run_cli("simulate", "--n-cells", 16, "--steps", 5, "--format", "csv", "--no-timestamp", check=0).stdout
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["step", "t", "total_energy", "balance_residual", "probe_re", "probe_im"]
    assert len(rows) == 7


def test_simulate_json_and_output(tmp_path):
    path = tmp_path / "sim.json"
    run_cli("simulate", "--n-cells", 16, "--steps", 4, "--mass-omega", 1.0, "--format", "json",
            "--no-timestamp", "--output", path, check=0)
    data = json.loads(path.read_text())
    jsonschema.validate(data, load_schema("simulate"))


def test_simulate_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n_cells": 16, "mass_omega": 0.5}))
    data = _json("simulate", "--config", path, "--steps", 2)
    jsonschema.validate(data, load_schema("simulate"))


def test_lagrangian_schema():
    data = _json("lagrangian", "--mass-omega", 1.0, "--k", 2.0)
    jsonschema.validate(data, load_schema("lagrangian"))


def test_fierz():
    data = _json("fierz", "--trials", 50)
    jsonschema.validate(data, load_schema("fierz"))
    assert data["passed"]


def test_nonlinear_csv():
    out = run_cli("nonlinear", "--seed", 3, "--format", "csv", "--no-timestamp", check=0).stdout
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["iter", "amplitude_sq", "residual_norm"]
    assert float(rows[-1][2]) <= 1e-12


def test_nonlinear_json():
    data = _json("nonlinear", "--seed", 3)
    jsonschema.validate(data, load_schema("nonlinear"))


def test_nonlinear_no_convergence_exits_1():
    proc = run_cli("nonlinear", "--initial", "[[0,0],[0,0],[0,0],[0,0]]", "--max-iter", 5, "--no-timestamp")
    assert proc.returncode == 1


def test_nonlinear_seed_determinism():
    a = run_cli("nonlinear", "--seed", 9, "--format", "json", "--no-timestamp", check=0).stdout
    b = run_cli("nonlinear", "--seed", 9, "--format", "json", "--no-timestamp", check=0).stdout
    assert a == b
