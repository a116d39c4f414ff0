import csv
import json

import numpy as np
import pytest

import geoquad


def test_hat_vee_round_trip():
    S = geoquad.hat([1.0, 2.0, 3.0])
    assert np.array_equal(S, [[0, -3, 2], [3, 0, -1], [-2, 1, 0]])
    assert np.array_equal(geoquad.vee(S), [1.0, 2.0, 3.0])


def test_vee_rejects_non_skew():
    with pytest.raises(geoquad.GeoquadError, match="NotSkewSymmetric"):
        geoquad.vee(np.eye(3))


def test_exp_and_psi():
    R = geoquad.exp_so3([0.0, 0.0, np.pi / 2])
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-12)
    assert geoquad.psi(R, np.eye(3)) == pytest.approx(1.0)
    assert np.allclose(geoquad.attitude_error(R, np.eye(3)), [0, 0, 1], atol=1e-15)


def test_mixing():
    A = geoquad.mixing_matrix()
    assert np.linalg.det(A) == pytest.approx(8 * 8.004e-3 * 0.315**2, rel=1e-12)
    p = geoquad.reference_params()
    rotors = geoquad.mixing_to_rotors(p["mass"] * p["gravity"], [0, 0, 0])
    assert np.allclose(rotors, 10.64385)
    f, M = geoquad.mixing_from_rotors(geoquad.mixing_to_rotors(3.0, [0.1, -0.2, 0.3]))
    assert f == pytest.approx(3.0, rel=1e-12)
    assert np.allclose(M, [0.1, -0.2, 0.3], atol=1e-12)


def test_registry_and_config():
    assert geoquad.scenario_names() == ["case1", "case2"]
    cfg = geoquad.parse_config(geoquad.config_to_json("case2"))
    assert cfg["segments"] == ["velocity", "attitude", "position", "attitude", "position"]
    with pytest.raises(geoquad.GeoquadError, match="mass must be positive"):
        geoquad.parse_config(json.dumps({"scenario": "case1", "params": {"mass": -1}}))
    with pytest.raises(geoquad.GeoquadError, match="line 1"):
        geoquad.parse_config("{")


def test_run_case1():
    r = geoquad.run("case1")
    assert not r["aborted"]
    cols = r["columns"]
    assert len(cols["t"]) == 1001
    assert cols["Psi"][0] == pytest.approx(1.995, abs=0.01)
    assert np.linalg.norm([cols["x1"][-1], cols["x2"][-1], cols["x3"][-1]]) < 1e-3


def test_csv_contract(tmp_path):
    prefix = tmp_path / "case2"
    r = geoquad.run("case2", duration=1.0, out=str(prefix))
    with open(f"{prefix}.csv", newline="") as fh:
        assert fh.readline().strip() == "# schema_version=1"
        rows = list(csv.reader(fh))
    assert rows[0] == list(geoquad.trace_columns())
    assert len(rows) - 1 == len(r["columns"]["t"]) == 101
    assert {row[rows[0].index("mode")] for row in rows[1:]} == {"velocity"}
    report = json.loads((tmp_path / "case2.report").read_text())
    assert report["scenario"] == "case2"


def test_check_case2():
    rep = geoquad.check("case2")
    assert not rep["aborted"]
    assert len(rep["segments"]) == 5
