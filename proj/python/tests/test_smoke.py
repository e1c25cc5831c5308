import math

import numpy as np
import pytest

import reach_sampler as rs

EX5 = {
    "n": 2,
    "m": 1,
    "T": 18,
    "x0": [78, 0],
    "dynamics": ["x2", "u1"],
    "constraint": {"box": {"lo": [-1], "hi": [1]}},
    "control": {"grid": {"times": [0, 6, 12, 18], "values": [-1, -1, 1, 1], "hold": "linear"}},
}


def test_ex5_endpoint_and_synthesis():
    sys_, u = rs.load_system(EX5)
    assert sys_.n == 2 and sys_.m == 1
    np.testing.assert_allclose(rs.endpoint(sys_, u), [0.0, 0.0], atol=1e-9)
    rep = rs.synthesize(sys_, u, [0.0, 0.0], 36, method="conic")
    assert rep["verdict"] == "success"
    assert rep["residual"] <= 1e-6
    assert len(rep["control"]) == 36
    assert all(-1 - 1e-9 <= v[0] <= 1 + 1e-9 for v in rep["control"])


def test_classify_weak_regular():
    sys_, u = rs.load_system(EX5)
    v = rs.classify(sys_, u, "weak-U")
    assert v["verdict"] == "regular"
    assert v["margin"] > 0


def test_example1_fails_without_certificate():
    cfg = {"n": 1, "m": 1, "T": 1, "x0": [0], "dynamics": ["1 + (u1 - t)^2"], "constraint": "all",
           "control": {"analytic": ["t"]}}
    sys_, u = rs.load_system(cfg)
    rep = rs.synthesize(sys_, u, [1.0], 8, method="needle")
    assert rep["verdict"] == "failure"
    assert rep["reason"] == "no-spanning-certificate"


def test_averaging_means():
    cfg = {"n": 1, "m": 1, "T": 1, "x0": [0], "dynamics": ["u1"], "control": {"analytic": ["t"]}}
    _, u = rs.load_system(cfg)
    vals = rs.average_project(u, rs.Partition.uniform(1.0, 4))
    np.testing.assert_allclose([v[0] for v in vals], [0.125, 0.375, 0.625, 0.875], atol=1e-14)


def test_nnls_and_subset_sum():
    x = rs.nnls(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([2.0, -1.0]))
    np.testing.assert_allclose(x, [2.0, 0.0], atol=1e-14)
    reachable, gap = rs.subset_sum_gap_uniform(4, 8)
    assert not reachable
    assert gap == pytest.approx(math.pi - 3.0, abs=1e-12)


def test_scenario_registry():
    assert "ex5" in rs.scenario_names()
    r = rs.run_scenario("ex2")
    assert r["passed"]


def test_bad_config_raises():
    with pytest.raises(ValueError):
        rs.load_system({"n": 1, "m": 1, "T": 1, "x0": [0], "dynamics": ["u1 +"], "control": {"constant": [0]}})
