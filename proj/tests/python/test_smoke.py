import math

import numpy as np
import pytest

import lbmo_euler as le


def torus(n):
    return le.GridSpec.torus(n, n)


def test_taylor_green_velocity_is_exact():
    g = torus(64)
    x = np.arange(64) * g.hx
    X, Y = np.meshgrid(x, x)  # arrays are indexed [j, i]
    u1, u2 = le.velocity(g, le.taylor_green(g))
    assert np.max(np.abs(u1 + np.sin(X) * np.cos(Y))) < 1e-12
    assert np.max(np.abs(u2 - np.cos(X) * np.sin(Y))) < 1e-12


def test_velocity_rejects_nonzero_mean():
    g = torus(32)
    with pytest.raises(ValueError):
        le.velocity(g, np.ones((32, 32)))


def test_norms_of_constant_and_scaling():
    g = torus(256)
    rep = le.lbmo_estimate(g, np.full((256, 256), 3.0), j_max=3)
    assert abs(rep["lbmo"]) < 1e-12
    assert rep["lp2"] == pytest.approx(3.0 * 2 * math.pi, rel=1e-12)
    f = le.taylor_green(g)
    a = le.lbmo_estimate(g, f, j_max=3)["lbmo"]
    b = le.lbmo_estimate(g, 2.0 * f, j_max=3)["lbmo"]
    assert b == pytest.approx(2.0 * a, rel=1e-12)


def test_distortion_functions():
    assert le.phi(math.exp(-1), math.exp(-3)) == pytest.approx(2.0)
    assert le.phi(math.e, 1 / math.e) == pytest.approx(4.0)
    assert le.g_of(math.e) == pytest.approx(math.log(2.0))
    assert le.g_psi(3.0, 1.0) == pytest.approx(4 * math.e * 3.0)


def test_solver_keeps_taylor_green():
    g = torus(64)
    w0 = le.taylor_green(g)
    out = le.solve(g, w0, dt=1e-2, t_final=0.2, diag_every=10)
    assert out["t"] == pytest.approx([0.0, 0.1, 0.2])
    assert np.max(np.abs(out["final"] - w0)) < 1e-10


def test_scenario_round_trip(tmp_path):
    cfg = le.default_config("kernel-oracle", seed=1)
    cfg["out_dir"] = str(tmp_path / "k")
    cfg["params"]["n"] = 64
    cfg["params"]["direct_n"] = 64
    report = le.run_scenario(cfg)
    assert report["verdict"] == "pass"
    assert le.recompute_report(tmp_path / "k") == report
    assert "conservation" in le.known_scenarios()
    with pytest.raises(ValueError):
        le.run_scenario({"scenario": "kernel-oracle", "params": {"bogus": 1}})
