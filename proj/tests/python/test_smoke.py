import math

import numpy as np
import pytest

import locid


def test_svd_matches_numpy_on_weighted_gram():
    rng = np.random.default_rng(0)
    k = rng.normal(size=(5, 4))
    wd = rng.uniform(0.2, 1.0, 4)
    wc = rng.uniform(0.2, 1.0, 5)
    out = locid.svd(k, np.arange(4.0).reshape(-1, 1), wd, np.arange(5.0).reshape(-1, 1), wc)
    b = np.sqrt(wc)[:, None] * k * np.sqrt(wd)[None, :]
    ref = np.linalg.svd(b, compute_uv=False)
    assert np.allclose(out["singular_values"], ref, rtol=1e-10, atol=0)
    assert out["hs_norm"] == pytest.approx(np.sqrt((b**2).sum()))


def test_counterexample():
    r = locid.counterexample(4)
    assert r["m_norm"] <= 1e-12
    assert r["dev_norm"] == pytest.approx(0.5, abs=1e-12)
    assert not r["in_N"]
    assert r["L"] >= 1.0


def test_two_point_partialling_out():
    r = locid.partial_out(np.array([[1.0], [0.0]]), np.ones((2, 1)), np.array([0.5, 0.5]), np.ones(1))
    assert r["pi"][0, 0] == pytest.approx(0.25, abs=1e-12)
    assert r["eps1"] == pytest.approx(math.sqrt(0.125), abs=1e-9)


def test_perron_frobenius_hand_case():
    r = locid.perron_frobenius(np.array([[2.0, 1.0], [1.0, 2.0]]), np.ones(2))
    assert r["rho"] == pytest.approx(3.0, abs=1e-10)
    assert np.allclose(r["g"], [1 / math.sqrt(2)] * 2, atol=1e-10)
    with pytest.raises(locid.LocidError):
        locid.perron_frobenius(np.array([[1.0, 0.0], [1.0, 1.0]]), np.ones(2))


def test_models():
    q = locid.quantile_model(nx=21, nw=21, ny_half=40)
    assert q["base_residual"] < 1e-12
    assert q["L1"] > 0 and q["L2"] >= 1.0
    assert locid.index_diagnose(rho=0.5)["consistent"]
    e = locid.ccapm_eigenpair(n_c=41, n_z=5)
    assert e["delta"] == pytest.approx(e["delta0"], abs=1e-10)
    assert min(e["g"]) > 0


def test_genericity_and_cones():
    r = locid.mc_injectivity(10, 2.0, 20, 1e-12, 1)
    assert r["fraction_below_tol"] == 0.0
    assert locid.cone_rule_suite(500, 4, 1)["total_violations"] == 0


def test_run_experiment():
    names = [e["name"] for e in locid.list_experiments()]
    assert "ccapm" in names and len(names) == 7
    rep = locid.run_experiment({"experiment": "counterexample", "seed": 1})
    assert rep["summary"]["pass"]
    with pytest.raises(locid.ConfigError):
        locid.run_experiment({"experiment": "counterexample"})
