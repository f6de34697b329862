import math

import pytest

import irtorus


def test_theta_example():
    t = irtorus.theta_exponents(2, 6)
    assert t["theta_conj"] == "2"
    assert t["theta_proved"] == "2"
    assert irtorus.theta_exponents(4, 7, 2)["theta1"] == "6/17"


def test_catalog_defaults_validate():
    names = [e["name"] for e in irtorus.catalog()]
    assert names == ["theta", "scan", "optimality", "levelset", "dioph",
                     "refocus", "weyl", "arcs", "count", "badness"]
    for e in irtorus.catalog():
        irtorus.validate(e["defaults"])


def test_empty_n_list_rejected():
    cfg = irtorus.defaults("scan")
    cfg["N"] = []
    with pytest.raises(irtorus.ConfigError):
        irtorus.validate(cfg)


def test_run_theta_and_verify(tmp_path):
    cfg = irtorus.defaults("theta")
    cfg["output_dir"] = str(tmp_path)
    report = irtorus.run(cfg, write=True)
    assert report["result"]["theta_conj"] == 2.0
    assert report["config_hash"] == irtorus.config_hash(cfg)
    assert irtorus.verify(tmp_path)["ok"]


def test_small_scan_is_worker_independent():
    cfg = irtorus.defaults("scan")
    cfg["N"] = [4, 6]
    saved = irtorus.worker_count()
    irtorus.set_worker_count(1)
    a = irtorus.run(cfg)
    irtorus.set_worker_count(4)
    b = irtorus.run(cfg)
    irtorus.set_worker_count(saved)
    assert a == b


def test_oracle_functions():
    assert irtorus.eisenstein_triple_count(0, 2, 20) == 6
    assert irtorus.x_count([1.0, 1.5], 16, 200.0) == 31 * 31
    assert irtorus.nearest_int_dist(2.75) == 0.25
    a, q, delta = irtorus.dirichlet_approx(0.3, 10)
    assert 1 <= q <= 10 and abs(q * 0.3 - a) <= 0.1 + 1e-12
    assert (a, q) == (1, 3)
    assert abs(irtorus.weyl_sum(0.0, 0.0, 4)) > 0
    beta = irtorus.sample_generic_beta(0, 2)["beta"]
    assert beta[0] == 1.0 and 1.0 <= beta[1] <= 2.0
    assert math.isfinite(irtorus.badness_sum(beta, 64)["value"])
