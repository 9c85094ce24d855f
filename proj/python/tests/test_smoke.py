import math

import numpy as np
import pytest

import ddcc
from ddcc import betting


def test_min_samples():
    assert ddcc.min_samples_cor1(0.01) == 36


def test_schedule_dict():
    s = ddcc.schedule_cor1(1000, 0.1)
    assert s["feasible"]
    assert s["kappa"] >= 1.0
    assert s["phi"] > 0.0
    assert ddcc.schedule_cor2(1, 0.1)["feasible"] is False


def test_constants_at_half():
    general, independent, gaussian = ddcc.comparison_constants(0.5)
    assert general == pytest.approx(1.0)
    assert gaussian == pytest.approx(0.0, abs=1e-9)
    assert independent < general


def test_moment_state_matches_numpy():
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(200, 3))
    s = ddcc.MomentState(3)
    s.update_batch(rows)
    assert s.count == 200
    np.testing.assert_allclose(s.mean, rows.mean(axis=0), rtol=1e-12)
    np.testing.assert_allclose(s.covariance(), np.cov(rows.T, bias=True), rtol=1e-10)


def test_empty_state_raises():
    with pytest.raises(ddcc.EmptyState):
        ddcc.MomentState(2).covariance()


def test_support_radius():
    box = ddcc.SupportSet.box(np.zeros(2), np.array([1.0, 2.0]))
    assert box.radius(np.array([1.0, -1.0])) == pytest.approx(1.5)
    ell = ddcc.SupportSet.ellipsoid(np.zeros(2), np.diag([4.0, 1.0]))
    assert ell.radius(np.array([1.0, 0.0])) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ddcc.SupportSet.box(np.ones(2), np.zeros(2))


def test_betting_oracle_and_cor1():
    cfg = betting.BettingConfig()
    mu, sigma = betting.true_moments(cfg)
    np.testing.assert_allclose(mu, [0.125, 0.17, 0.12, 0.24], atol=1e-15)
    oracle = betting.solve(cfg, "oracle", np.zeros((0, 4)))
    assert oracle["status"] == "optimal"
    assert oracle["objective"] == pytest.approx(0.01578, abs=1e-4)
    samples = betting.sample_batch(cfg, 3, 2000)
    res = betting.solve(cfg, "cor1", samples)
    assert res["status"] == "optimal"
    assert 0.0 < res["objective"] < oracle["objective"] + 0.01
    test = betting.sample_batch(cfg, 4, 20000)
    reward, violation = betting.evaluate(res["x"], test, cfg)
    assert violation <= 0.2
    assert math.isfinite(reward)


def test_small_experiment():
    cfg = betting.BettingConfig()
    rows = betting.run_experiment(cfg, ["plugin", "cor1"], [50, 200], trials=3, test_size=2000)
    assert [(r["method"], r["n"]) for r in rows] == [
        ("plugin", 50), ("plugin", 200), ("cor1", 50), ("cor1", 200)]
    with pytest.raises(ValueError):
        betting.run_experiment(cfg, ["nope"], [50])
