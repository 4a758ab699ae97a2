import math

import numpy as np
import pytest

import cfpos


def desk_config(**overrides):
    cfg = cfpos.ScenarioConfig()
    cfg.ap_count = 4
    cfg.ue_count = 2
    cfg.pilot_length = 2
    cfg.antennas_per_ap = 4
    cfg.paths_per_link = 3
    cfg.seed = 7
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def test_noise_budget():
    watt = cfpos.noise_power_watt(20e6, 7.0)
    dbm = 10.0 * math.log10(watt) + 30.0
    assert abs(dbm - (-174.0 + 10.0 * math.log10(20e6) + 7.0)) < 1e-9
    assert round(dbm) == -94


def test_scenario_determinism_and_geometry():
    a = cfpos.build_scenario(desk_config())
    b = cfpos.build_scenario(desk_config())
    assert a.to_json() == b.to_json()
    assert len(a.ap_xy) == 4 and len(a.ue_xy) == 2
    link = a.link(0, 0)
    assert link.beta > 0 and link.kappa == 0.0
    assert 0.0 <= link.los_angle <= math.pi


def test_path_loss_and_rician():
    assert cfpos.path_loss_db(100.0) == pytest.approx(-105.7)
    assert cfpos.rician_factor(100.0, True) == pytest.approx(10.0)
    assert cfpos.rician_factor(100.0, False) == 0.0
    assert cfpos.wrap_distance(cfpos.Vec2(0, 0), cfpos.Vec2(99, 0), 100.0, 0.0) == pytest.approx(1.0)


def test_steering_and_dft():
    a = cfpos.steering_vector(math.pi / 2, 6, 0.5)
    assert np.allclose(a, np.ones(6))
    f = cfpos.dft_matrix(4)
    assert np.allclose(f @ f.conj().T, 4 * np.eye(4))


def test_features_self_match_and_fingerprint():
    scenario = cfpos.build_scenario(desk_config())
    opts = cfpos.FeatureOptions()
    opts.realizations = 10
    gen = cfpos.FeatureGenerator(scenario, opts)
    measured = gen.measured(0)
    hyp = gen.hypothesis(scenario.ue_xy[0])
    assert np.array_equal(measured.rss, hyp.rss)
    assert np.array_equal(measured.angular, hyp.angular)
    assert measured.source == "measured" and hyp.source == "hypothesis"

    db = cfpos.build_fingerprint_db(gen, 50.0)
    assert len(db) == 9
    est = cfpos.knn_wknn_estimate(gen.hypothesis(cfpos.Vec2(50.0, 50.0)), db, 1, True, "joint")
    assert (est.xy.x, est.xy.y) == (50.0, 50.0)


def test_similarity_surface():
    scenario = cfpos.build_scenario(desk_config())
    opts = cfpos.FeatureOptions()
    opts.realizations = 10
    gen = cfpos.FeatureGenerator(scenario, opts)
    ue = scenario.ue_xy[0]
    grid = cfpos.similarity_grid(gen, ue, ue, 1.0, 9)
    best = grid.argmax_joint()
    gap = math.hypot(grid.x[best] - ue.x, grid.y[best] - ue.y)
    assert gap <= math.sqrt(0.5) + 1e-9
    assert cfpos.joint_similarity(0.5, 0.5) == pytest.approx(4.0, rel=1e-4)


def test_cowknn_and_metrics():
    sel = cfpos.cowknn_select([5.0, 1.0, 3.0], 2.0, 2)
    assert sel == [0, 2]
    weights = cfpos.cowknn_weights([2.0, 3.0, 5.0])
    assert weights == pytest.approx([0.2, 0.3, 0.5])
    assert cfpos.rmse([cfpos.Vec2(0, 0)], [cfpos.Vec2(3, 4)]) == pytest.approx(5.0)
    curve = cfpos.cdf_curve([1.0, 2.0, 2.0, 4.0])
    assert curve[-1][1] == 1.0


def test_training_smoke():
    scenario = cfpos.build_scenario(desk_config(ap_count=3, antennas_per_ap=2))
    opts = cfpos.FeatureOptions()
    opts.realizations = 6
    gen = cfpos.FeatureGenerator(scenario, opts)
    hyper = cfpos.JpcHyper()
    hyper.episodes = 3
    hyper.steps_per_episode = 3
    hyper.positioning.batch_size = 3
    hyper.correction.batch_size = 3
    result = cfpos.train_jpc(scenario, gen, hyper)
    assert len(result.log_rows) == 3
    assert all(math.isfinite(r.eval_rmse) for r in result.log_rows)
    assert len(result.final_estimates) == 2
