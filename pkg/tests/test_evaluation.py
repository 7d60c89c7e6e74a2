import numpy as np
import pytest

from hiersearch import datasets
from hiersearch.distributions import OnlineLearner
from hiersearch.dtree import build_decision_tree, expected_cost
from hiersearch.errors import BadParameter
from hiersearch.evaluation import (
    batch_evaluate,
    css_curve,
    replay_strategy,
    rows_to_csv,
    runtime_probe,
)
from hiersearch.generators import random_tree, sample_targets


def test_exhaustive_report_matches_dtree(vehicle, p_real):
    report = batch_evaluate(vehicle, p_real, "greedy_tree")
    tree = build_decision_tree(vehicle, p_real, "greedy_tree")
    assert report.expected_cost == pytest.approx(expected_cost(tree, p_real),
                                                 abs=1e-12)
    assert report.targets == list(range(7))
    assert len(report.per_target_questions) == 7


def test_equal_weights_golden(vehicle, p_equal):
    report = batch_evaluate(vehicle, p_equal, "greedy_tree")
    assert report.expected_cost == pytest.approx(3.0, abs=1e-9)
    assert sorted(report.per_target_questions) == [2, 2, 3, 3, 3, 4, 4]


def test_stream_window_means(vehicle, p_real):
    stream = [vehicle.id_of("Maxima")] * 4 + [vehicle.id_of("Vehicle")] * 2
    report = batch_evaluate(vehicle, p_real, "greedy_tree", targets=stream,
                            window=2)
    assert report.window_means == [
        pytest.approx(1.0), pytest.approx(1.0), pytest.approx(4.0)]
    assert report.expected_cost is None
    assert report.mean_questions == pytest.approx(np.mean(
        report.per_target_questions))


def test_online_mode_adapts(vehicle):
    # strictly positive skew so smoothed and exact weights break ties alike
    rng = np.random.default_rng(7)
    skew = np.array([0.02, 0.02, 0.02, 0.02, 0.02, 0.8, 0.1])
    stream = sample_targets(skew, 4000, rng).tolist()
    equal = np.full(7, 1.0 / 7.0)
    static = batch_evaluate(vehicle, equal, "greedy_tree", targets=stream)
    online = batch_evaluate(vehicle, equal, "greedy_tree", targets=stream,
                            online=True, window=500)
    assert online.window_means[-1] < static.mean_questions
    # late windows should approach the skew-informed offline cost
    informed = batch_evaluate(vehicle, skew, "greedy_tree")
    assert online.window_means[-1] == pytest.approx(informed.expected_cost,
                                                    rel=0.1)


def test_online_requires_stream(vehicle, p_equal):
    with pytest.raises(BadParameter):
        batch_evaluate(vehicle, p_equal, "greedy_tree", online=True)


def test_online_accepts_primed_learner(vehicle, p_real):
    learner = OnlineLearner(7)
    for _ in range(50):
        learner.observe(vehicle.id_of("Maxima"))
    stream = [vehicle.id_of("Maxima")] * 5
    report = batch_evaluate(vehicle, p_real, "greedy_tree", targets=stream,
                            online=True, learner=learner)
    assert report.per_target_questions == [1, 1, 1, 1, 1]


def test_css_curve_shape(vehicle, p_equal):
    curve = css_curve(vehicle, p_equal, "greedy_tree")
    assert curve[0] == (0, 7.0)
    ks = [k for k, _ in curve]
    assert ks == list(range(len(curve)))
    vals = [v for _, v in curve]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == 1.0


def test_replay_strategy_goldens(vehicle):
    weights = datasets.vehicle_real_weights()
    per_cat, total = replay_strategy(
        vehicle, weights, datasets.VEHICLE_STRATEGY_BROAD,
        datasets.VEHICLE_COUNTS)
    assert total == 260
    assert per_cat["Maxima"] == 2
    per_cat_leaf, total_leaf = replay_strategy(
        vehicle, weights, datasets.VEHICLE_STRATEGY_LEAF,
        datasets.VEHICLE_COUNTS)
    assert total_leaf == 204
    assert per_cat_leaf["Maxima"] == 1


def test_runtime_probe_rows(p_equal, vehicle):
    res = runtime_probe(vehicle, p_equal, ["greedy_tree", "greedy_naive"],
                        targets_per_depth=1, repetitions=2,
                        rng=np.random.default_rng(3))
    depths = sorted({r.depth for r in res.rows})
    assert depths == [0, 1, 2, 3]
    assert res.mean_seconds("greedy_tree") > 0
    with pytest.raises(BadParameter):
        res.mean_seconds("top_down")


def test_sample_targets_distribution():
    rng = np.random.default_rng(11)
    p = np.array([0.7, 0.3, 0.0])
    draws = sample_targets(p, 20000, rng)
    assert set(np.unique(draws)) <= {0, 1}
    assert np.mean(draws == 0) == pytest.approx(0.7, abs=0.02)


def test_rows_to_csv():
    text = rows_to_csv(["a", "b"], [[1, 2], ["x,y", 3.5]])
    assert text == 'a,b\n1,2\n"x,y",3.5\n'


def test_batch_evaluate_on_random_tree():
    rng = np.random.default_rng(5)
    h = random_tree(40, rng)
    p = rng.random(40)
    p /= p.sum()
    fast = batch_evaluate(h, p, "greedy_tree")
    slow = batch_evaluate(h, p, "greedy_naive")
    assert fast.expected_cost == pytest.approx(slow.expected_cost, abs=1e-9)
