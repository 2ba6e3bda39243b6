"""Forward model, cost, analytic gradients, and the training loop."""

import numpy as np
import pytest

import pointneuron as pn
from pointneuron import (DegenerateGeometryError, InitRegion, Observations,
                         PointNeuronModel, TrainConfig, cost, forward, grad_bias,
                         grad_biases, grad_weight, grad_weights, init_model,
                         neuron_count_for_frequency, point_neuron_eval,
                         relocate_degenerate, step, train)
from pointneuron.gradcheck import fd_grad_bias, fd_grad_weight, run_gradcheck


def test_forward_equals_direct_sum(tiny_model):
    pts = np.random.default_rng(3).uniform(-0.5, 0.5, size=(7, 3))
    out = forward(tiny_model, pts)
    for i, x in enumerate(pts):
        direct = sum(w * point_neuron_eval(x, b, tiny_model.k)
                     for w, b in zip(tiny_model.weights, tiny_model.biases))
        assert out[i] == pytest.approx(direct, rel=1e-12)


def test_forward_scalar_point(tiny_model):
    val = forward(tiny_model, (0.1, 0.1, 0.1))
    assert isinstance(val, complex)
    assert val == forward(tiny_model, [(0.1, 0.1, 0.1)])[0]


def test_forward_linear_in_weights(tiny_model):
    pts = np.array([[0.2, -0.1, 0.3]])
    doubled = tiny_model.copy()
    doubled.weights *= 2.0
    assert forward(doubled, pts)[0] == pytest.approx(2 * forward(tiny_model, pts)[0], rel=1e-14)


def test_cost_hand_value():
    # single neuron, single mic at the origin: the kernel is exactly 1 there,
    # so cost = |w - p|^2 + lam*|w|
    model = PointNeuronModel(5.0, [0.6 + 0.8j], [[1.0, 2.0, -2.0]])
    obs = Observations([[0.0, 0.0, 0.0]], [0.1 - 0.3j])
    expect = abs((0.6 + 0.8j) - (0.1 - 0.3j)) ** 2 + 0.5 * 1.0
    assert cost(model, obs, 0.5) == pytest.approx(expect, rel=1e-14)


def test_gradients_match_finite_differences(tiny_model, tiny_obs):
    for lam in (0.0, 1e-3, 1.0):
        gw = grad_weights(tiny_model, tiny_obs, lam)
        gb = grad_biases(tiny_model, tiny_obs)
        for v in range(tiny_model.n_neurons):
            assert gw[v] == pytest.approx(fd_grad_weight(tiny_model, tiny_obs, lam, v), rel=1e-7)
            np.testing.assert_allclose(gb[v], fd_grad_bias(tiny_model, tiny_obs, lam, v),
                                       rtol=1e-6, atol=1e-9)


def test_single_index_gradients_consistent(tiny_model, tiny_obs):
    gw = grad_weights(tiny_model, tiny_obs, 0.1)
    gb = grad_biases(tiny_model, tiny_obs)
    assert grad_weight(tiny_model, tiny_obs, 0.1, 1) == gw[1]
    assert grad_bias(tiny_model, tiny_obs, 0) == tuple(gb[0])


def test_l1_subgradient_zero_at_zero_weight(tiny_obs):
    model = PointNeuronModel(2.0, [0.0 + 0.0j], [[2.0, 0.0, 0.0]])
    g_with = grad_weights(model, tiny_obs, 1.0)
    g_without = grad_weights(model, tiny_obs, 0.0)
    assert g_with[0] == g_without[0]


def test_gradcheck_random_instances():
    report = run_gradcheck(trials=30, seed=11)
    assert report.passed
    assert report.worst_weight_err <= 1e-6
    assert report.worst_bias_err <= 1e-6


def test_gradcheck_catches_wrong_gradient():
    report = run_gradcheck(trials=5, seed=11, flip_sign=True)
    assert not report.passed


def test_gradcheck_zero_trials_warns():
    report = run_gradcheck(trials=0)
    assert report.passed
    assert any("vacuous" in m for m in report.messages)


def test_degenerate_geometry_raises(tiny_obs):
    model = PointNeuronModel(2.0, [1.0], [tiny_obs.positions[0]])
    with pytest.raises(DegenerateGeometryError):
        grad_weights(model, tiny_obs, 0.0, threshold=0.05)
    with pytest.raises(DegenerateGeometryError):
        grad_biases(model, tiny_obs, threshold=0.05)


def test_step_matches_manual_update(tiny_model, tiny_obs, open_region):
    cfg = TrainConfig(learning_rate=1e-4, bias_learning_rate=1e-3, l1_weight=1e-3,
                      max_iterations=1)
    rng = np.random.default_rng(0)
    out = step(tiny_model, tiny_obs, cfg, open_region, rng)
    gw = grad_weights(tiny_model, tiny_obs, cfg.l1_weight)
    gb = grad_biases(tiny_model, tiny_obs)
    np.testing.assert_allclose(out.weights, tiny_model.weights - 1e-4 * gw)
    np.testing.assert_allclose(out.biases, tiny_model.biases - 1e-3 * gb)


def test_step_descends(tiny_model, tiny_obs, open_region):
    cfg = TrainConfig(learning_rate=1e-4, bias_learning_rate=1e-4, l1_weight=1e-3,
                      max_iterations=1)
    before = cost(tiny_model, tiny_obs, cfg.l1_weight)
    out = step(tiny_model, tiny_obs, cfg, open_region, np.random.default_rng(0))
    assert cost(out, tiny_obs, cfg.l1_weight) < before


def test_relocation_moves_crowding_source(tiny_obs, open_region):
    # one source sits on a microphone, the other is fine
    model = PointNeuronModel(2.0, [1.0, 1.0],
                             [tiny_obs.positions[0], [2.0, 2.0, 0.0]])
    hist = pn.LossHistory()
    out = relocate_degenerate(model, tiny_obs, 0.05, open_region,
                              np.random.default_rng(1), iteration=7, history=hist)
    assert np.array_equal(out.biases[1], model.biases[1])          # untouched
    assert np.linalg.norm(out.biases[0] - tiny_obs.positions[0]) > 0.05
    assert np.linalg.norm(out.biases[0]) > 0.05
    assert len(hist.relocations) == 1 and hist.relocations[0].iteration == 7


def test_relocation_noop_when_clean(tiny_model, tiny_obs, open_region):
    out = relocate_degenerate(tiny_model, tiny_obs, 0.05, open_region,
                              np.random.default_rng(1))
    assert out is tiny_model


def test_init_model_layout():
    region = InitRegion(center=(0.0, 0.0, 0.0), size_x=9.0, size_y=9.0,
                        hole_center=(-1.0, 0.5, 0.0), hole_radius=1.0)
    model = init_model(3.0, 100, region, np.random.default_rng(5))
    assert model.n_neurons == 100
    assert np.all(np.abs(model.weights) <= 1.0)
    assert region.admissible(model.biases[:, :2]).all()
    # deterministic for a fixed seed
    again = init_model(3.0, 100, region, np.random.default_rng(5))
    np.testing.assert_array_equal(model.biases, again.biases)
    np.testing.assert_array_equal(model.weights, again.weights)


def test_neuron_count_rule_endpoints():
    assert neuron_count_for_frequency(100.0) == 25
    assert neuron_count_for_frequency(2000.0) == 465
    counts = [neuron_count_for_frequency(f) for f in range(100, 2001, 100)]
    assert counts == sorted(counts)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(l1_weight=-1.0)
    with pytest.raises(ValueError):
        TrainConfig(max_iterations=0)
    with pytest.raises(ValueError):
        TrainConfig(init_weight_scale=-0.5)


def _single_source_problem(seed=0):
    k = pn.wavenumber(500.0)
    b_true = np.array([2.0, 1.0, 0.0])
    w_true = 0.7 - 0.4j
    az = 2 * np.pi * np.arange(30) / 30
    mics = np.column_stack([0.5 * np.cos(az), 0.5 * np.sin(az), np.zeros(30)])
    pressures = w_true * point_neuron_eval(mics, b_true, k)
    return k, b_true, w_true, Observations(mics, pressures)


def test_train_recovers_single_source(open_region):
    k, b_true, w_true, obs = _single_source_problem()
    init = PointNeuronModel(k, [0.1 + 0.1j], [b_true + np.array([0.4, -0.3, 0.0])])
    cfg = TrainConfig(learning_rate=2e-3, bias_learning_rate=2e-3, l1_weight=0.0,
                      max_iterations=20000, stop_tolerance=0.0)
    model, history = train(obs, k, cfg, open_region, init=init)
    assert history.data_term[-1] < 1e-10
    assert np.linalg.norm(model.biases[0] - b_true) < 1e-3
    assert model.weights[0] == pytest.approx(w_true, abs=1e-4)


def test_train_l1_shrinks_weights(open_region):
    k, _, _, obs = _single_source_problem()
    norms = []
    for lam in (0.0, 0.5):
        cfg = TrainConfig(learning_rate=2e-3, bias_learning_rate=2e-3, l1_weight=lam,
                          max_iterations=2000, rng_seed=4)
        model, _ = train(obs, k, cfg, open_region, n_neurons=8)
        norms.append(np.sum(np.abs(model.weights)))
    assert norms[1] < norms[0]


def test_train_loss_monotone_envelope(open_region):
    # the returned best model never scores worse than the initial model
    k, _, _, obs = _single_source_problem()
    cfg = TrainConfig(learning_rate=1e-3, bias_learning_rate=1e-3, l1_weight=1e-3,
                      max_iterations=300, rng_seed=8)
    model, history = train(obs, k, cfg, open_region, n_neurons=5)
    assert cost(model, obs, cfg.l1_weight) <= history.total[0] + 1e-12
    assert len(history.total) == len(history.data_term) == len(history.l1_term)


def test_train_divergence_raises(open_region):
    k, _, _, obs = _single_source_problem()
    cfg = TrainConfig(learning_rate=1e6, l1_weight=0.0, max_iterations=500)
    with pytest.raises(FloatingPointError):
        train(obs, k, cfg, open_region, n_neurons=5)


def test_train_requires_model_or_count(open_region):
    k, _, _, obs = _single_source_problem()
    with pytest.raises(ValueError):
        train(obs, k, TrainConfig(), open_region)
