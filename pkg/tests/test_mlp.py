import math

import numpy as np
import pytest

from src.ibo.errors import TrainingError
from src.ibo.mlp import (MlpModel, classification_error, mlp_forward_backward,
                         per_example_gradients, score_examples)


def _flat_grads(grads):
    return np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])


def test_zero_model_loss_is_log_classes():
    model = MlpModel.zeros((3, 4))
    X = np.random.default_rng(0).normal(size=(5, 3))
    y = np.array([0, 1, 2, 3, 1])
    loss, _ = mlp_forward_backward(model, (X, y), 0.0)
    assert loss == pytest.approx(math.log(4))
    assert score_examples(model, (X, y)) == pytest.approx([math.log(4)] * 5)


def test_saturated_prediction_scores_near_zero():
    W = np.array([[100.0, -100.0], [0.0, 0.0]])
    model = MlpModel((2, 2), ((W, np.zeros(2)),))
    assert score_examples(model, (np.array([[1.0, 0.0]]), np.array([0])))[0] < 1e-6


def test_duplicated_rows_give_same_loss(rng):
    model = MlpModel.init((2, 5, 3), rng)
    x, label = rng.normal(size=(1, 2)), np.array([2])
    single, _ = mlp_forward_backward(model, (x, label), 0.0)
    dup, _ = mlp_forward_backward(model, (np.repeat(x, 4, axis=0), np.repeat(label, 4)), 0.0)
    assert dup == pytest.approx(single)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(42)
    eps = 1e-6
    for _ in range(20):
        widths = (int(rng.integers(2, 4)), int(rng.integers(2, 5)), int(rng.integers(2, 4)))
        model = MlpModel.init(widths, rng)
        X = rng.normal(size=(6, widths[0]))
        y = rng.integers(0, widths[-1], size=6)
        l2 = 0.01
        _, grads = mlp_forward_backward(model, (X, y), l2)
        analytic = _flat_grads(grads)

        theta = model.flat()
        numeric = np.empty_like(theta)
        for i in range(theta.size):
            step = np.zeros_like(theta)
            step[i] = eps
            up, _ = mlp_forward_backward(model.with_flat(theta + step), (X, y), l2)
            down, _ = mlp_forward_backward(model.with_flat(theta - step), (X, y), l2)
            numeric[i] = (up - down) / (2 * eps)
        rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
        assert rel <= 1e-5


def test_per_example_gradients_average_to_batch_gradient(rng):
    model = MlpModel.init((3, 4, 2), rng)
    X, y = rng.normal(size=(7, 3)), rng.integers(0, 2, size=7)
    G = per_example_gradients(model, (X, y))
    assert G.shape == (7, model.n_params)
    _, grads = mlp_forward_backward(model, (X, y), 0.0)
    assert np.allclose(G.mean(axis=0), _flat_grads(grads))


def test_sample_weights_scale_the_data_term(rng):
    model = MlpModel.init((2, 3), rng)
    X, y = rng.normal(size=(1, 2)), np.array([1])
    plain, _ = mlp_forward_backward(model, (X, y), 0.0)
    weighted, _ = mlp_forward_backward(model, (X, y), 0.0, sample_weights=np.array([2.0]))
    assert weighted == pytest.approx(2 * plain)


def test_flat_round_trip(rng):
    model = MlpModel.init((3, 4, 2), rng)
    again = model.with_flat(model.flat())
    assert np.array_equal(again.flat(), model.flat())


def test_zero_learning_rate_leaves_model_unchanged(rng):
    model = MlpModel.init((2, 3, 2), rng)
    _, grads = mlp_forward_backward(model, (rng.normal(size=(4, 2)), np.array([0, 1, 1, 0])), 0.1)
    assert model.apply_update(grads, 0.0) is model


def test_classification_error():
    W = np.array([[1.0, -1.0]])
    model = MlpModel((1, 2), ((W, np.zeros(2)),))
    X = np.array([[1.0], [-1.0], [2.0], [-3.0]])
    assert classification_error(model, X, np.array([0, 1, 1, 1])) == pytest.approx(0.25)


def test_bad_batches_rejected():
    model = MlpModel.zeros((2, 3))
    with pytest.raises(TrainingError):
        score_examples(model, (np.zeros((0, 2)), np.zeros(0)))
    with pytest.raises(TrainingError):
        score_examples(model, (np.zeros((1, 3)), np.array([0])))
    with pytest.raises(TrainingError):
        score_examples(model, (np.zeros((1, 2)), np.array([3])))
    with pytest.raises(TrainingError):
        mlp_forward_backward(model, (np.full((1, 2), np.nan), np.array([0])), 0.0)
