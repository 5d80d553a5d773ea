"""Training-loop tests: gradient oracle, determinism, degenerate inputs."""

import numpy as np
import pytest

from faultlab.netcore import (
    TrainingDiverged,
    init_lenet5,
    init_mlp,
    synthetic_blobs,
    train_sgd,
)
from faultlab.netcore.cnn import build_cnn, cnn_backward, cnn_forward
from faultlab.netcore.data import LabeledDataset
from faultlab.netcore.mlp import cross_entropy, mlp_backward, mlp_forward, softmax


def _numeric_grad(loss_fn, array, indices, eps=1e-6):
    grads = {}
    for idx in indices:
        orig = array[idx]
        array[idx] = orig + eps
        hi = loss_fn()
        array[idx] = orig - eps
        lo = loss_fn()
        array[idx] = orig
        grads[idx] = (hi - lo) / (2 * eps)
    return grads


def test_mlp_gradient_matches_central_differences(rng):
    # 10-parameter toy network: 2-2-2 has 4+2+4+2 = 12, use (2,2) + (2,2)
    model = init_mlp((2, 2, 2), seed=3)
    x = rng.normal(0.3, 0.2, size=(6, 2))
    y = rng.integers(0, 2, size=6)

    logits, acts = mlp_forward(model, x)
    grads_w, grads_b = mlp_backward(model, acts, y)

    def loss():
        return cross_entropy(mlp_forward(model, x)[0], y)

    for l in range(model.n_layers):
        for arr, analytic in ((model.weights[l], grads_w[l]), (model.biases[l], grads_b[l])):
            idxs = list(np.ndindex(arr.shape))
            numeric = _numeric_grad(loss, arr, idxs)
            for idx in idxs:
                denom = max(abs(numeric[idx]), abs(analytic[idx]), 1e-8)
                assert abs(numeric[idx] - analytic[idx]) / denom < 1e-4


def test_cnn_gradient_matches_central_differences(rng):
    model = build_cnn(8, [("conv", 3, 2), ("pool", 2)], dense=(3,), seed=5)
    x = rng.uniform(0, 1, size=(4, 8, 8, 1))
    y = rng.integers(0, 3, size=4)
    _, caches = cnn_forward(model, x)
    grads_w, grads_b = cnn_backward(model, caches, y)

    def loss():
        return cross_entropy(cnn_forward(model, x)[0], y)

    for l in range(len(model.weights)):
        for arr, analytic in ((model.weights[l], grads_w[l]), (model.biases[l], grads_b[l])):
            flat = list(np.ndindex(arr.shape))
            picks = [flat[i] for i in rng.choice(len(flat), size=min(12, len(flat)), replace=False)]
            numeric = _numeric_grad(loss, arr, picks)
            for idx in picks:
                denom = max(abs(numeric[idx]), abs(analytic[idx]), 1e-8)
                assert abs(numeric[idx] - analytic[idx]) / denom < 1e-4


def test_softmax_sums_to_one(rng):
    z = rng.normal(0, 20, size=(100, 10))
    s = softmax(z)
    assert np.max(np.abs(s.sum(axis=1) - 1.0)) < 1e-9


def test_training_is_deterministic(blob_train):
    a, hist_a = train_sgd(init_mlp((784, 16, 10), seed=7), blob_train.subset(400),
                          epochs=2, lr=0.1, seed=42)
    b, hist_b = train_sgd(init_mlp((784, 16, 10), seed=7), blob_train.subset(400),
                          epochs=2, lr=0.1, seed=42)
    assert hist_a == hist_b
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    c, _ = train_sgd(init_mlp((784, 16, 10), seed=7), blob_train.subset(400),
                     epochs=2, lr=0.1, seed=43)
    assert any(not np.array_equal(wa, wc) for wa, wc in zip(a.weights, c.weights))


def test_zero_epochs_is_a_noop(blob_train):
    model = init_mlp((784, 16, 10), seed=1)
    trained, hist = train_sgd(model, blob_train.subset(100), epochs=0, lr=0.1, seed=0)
    assert hist == []
    for w0, w1 in zip(model.weights, trained.weights):
        assert np.array_equal(w0, w1)


def test_training_does_not_mutate_input_model(blob_train):
    model = init_mlp((784, 16, 10), seed=1)
    before = [w.copy() for w in model.weights]
    train_sgd(model, blob_train.subset(200), epochs=1, lr=0.2, seed=0)
    for w0, w1 in zip(before, model.weights):
        assert np.array_equal(w0, w1)


def test_divergence_raises_with_epoch(blob_train):
    # weights large enough that the second matmul overflows float64
    model = init_mlp((784, 16, 10), seed=1)
    model.weights[0][:] = 1e200
    model.weights[1][:] = 1e200
    with pytest.raises(TrainingDiverged) as err:
        train_sgd(model, blob_train.subset(300), epochs=3, lr=0.1, seed=0)
    assert err.value.epoch == 0


def test_empty_dataset_rejected():
    empty = LabeledDataset(np.zeros((0, 28, 28), dtype=np.uint8),
                           np.zeros(0, dtype=np.int64))
    with pytest.raises(ValueError):
        train_sgd(init_mlp((784, 8, 10), seed=0), empty, epochs=1, lr=0.1, seed=0)


def test_cnn_trains_on_small_task():
    train = synthetic_blobs(700, classes=4, size=12, seed=31)
    test = synthetic_blobs(300, classes=4, size=12, seed=32)
    model = build_cnn(12, [("conv", 3, 4), ("pool", 2)], dense=(24, 4), seed=2)
    trained, hist = train_sgd(model, train, epochs=8, lr=0.3, seed=3, test=test)
    assert max(hist) > 0.8


def test_lenet5_shapes():
    model = init_lenet5(28, seed=0)
    sizes = [w.shape for w in model.weights]
    assert sizes == [(25, 6), (150, 16), (256, 120), (120, 84), (84, 10)]
    model32 = init_lenet5(32, seed=0)
    assert [w.shape for w in model32.weights][2] == (400, 120)
