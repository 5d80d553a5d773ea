"""Minibatch SGD with backpropagation, deterministic given a seed."""

from __future__ import annotations

import numpy as np

from .cnn import SmallCnnModel, cnn_backward, cnn_forward
from .data import LabeledDataset
from .inference import evaluate
from .mlp import MlpModel, cross_entropy, mlp_backward, mlp_forward


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"non-finite loss {loss} in epoch {epoch}")
        self.epoch = epoch


def train_sgd(
    model,
    train: LabeledDataset,
    epochs: int,
    lr: float,
    seed: int,
    batch_size: int = 64,
    test: LabeledDataset | None = None,
    linear_fn=None,
):
    """Train a copy of the model; returns (trained model, accuracy history).

    The history holds one float-mode test accuracy per epoch (on ``test``
    when given, else on the training set). ``linear_fn(weight_idx, a)`` may
    replace the per-layer linear operator in the forward pass; gradients
    then flow straight-through, which is how fault-aware training plugs in.
    """
    if len(train) == 0:
        raise ValueError("cannot train on an empty dataset")
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    model = model.copy()
    if isinstance(model, MlpModel):
        forward, backward = mlp_forward, mlp_backward
        xs = train.flat_float()
    elif isinstance(model, SmallCnnModel):
        forward, backward = cnn_forward, cnn_backward
        xs = train.images.astype(np.float64)[..., None] / 255.0
    else:
        raise TypeError(f"cannot train {type(model).__name__}")
    ys = train.labels
    rng = np.random.default_rng(seed)
    history = []
    for epoch in range(epochs):
        order = rng.permutation(len(train))
        for start in range(0, len(train), batch_size):
            idx = order[start : start + batch_size]
            logits_or_acts = forward(model, xs[idx], linear_fn=linear_fn)
            logits, caches = logits_or_acts
            loss = cross_entropy(logits, ys[idx])
            if not np.isfinite(loss):
                raise TrainingDiverged(epoch, loss)
            grads_w, grads_b = backward(model, caches, ys[idx])
            for l in range(len(model.weights)):
                model.weights[l] -= lr * grads_w[l]
                model.biases[l] -= lr * grads_b[l]
        history.append(evaluate(model, test if test is not None else train, "float"))
    return model, history
