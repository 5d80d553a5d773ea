"""Multilayer perceptron: ReLU hidden layers, softmax output.

Weights are float64 matrices of shape (fan_in, fan_out). The forward pass
takes an injectable per-layer linear operator so fault models can replace
the multiply-accumulate semantics without touching backpropagation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_LAYERS = (784, 256, 256, 256, 10)


@dataclass
class MlpModel:
    layer_sizes: tuple
    weights: list
    biases: list

    def __post_init__(self):
        sizes = tuple(self.layer_sizes)
        if len(sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        for l, w in enumerate(self.weights):
            expect = (sizes[l], sizes[l + 1])
            if w.shape != expect:
                raise ValueError(f"layer {l}: weight shape {w.shape}, expected {expect}")
            if self.biases[l].shape != (sizes[l + 1],):
                raise ValueError(f"layer {l}: bias shape {self.biases[l].shape}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "MlpModel":
        return MlpModel(
            layer_sizes=tuple(self.layer_sizes),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


def init_mlp(layer_sizes=DEFAULT_LAYERS, seed: int = 0) -> MlpModel:
    """He-style uniform init, U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases."""
    rng = np.random.default_rng(seed)
    sizes = tuple(int(s) for s in layer_sizes)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_sizes=sizes, weights=weights, biases=biases)


def mlp_forward(model: MlpModel, x: np.ndarray, linear_fn=None):
    """Forward pass returning (logits, activations list).

    ``linear_fn(model, layer, a) -> a @ W[layer] + b[layer]`` may be
    substituted (it receives the live model, so training loops can swap
    semantics); activations[l] is the input to layer l, activations[-1]
    the logits.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    acts = [a]
    for l in range(model.n_layers):
        z = (
            a @ model.weights[l] + model.biases[l]
            if linear_fn is None
            else linear_fn(model, l, a)
        )
        a = np.maximum(z, 0.0) if l < model.n_layers - 1 else z
        acts.append(a)
    return acts[-1], acts


def mlp_backward(model: MlpModel, acts, labels):
    """Gradients of mean cross-entropy from cached activations.

    ReLU masks are taken from the cached (possibly fault-perturbed) hidden
    activations, so a substituted forward trains straight-through.
    """
    logits = acts[-1]
    n = logits.shape[0]
    probs = softmax(logits)
    delta = probs.copy()
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    grads_w, grads_b = [None] * model.n_layers, [None] * model.n_layers
    for l in range(model.n_layers - 1, -1, -1):
        grads_w[l] = acts[l].T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * (acts[l] > 0)
    return grads_w, grads_b


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels) -> float:
    n = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(n), labels].mean())
