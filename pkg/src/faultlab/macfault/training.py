"""Fault-aware training: adapt weights to a fixed array state.

The forward pass adds the array-induced error of every layer (pruned
weights of deactivated PEs plus per-product fault corrections, computed
in the array's quantized domain and dequantized back to value units)
onto the float preactivation; the backward pass treats that error as
constant (straight-through), so gradients flow as in plain SGD. With an
empty fault map and a fully active array this is exactly ``train_sgd``.
"""

from __future__ import annotations

import numpy as np

from ..netcore.data import LabeledDataset
from ..netcore.inference import exact_int_matmul, quantize_activations
from ..netcore.train import train_sgd
from ..quantnum import bf16_round_array, quantize_int8
from .array import ArrayState, faulty_matmul_factory


def fault_aware_train(
    model,
    state: ArrayState,
    train: LabeledDataset,
    epochs: int,
    lr: float,
    seed: int,
    batch_size: int = 64,
    mode: str = "sim",
):
    """Retrain a copy of the model against the state's fault map."""
    fmt = state.config.fmt
    rng = np.random.default_rng(seed)
    shapes = [w.shape for w in model.weights]
    has_faults = bool(state.faults) or not state.active.all()
    if not has_faults:
        return train_sgd(model, train, epochs=epochs, lr=lr, seed=seed,
                         batch_size=batch_size)
    matmul = faulty_matmul_factory(state, shapes, mode, rng)

    def linear(live, idx, a):
        w = live.weights[idx]
        exact = a @ w + live.biases[idx]
        if fmt == "int8":
            wq = quantize_int8(w)
            aq, sa = quantize_activations(a)
            err = matmul(idx, aq, wq.raw) - exact_int_matmul(aq, wq.raw)
            return exact + err * (sa * wq.scale)
        ab = bf16_round_array(a).astype(np.float64)
        wb = bf16_round_array(w).astype(np.float64)
        return exact + (matmul(idx, ab, wb) - ab @ wb)

    return train_sgd(model, train, epochs=epochs, lr=lr, seed=seed,
                     batch_size=batch_size, linear_fn=linear)
