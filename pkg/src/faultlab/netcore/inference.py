"""Inference in float, int8-quantized, and bfloat16 numeric modes.

The quantized pipelines expose an injectable integer matmul so the MAC
fault model can reroute every multiply through a faulty processing
element; with the default matmul they are the fault-free baselines.

int8 mode: weights quantized once per tensor, activations re-quantized
per layer (symmetric, max/127), products and sums accumulated exactly.
Integer matmuls run in float64, which is exact for these magnitudes
(|acc| < 2**53), so results are bit-stable regardless of BLAS order.

bfloat16 mode: weights and activations rounded to bfloat16; products of
two bfloat16 values are exact in float64, accumulation stays in full
precision with rounding applied at each layer boundary.
"""

from __future__ import annotations

import numpy as np

from ..quantnum import Int8Tensor, bf16_round_array, quantize_int8, round_half_away
from .cnn import (
    ConvStage,
    DenseStage,
    FlattenStage,
    PoolStage,
    SmallCnnModel,
    cnn_forward,
    im2col,
)
from .data import LabeledDataset
from .mlp import MlpModel, mlp_forward

MODES = ("float", "int8", "bfloat16")


def quantize_weights(model) -> list[Int8Tensor]:
    """Per-tensor symmetric int8 quantization of every weight matrix."""
    return [quantize_int8(w) for w in model.weights]


def quantize_activations(a: np.ndarray):
    """Symmetric per-tensor int8 quantization of an activation array."""
    peak = float(np.max(np.abs(a))) if a.size else 0.0
    scale = peak / 127.0 if peak > 0 else 1.0
    raw = np.clip(round_half_away(a / scale), -128, 127).astype(np.int8)
    return raw, scale


def exact_int_matmul(aq: np.ndarray, wq: np.ndarray) -> np.ndarray:
    """Exact integer matmul of int8 operands, via float64 (no rounding)."""
    return aq.astype(np.float64) @ wq.astype(np.float64)


def forward_float(model, x: np.ndarray) -> np.ndarray:
    if isinstance(model, MlpModel):
        return mlp_forward(model, x)[0]
    return cnn_forward(model, x)[0]


def _model_input(model, dataset: LabeledDataset) -> np.ndarray:
    if isinstance(model, MlpModel):
        return dataset.flat_float()
    return dataset.images.astype(np.float64)[..., None] / 255.0


def quant_forward(model, x: np.ndarray, fmt: str = "int8", matmul_fn=None,
                  weights_q=None) -> np.ndarray:
    """Quantized forward pass with an injectable integer matmul.

    ``matmul_fn(weight_idx, aq, wq) -> accumulator array`` defaults to the
    exact product-and-sum. For int8, ``weights_q`` may supply pre-quantized
    ``Int8Tensor`` weights (e.g. after fault injection into stored bytes).
    """
    if fmt == "int8":
        wq = weights_q if weights_q is not None else quantize_weights(model)

        def linear(mdl, idx, a):
            aq, sa = quantize_activations(a)
            acc = (
                exact_int_matmul(aq, wq[idx].raw)
                if matmul_fn is None
                else matmul_fn(idx, aq, wq[idx].raw)
            )
            return acc * (sa * wq[idx].scale) + mdl.biases[idx]

    elif fmt == "bfloat16":
        wb = [bf16_round_array(w).astype(np.float64) for w in model.weights]

        def linear(mdl, idx, a):
            ab = bf16_round_array(a).astype(np.float64)
            acc = ab @ wb[idx] if matmul_fn is None else matmul_fn(idx, ab, wb[idx])
            return acc + mdl.biases[idx]

    else:
        raise ValueError(f"unknown quantized mode {fmt!r}, expected int8 or bfloat16")

    if isinstance(model, MlpModel):
        return mlp_forward(model, x, linear_fn=linear)[0]
    return cnn_forward(model, x, linear_fn=linear)[0]


def evaluate(model, dataset: LabeledDataset, mode: str = "float") -> float:
    """Top-1 accuracy of the model on a dataset, in [0, 1]."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    if len(dataset) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    x = _model_input(model, dataset)
    if mode == "float":
        logits = forward_float(model, x)
    else:
        logits = quant_forward(model, x, fmt=mode)
    return float(np.mean(np.argmax(logits, axis=1) == dataset.labels))


def forward_hooked(model, x: np.ndarray, mac_hook, fmt: str = "int8") -> np.ndarray:
    """Reference forward pass routing every scalar multiply through a hook.

    ``mac_hook(x_op, w_op, site) -> product`` receives int8 raw operands
    (int8 mode) or bfloat16-rounded floats, with ``site=(weight_idx, i, j)``.
    With the identity hook ``lambda x, w, s: x * w`` this is bit-identical
    to ``quant_forward``; it exists as the slow oracle the vectorized fault
    paths are checked against.
    """

    def matmul(idx, aq, wq):
        n, fan_in = aq.shape
        fan_out = wq.shape[1]
        acc = np.zeros((n, fan_out))
        for i in range(fan_in):
            for j in range(fan_out):
                col = np.array(
                    [mac_hook(aq[s, i], wq[i, j], (idx, i, j)) for s in range(n)],
                    dtype=np.float64,
                )
                acc[:, j] += col
        return acc

    return quant_forward(model, x, fmt=fmt, matmul_fn=matmul)


def argmax_agreement(model, dataset: LabeledDataset, mode_a: str, mode_b: str) -> float:
    """Fraction of samples where two numeric modes agree on the argmax."""
    if len(dataset) == 0:
        raise ValueError("cannot compare on an empty dataset")
    x = _model_input(model, dataset)
    la = forward_float(model, x) if mode_a == "float" else quant_forward(model, x, mode_a)
    lb = forward_float(model, x) if mode_b == "float" else quant_forward(model, x, mode_b)
    return float(np.mean(np.argmax(la, axis=1) == np.argmax(lb, axis=1)))


# Re-exported names used by fault modules when tiling conv layers.
__all__ = [
    "ConvStage",
    "DenseStage",
    "FlattenStage",
    "PoolStage",
    "SmallCnnModel",
    "MODES",
    "argmax_agreement",
    "evaluate",
    "exact_int_matmul",
    "forward_float",
    "forward_hooked",
    "im2col",
    "quant_forward",
    "quantize_activations",
    "quantize_weights",
]
