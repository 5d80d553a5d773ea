"""Model checkpoints: versioned npz dump of shapes and weights.

Format (documented for external tooling): a zip archive written by
``numpy.savez`` containing
  * ``meta``: JSON string with {"format": "faultlab-checkpoint",
    "version": 1, "kind": "mlp"|"cnn", and the architecture fields}
  * ``w0..wN`` / ``b0..bN``: float64 weight and bias arrays in layer order.
"""

from __future__ import annotations

import json

import numpy as np

from .cnn import ConvStage, DenseStage, FlattenStage, PoolStage, SmallCnnModel
from .mlp import MlpModel

FORMAT_NAME = "faultlab-checkpoint"
FORMAT_VERSION = 1


def _stage_to_json(stage):
    if isinstance(stage, ConvStage):
        return {"op": "conv", "weight_idx": stage.weight_idx, "kernel": stage.kernel,
                "in_ch": stage.in_ch, "out_ch": stage.out_ch}
    if isinstance(stage, PoolStage):
        return {"op": "pool", "kernel": stage.kernel}
    if isinstance(stage, FlattenStage):
        return {"op": "flatten"}
    return {"op": "dense", "weight_idx": stage.weight_idx,
            "in_features": stage.in_features, "out_features": stage.out_features,
            "final": stage.final}


def _stage_from_json(d):
    op = d["op"]
    if op == "conv":
        return ConvStage(d["weight_idx"], d["kernel"], d["in_ch"], d["out_ch"])
    if op == "pool":
        return PoolStage(d["kernel"])
    if op == "flatten":
        return FlattenStage()
    return DenseStage(d["weight_idx"], d["in_features"], d["out_features"], d["final"])


def save_model(model, path):
    arrays = {}
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"w{l}"] = w
        arrays[f"b{l}"] = b
    if isinstance(model, MlpModel):
        meta = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "kind": "mlp",
                "layer_sizes": list(model.layer_sizes)}
    elif isinstance(model, SmallCnnModel):
        meta = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "kind": "cnn",
                "input_hw": model.input_hw,
                "stages": [_stage_to_json(s) for s in model.stages]}
    else:
        raise TypeError(f"cannot checkpoint {type(model).__name__}")
    np.savez(path, meta=json.dumps(meta), **arrays)


def load_model(path):
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format") != FORMAT_NAME:
            raise ValueError(f"{path}: not a {FORMAT_NAME} file")
        if meta.get("version") != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {meta.get('version')}")
        n = sum(1 for k in data.files if k.startswith("w"))
        weights = [data[f"w{l}"] for l in range(n)]
        biases = [data[f"b{l}"] for l in range(n)]
    if meta["kind"] == "mlp":
        return MlpModel(layer_sizes=tuple(meta["layer_sizes"]), weights=weights, biases=biases)
    stages = [_stage_from_json(d) for d in meta["stages"]]
    return SmallCnnModel(input_hw=meta["input_hw"], stages=stages, weights=weights, biases=biases)
