"""Experiment configuration: YAML schema, validation, canonical form.

A config is a YAML mapping with an ``experiment`` kind, a master ``seed``,
and per-kind sections. ``validate`` normalizes (filling documented
defaults) and returns every offending field at once; ``render`` /
``parse`` round-trip the normalized form byte-stably.
"""

from __future__ import annotations

import copy
from pathlib import Path

import yaml

EXPERIMENTS = (
    "train",
    "dram-bitpos",
    "dram-column",
    "mac-sweep",
    "deactivate",
    "fault-train",
    "endurance-map",
    "neuro-map",
)

_NEEDS_MODEL = {"train", "dram-bitpos", "dram-column", "mac-sweep", "deactivate",
                "fault-train"}

_DEFAULTS = {
    "model": {"kind": "mlp", "layers": [784, 256, 256, 256, 10], "checkpoint": None},
    "dataset": {
        "kind": "synthetic",
        "train": 6000,
        "test": 2000,
        "seed": 1,
        "test_seed": 2,
        "classes": 10,
        "size": 28,
        "params": {},
    },
    "train": {"epochs": 12, "lr": 0.15, "batch": 64},
    "report": {"svg": True},
}

_CAMPAIGN_DEFAULTS = {
    "train": {},
    "dram-bitpos": {
        "counts": [40, 250],
        "bit_positions": [7, 6, 5],
        "runs": 10,
        "eval_samples": None,
    },
    "dram-column": {
        "faults_per_column": 20,
        "bit_pos": 7,
        "runs": 10,
        "grid_width": 16,
        "eval_samples": None,
        "track_recall": False,
    },
    "mac-sweep": {
        "k_values": [2, 3, 4],
        "fr_grid": [0.0, 5.0, 10.0],
        "runs": 10,
        "fmt": "int8",
        "mode": "sim",
        "carry_fraction": 0.0,
        "stuck_one_bias": 0.5,
        "n_row": 128,
        "n_col": 128,
        "eval_samples": None,
    },
    "deactivate": {
        "fr": 7.5,
        "fr_max_non_crit": 0.05,
        "critical_fraction": 0.1,
        "lsb_bits": 2,
        "carry_fraction": 0.5,
        "fmt": "int8",
        "n_row": 128,
        "n_col": 128,
        "runs": 5,
        "eval_samples": None,
    },
    "fault-train": {
        "fr": 7.5,
        "fr_max_non_crit": 0.02,
        "lsb_bits": 2,
        "carry_fraction": 0.5,
        "fmt": "int8",
        "n_row": 128,
        "n_col": 128,
        "seeds": 5,
        "retrain_epochs": 8,
        "retrain_lr": 0.15,
        "eval_samples": None,
    },
    "endurance-map": {
        "n": 128,
        "r_seg": 25.0,
        "access_device": "diode",
        "t_amb": 298.0,
    },
    "neuro-map": {
        "capacity": 10,
        "crossbar_n": 16,
        "tiles": [
            {"voltage": 3.0, "temperature": 298.0},
            {"voltage": 1.8, "temperature": 298.0},
        ],
        "particles": 20,
        "iterations": 50,
        "comm_weight": 0.0,
        "baseline_seeds": 10,
    },
}

_WORKLOAD_DEFAULTS = {"path": None, "neurons": 40, "synapses": 250, "seed": 11,
                      "max_activation": 1000.0}


def _merge(defaults: dict, given, errors, prefix) -> dict:
    out = copy.deepcopy(defaults)
    if given is None:
        return out
    if not isinstance(given, dict):
        errors.append(f"{prefix}: expected a mapping")
        return out
    for key, value in given.items():
        if key not in defaults:
            errors.append(f"{prefix}.{key}: unknown key")
        else:
            out[key] = value
    return out


def validate(raw: dict, base_dir: Path | None = None):
    """Normalize a raw config dict; returns (config, list of field errors)."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        return None, ["config: expected a YAML mapping"]
    cfg: dict = {}

    kind = raw.get("experiment")
    if kind not in EXPERIMENTS:
        errors.append(
            f"experiment: {kind!r} is not one of {', '.join(EXPERIMENTS)}"
        )
        return None, errors
    cfg["experiment"] = kind

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        errors.append("seed: must be an integer")
        seed = 0
    cfg["seed"] = seed

    cfg["output_dir"] = raw.get("output_dir")
    if cfg["output_dir"] is not None and not isinstance(cfg["output_dir"], str):
        errors.append("output_dir: must be a path string")

    known_top = {"experiment", "seed", "output_dir", "model", "dataset", "train",
                 "campaign", "report", "workload"}
    for key in raw:
        if key not in known_top:
            errors.append(f"{key}: unknown key")

    if kind in _NEEDS_MODEL:
        cfg["model"] = _merge(_DEFAULTS["model"], raw.get("model"), errors, "model")
        if cfg["model"]["kind"] not in ("mlp", "lenet5"):
            errors.append(f"model.kind: {cfg['model']['kind']!r} not mlp or lenet5")
        layers = cfg["model"]["layers"]
        if cfg["model"]["kind"] == "mlp":
            if (not isinstance(layers, list) or len(layers) < 2
                    or any(not isinstance(x, int) or x < 1 for x in layers)):
                errors.append("model.layers: need a list of >= 2 positive sizes")
        if cfg["model"]["checkpoint"] is not None:
            path = _resolve(cfg["model"]["checkpoint"], base_dir)
            if not path.exists():
                errors.append(f"model.checkpoint: file not found '{path}'")

        cfg["dataset"] = _merge(_DEFAULTS["dataset"], raw.get("dataset"), errors,
                                "dataset")
        ds = cfg["dataset"]
        if ds["kind"] == "synthetic":
            for field in ("train", "test"):
                if not isinstance(ds[field], int) or ds[field] < 1:
                    errors.append(f"dataset.{field}: must be a positive integer")
        elif ds["kind"] == "idx":
            for field in ("train_images", "train_labels", "test_images",
                          "test_labels"):
                value = ds.get(field) if field in ds else raw.get("dataset", {}).get(field)
                if not value:
                    errors.append(f"dataset.{field}: required for idx datasets")
                else:
                    path = _resolve(value, base_dir)
                    if not path.exists():
                        errors.append(f"dataset.{field}: file not found '{path}'")
                    ds[field] = str(value)
        else:
            errors.append(f"dataset.kind: {ds['kind']!r} not synthetic or idx")

        cfg["train"] = _merge(_DEFAULTS["train"], raw.get("train"), errors, "train")
        tr = cfg["train"]
        if not isinstance(tr["epochs"], int) or tr["epochs"] < 0:
            errors.append("train.epochs: must be a non-negative integer")
        if not (isinstance(tr["lr"], (int, float)) and tr["lr"] > 0):
            errors.append("train.lr: must be positive")
        if not isinstance(tr["batch"], int) or tr["batch"] < 1:
            errors.append("train.batch: must be a positive integer")

    if kind == "neuro-map":
        cfg["workload"] = _merge(_WORKLOAD_DEFAULTS, raw.get("workload"), errors,
                                 "workload")
        wl = cfg["workload"]
        if wl["path"] is not None:
            path = _resolve(wl["path"], base_dir)
            if not path.exists():
                errors.append(f"workload.path: file not found '{path}'")

    cfg["campaign"] = _merge(_CAMPAIGN_DEFAULTS[kind], raw.get("campaign"), errors,
                             "campaign")
    camp = cfg["campaign"]
    if "runs" in camp and (not isinstance(camp["runs"], int) or camp["runs"] < 1):
        errors.append("campaign.runs: must be a positive integer")
    if "fr" in camp and not 0 <= camp["fr"] <= 100:
        errors.append("campaign.fr: must be a percentage in [0, 100]")
    if "fr_max_non_crit" in camp and not 0 <= camp["fr_max_non_crit"] <= 1:
        errors.append("campaign.fr_max_non_crit: must be in [0, 1]")
    if "bit_positions" in camp:
        if any(not isinstance(b, int) or not 0 <= b <= 7
               for b in camp["bit_positions"]):
            errors.append("campaign.bit_positions: bits must be in [0, 7]")
    if "bit_pos" in camp and not 0 <= camp["bit_pos"] <= 7:
        errors.append("campaign.bit_pos: must be in [0, 7]")
    if "fmt" in camp and camp["fmt"] not in ("int8", "bfloat16"):
        errors.append(f"campaign.fmt: {camp['fmt']!r} not int8 or bfloat16")
    if "tiles" in camp:
        if not isinstance(camp["tiles"], list) or not camp["tiles"]:
            errors.append("campaign.tiles: need at least one tile")

    cfg["report"] = _merge(_DEFAULTS["report"], raw.get("report"), errors, "report")
    return (cfg if not errors else None), errors


def _resolve(path_str: str, base_dir: Path | None) -> Path:
    path = Path(path_str)
    if not path.is_absolute() and base_dir is not None:
        return base_dir / path
    return path


def render(config: dict) -> str:
    """Canonical YAML text of a normalized config."""
    return yaml.safe_dump(config, sort_keys=True)


def parse(text: str) -> dict:
    return yaml.safe_load(text)


def load_config(path):
    """Parse and validate a config file; returns (config, errors)."""
    path = Path(path)
    try:
        raw = parse(path.read_text())
    except (OSError, yaml.YAMLError) as err:
        return None, [f"config: cannot read {path}: {err}"]
    return validate(raw, base_dir=path.parent)
