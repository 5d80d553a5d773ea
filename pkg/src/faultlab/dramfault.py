"""2D DRAM weight layout and bit-flip injection campaigns.

Each layer's int8 weight matrix is laid out as a rows x columns grid of
stored bytes, one neuron per column (the output layer's 10 neurons occupy
columns 0-9). Campaigns flip chosen bit positions at seeded random cells
and measure the int8 inference accuracy drop against the fault-free
baseline, in percentage points.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .netcore.data import LabeledDataset
from .netcore.inference import quant_forward, quantize_weights
from .quantnum import Int8Tensor, byte_to_int8, int8_to_byte

SIGN_BIT = 7


@dataclass(frozen=True)
class WeightGrid:
    """Stored bytes of one layer: (fan_in rows) x (width columns).

    Columns beyond ``n_neurons`` are padding cells that never map back to a
    weight; ``column_map()`` reports which neuron a column feeds.
    """

    cells: np.ndarray  # uint8, shape (rows, width)
    scale: float
    n_neurons: int

    def __post_init__(self):
        if self.cells.dtype != np.uint8 or self.cells.ndim != 2:
            raise ValueError("cells must be a 2D uint8 array")
        if not 0 < self.n_neurons <= self.cells.shape[1]:
            raise ValueError(
                f"{self.n_neurons} neurons do not fit grid width {self.cells.shape[1]}"
            )

    @property
    def shape(self):
        return self.cells.shape

    def column_map(self, column: int):
        if not 0 <= column < self.cells.shape[1]:
            raise ValueError(f"column {column} out of range")
        return column if column < self.n_neurons else None


@dataclass(frozen=True)
class InjectionPlan:
    """One injection: ``count`` flips of ``bit_pos`` in the target region.

    ``target`` is a column index, or None for the whole grid. Cells are
    sampled without replacement, so no flip can cancel another.
    """

    bit_pos: int
    count: int
    seed: int
    target: int | None = None

    def __post_init__(self):
        if not 0 <= self.bit_pos <= 7:
            raise ValueError(f"bit_pos {self.bit_pos} out of range")
        if self.count < 0:
            raise ValueError("count must be non-negative")


def layout(weights: Int8Tensor, width: int | None = None) -> WeightGrid:
    """Place a layer's int8 weights neuron-per-column into a grid."""
    raw = weights.raw
    if raw.ndim != 2:
        raise ValueError("expected a 2D weight matrix")
    rows, neurons = raw.shape
    width = neurons if width is None else int(width)
    if width < neurons:
        raise ValueError(f"width {width} below neuron count {neurons}")
    cells = np.zeros((rows, width), dtype=np.uint8)
    cells[:, :neurons] = int8_to_byte(raw)
    return WeightGrid(cells=cells, scale=weights.scale, n_neurons=neurons)


def extract(grid: WeightGrid) -> Int8Tensor:
    """Inverse of layout: the weight columns viewed back as int8."""
    return Int8Tensor(
        raw=byte_to_int8(grid.cells[:, : grid.n_neurons]).copy(), scale=grid.scale
    )


def inject(grid: WeightGrid, plan: InjectionPlan):
    """Flip ``plan.count`` distinct cells; returns (new grid, flip sites)."""
    rows, width = grid.shape
    if plan.target is not None and not 0 <= plan.target < width:
        raise ValueError(f"target column {plan.target} beyond grid width {width}")
    n_eligible = rows if plan.target is not None else rows * width
    if plan.count > n_eligible:
        raise ValueError(f"count {plan.count} exceeds {n_eligible} eligible cells")
    rng = np.random.default_rng(plan.seed)
    picks = rng.choice(n_eligible, size=plan.count, replace=False)
    if plan.target is not None:
        sites = [(int(r), plan.target) for r in picks]
    else:
        sites = [(int(p // width), int(p % width)) for p in picks]
    cells = grid.cells.copy()
    mask = np.uint8(1 << plan.bit_pos)
    for r, c in sites:
        cells[r, c] ^= mask
    return replace(grid, cells=cells), sites


def model_grids(model, width: int | None = None) -> list[WeightGrid]:
    """One grid per layer from per-tensor int8 quantization."""
    return [layout(wq, width=width) for wq in quantize_weights(model)]


def _int8_predictions(model, dataset: LabeledDataset, weights_q) -> np.ndarray:
    logits = quant_forward(model, dataset.flat_float(), fmt="int8", weights_q=weights_q)
    return np.argmax(logits, axis=1)


def _int8_accuracy(model, dataset: LabeledDataset, weights_q) -> float:
    pred = _int8_predictions(model, dataset, weights_q)
    return float(np.mean(pred == dataset.labels))


def _run_seed(master: int, *tags: int) -> int:
    return int(np.random.SeedSequence(entropy=[int(master), *map(int, tags)])
               .generate_state(1)[0])


@dataclass(frozen=True)
class CampaignRow:
    campaign: str
    bit_pos: int
    column: int | None
    fault_count: int
    run_seed: int
    accuracy: float
    drop_pp: float


def bitpos_campaign(
    model,
    dataset: LabeledDataset,
    counts,
    bit_positions=(7, 6, 5),
    runs: int = 10,
    seed: int = 0,
    eval_samples: int | None = None,
):
    """Whole-grid flips at each (bit position, fault count) pair.

    Injects ``count`` faults into every layer's grid (independent draws per
    layer), evaluates int8 accuracy, and averages the drop over ``runs``
    seeded runs. Returns (rows, mean_table) where mean_table maps
    (bit_pos, count) -> mean drop in percentage points.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    data = dataset if eval_samples is None else dataset.subset(eval_samples)
    grids = model_grids(model)
    baseline_wq = [extract(g) for g in grids]
    baseline = _int8_accuracy(model, data, baseline_wq)

    rows = []
    for bit_pos in bit_positions:
        for count in counts:
            for run in range(runs):
                run_seed = _run_seed(seed, bit_pos, count, run)
                faulty = []
                for l, grid in enumerate(grids):
                    plan = InjectionPlan(bit_pos=bit_pos, count=count,
                                         seed=_run_seed(run_seed, l))
                    mutated, _ = inject(grid, plan)
                    faulty.append(extract(mutated))
                acc = _int8_accuracy(model, data, faulty)
                rows.append(CampaignRow("bitpos", bit_pos, None, count, run_seed,
                                        acc, (baseline - acc) * 100.0))
    mean_table = {}
    for bit_pos in bit_positions:
        for count in counts:
            drops = [r.drop_pp for r in rows
                     if r.bit_pos == bit_pos and r.fault_count == count]
            mean_table[(bit_pos, count)] = float(np.mean(drops))
    return rows, mean_table


def column_campaign(
    model,
    dataset: LabeledDataset,
    faults_per_column: int = 20,
    bit_pos: int = SIGN_BIT,
    runs: int = 10,
    seed: int = 0,
    grid_width: int = 16,
    eval_samples: int | None = None,
    track_recall: bool = False,
):
    """Column-targeted sign-bit attack on the output layer's grid.

    For each grid column, flips ``faults_per_column`` cells in that column
    only and measures the accuracy drop; columns holding no neuron (index
    >= class count) leave the model untouched. Returns (rows, mean_drops,
    recall_drops) where mean_drops is indexed by column and recall_drops
    (present when ``track_recall``) maps column -> mean per-class recall
    drop array over runs.
    """
    n_classes = model.weights[-1].shape[1]
    if n_classes != 10:
        raise ValueError(f"column campaign expects a 10-class output, got {n_classes}")
    data = dataset if eval_samples is None else dataset.subset(eval_samples)
    grids = model_grids(model)
    out_grid = layout(quantize_weights(model)[-1], width=grid_width)
    baseline_wq = [extract(g) for g in grids]
    base_pred = _int8_predictions(model, data, baseline_wq)
    baseline = float(np.mean(base_pred == data.labels))
    baseline_recall = _recall_from(base_pred, data.labels, n_classes)

    rows, recall_drops = [], {}
    for column in range(grid_width):
        per_run_recall = []
        for run in range(runs):
            run_seed = _run_seed(seed, column, run)
            plan = InjectionPlan(bit_pos=bit_pos, count=faults_per_column,
                                 seed=run_seed, target=column)
            mutated, _ = inject(out_grid, plan)
            faulty = baseline_wq[:-1] + [extract(mutated)]
            pred = _int8_predictions(model, data, faulty)
            acc = float(np.mean(pred == data.labels))
            rows.append(CampaignRow("column", bit_pos, column, faults_per_column,
                                    run_seed, acc, (baseline - acc) * 100.0))
            if track_recall:
                recall = _recall_from(pred, data.labels, n_classes)
                per_run_recall.append(baseline_recall - recall)
        if track_recall:
            recall_drops[column] = np.mean(per_run_recall, axis=0)
    mean_drops = {
        column: float(np.mean([r.drop_pp for r in rows if r.column == column]))
        for column in range(grid_width)
    }
    return rows, mean_drops, recall_drops


def _recall_from(pred: np.ndarray, labels: np.ndarray, n_classes: int) -> np.ndarray:
    recall = np.zeros(n_classes)
    for c in range(n_classes):
        mask = labels == c
        recall[c] = np.mean(pred[mask] == c) if mask.any() else 0.0
    return recall
