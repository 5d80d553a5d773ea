"""Systolic-array state: fault seeding, FSR, deactivation, faulty inference.

The array is weight-stationary: weight matrix entry (i, j) lives on PE
(i mod N_Row, j mod N_Col), so larger layers tile onto the grid and a
faulty PE corrupts every product it hosts. Deactivated PEs contribute
nothing (their weights are pruned to zero).

Deactivation finds the fewest PEs to disable such that no critical-faulty
PE stays active, the active-faulty rate is within FR_max_non_crit, and no
two active faulty PEs are 4-neighbour adjacent. The adjacency part is a
minimum vertex cover, solved exactly per connected component by branch
and bound (components beyond a size cap fall back to max-degree greedy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..netcore.data import LabeledDataset
from ..netcore.inference import exact_int_matmul, quant_forward
from ..netcore.mlp import MlpModel
from .faults import (
    CRITICAL,
    NON_CRITICAL,
    NON_CRITICAL_LSBS,
    PRODUCT_WIDTH,
    LogicConeFault,
    apply_fault_to_products,
    classify,
)

_EXACT_COVER_LIMIT = 36


@dataclass(frozen=True)
class ArrayConfig:
    n_row: int = 128
    n_col: int = 128
    fmt: str = "int8"

    def __post_init__(self):
        if self.n_row < 1 or self.n_col < 1:
            raise ValueError("array dimensions must be >= 1")
        if self.fmt not in PRODUCT_WIDTH:
            raise ValueError(f"unknown data format {self.fmt!r}")


@dataclass(frozen=True)
class SignatureMix:
    """Distribution the per-PE fault signatures are drawn from.

    Non-critical signatures stick a nonempty subset of the lowest
    ``lsb_bits`` product bits; critical ones include at least one bit
    above that window. ``carry_fraction`` of faults also corrupt the
    carry-in one bit above their highest stuck bit.
    """

    critical_fraction: float = 0.0
    lsb_bits: int = 2
    carry_fraction: float = 0.0
    stuck_one_bias: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.critical_fraction <= 1.0:
            raise ValueError("critical_fraction must be in [0, 1]")
        if self.lsb_bits < 1:
            raise ValueError("lsb_bits must be >= 1")

def per_column_fault_count(fr_percent: float, n_row: int) -> int:
    """round(0.01 * FR * N_Row), halves rounded up."""
    return int(math.floor(0.01 * fr_percent * n_row + 0.5))


def _sample_signatures(pes, mix: SignatureMix, rng, fmt: str):
    """Draw one fault signature per PE, with bulk rng draws for speed."""
    n = len(pes)
    width = PRODUCT_WIDTH[fmt]
    lsb = min(mix.lsb_bits, width)
    critical = rng.random(n) < mix.critical_fraction
    counts = rng.integers(1, lsb + 1, size=n)
    bit_order = np.argsort(rng.random((n, lsb)), axis=1)
    high_bits = rng.integers(lsb, width, size=n) if lsb < width else np.zeros(n, int)
    extra_low = rng.random(n) < 0.5
    low_bits = rng.integers(0, lsb, size=n)
    stuck = rng.random((n, width)) < mix.stuck_one_bias
    carry = rng.random(n) < mix.carry_fraction

    faults = {}
    for i, pe in enumerate(pes):
        if critical[i] and lsb < width:
            bits = [int(high_bits[i])]
            if extra_low[i]:
                bits.append(int(low_bits[i]))
        else:
            bits = [int(b) for b in bit_order[i, : counts[i]]]
        cone = tuple((b, int(stuck[i, b])) for b in sorted(set(bits)))
        faults[pe] = LogicConeFault(pe=pe, cone_bits=cone, carry_fault=bool(carry[i]))
    return faults


def seed_fault_map(config: ArrayConfig, fr_percent: float, mix: SignatureMix,
                   seed: int) -> dict:
    """Exactly round(0.01*FR*N_Row) faulty PEs per column at random rows."""
    if not 0.0 <= fr_percent <= 100.0:
        raise ValueError("fault rate must be a percentage in [0, 100]")
    k = per_column_fault_count(fr_percent, config.n_row)
    if k == 0:
        return {}
    rng = np.random.default_rng(seed)
    # the k smallest of iid uniforms per column = a uniform k-subset of rows
    scores = rng.random((config.n_col, config.n_row))
    picked = np.argpartition(scores, k - 1, axis=1)[:, :k]
    pes = [
        (int(row), int(col))
        for col in range(config.n_col)
        for row in sorted(picked[col])
    ]
    return _sample_signatures(pes, mix, rng, config.fmt)


@dataclass(frozen=True)
class FsrEntry:
    pe: tuple
    criticality: str


@dataclass(frozen=True)
class FaultStatusRegister:
    entries: tuple
    fr_max_non_crit: float

    def __post_init__(self):
        if not 0.0 <= self.fr_max_non_crit <= 1.0:
            raise ValueError("FR_max_non_crit must be in [0, 1]")


def build_fsr(fault_map: dict, fmt: str, fr_max_non_crit: float) -> FaultStatusRegister:
    entries = tuple(
        FsrEntry(pe=pe, criticality=classify(fault, fmt))
        for pe, fault in sorted(fault_map.items())
    )
    return FaultStatusRegister(entries=entries, fr_max_non_crit=fr_max_non_crit)


@dataclass
class ArrayState:
    config: ArrayConfig
    faults: dict
    active: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.active is None:
            self.active = np.ones((self.config.n_row, self.config.n_col), dtype=bool)
        for (r, c) in self.faults:
            if not (0 <= r < self.config.n_row and 0 <= c < self.config.n_col):
                raise ValueError(f"fault site {(r, c)} outside the array")

    def active_faulty(self) -> list:
        return [pe for pe in sorted(self.faults) if self.active[pe]]

    def rate_active_faulty(self) -> float:
        total = int(self.active.sum())
        if total == 0:
            return 0.0
        return len(self.active_faulty()) / total


class DeactivationInfeasible(RuntimeError):
    pass


def _neighbors(pe, shape):
    r, c = pe
    for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        rr, cc = r + dr, c + dc
        if 0 <= rr < shape[0] and 0 <= cc < shape[1]:
            yield (rr, cc)


def _components(vertices, adj):
    remaining = set(vertices)
    while remaining:
        start = min(remaining)
        comp, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u in remaining and u not in comp:
                    comp.add(u)
                    stack.append(u)
        remaining -= comp
        yield sorted(comp)


def _greedy_cover(adj):
    adj = {v: set(ns) for v, ns in adj.items()}
    cover = set()
    while True:
        live = [v for v in adj if adj[v]]
        if not live:
            return cover
        v = min(live, key=lambda v: (-len(adj[v]), v))
        cover.add(v)
        for u in adj[v]:
            adj[u].discard(v)
        adj[v] = set()


def _exact_cover(adj):
    """Minimum vertex cover by branch and bound (small components only)."""
    best = [set(adj)]

    def search(adj, cover):
        if len(cover) >= len(best[0]):
            return
        live = [v for v in adj if adj[v]]
        if not live:
            best[0] = set(cover)
            return
        v = min(live, key=lambda v: (-len(adj[v]), v))
        neighbors = set(adj[v])
        # branch 1: v joins the cover
        sub = {u: ns - {v} for u, ns in adj.items() if u != v}
        search(sub, cover | {v})
        # branch 2: all of v's neighbors join the cover
        if len(cover) + len(neighbors) < len(best[0]):
            drop = neighbors | {v}
            sub = {u: ns - drop for u, ns in adj.items() if u not in drop}
            search(sub, cover | neighbors)

    search({v: set(ns) for v, ns in adj.items()}, set())
    return best[0]


def min_adjacency_cover(vertices, shape) -> set:
    """Fewest vertices whose removal leaves no two 4-adjacent vertices."""
    vertex_set = set(vertices)
    adj = {v: {u for u in _neighbors(v, shape) if u in vertex_set} for v in vertex_set}
    cover = set()
    for comp in _components(vertex_set, adj):
        comp_adj = {v: adj[v] for v in comp}
        if not any(comp_adj.values()):
            continue
        if len(comp) <= _EXACT_COVER_LIMIT:
            cover |= _exact_cover(comp_adj)
        else:
            cover |= _greedy_cover(comp_adj)
    return cover


def deactivate(state: ArrayState, fsr: FaultStatusRegister) -> np.ndarray:
    """Updated active mask meeting the deactivation protocol's constraints.

    Returns a new mask; the input state is not modified. Raises
    DeactivationInfeasible when the constraints would disable every PE.
    """
    fault_pes = set(state.faults)
    fsr_pes = {e.pe for e in fsr.entries}
    if fsr_pes != fault_pes:
        raise ValueError("FSR entries do not match the fault map")

    active = state.active.copy()
    critical = {e.pe for e in fsr.entries if e.criticality == CRITICAL}
    for pe in critical:
        active[pe] = False

    shape = (state.config.n_row, state.config.n_col)
    live_faulty = [pe for pe in sorted(fault_pes) if active[pe]]
    for pe in min_adjacency_cover(live_faulty, shape):
        active[pe] = False

    live_faulty = [pe for pe in sorted(fault_pes) if active[pe]]
    n_active = int(active.sum())
    n_faulty = len(live_faulty)
    idx = 0
    while n_active > 0 and n_faulty / n_active > fsr.fr_max_non_crit:
        pe = live_faulty[idx]
        active[pe] = False
        idx += 1
        n_active -= 1
        n_faulty -= 1
    if int(active.sum()) == 0:
        raise DeactivationInfeasible(
            "constraints disable every PE "
            f"(fr_max_non_crit={fsr.fr_max_non_crit}, all PEs faulty)"
        )
    return active


# --- faulty inference -------------------------------------------------------


def _layer_plan(shape, state: ArrayState):
    """Pruning mask and per-signature fault sites for one weight matrix."""
    fan_in, fan_out = shape
    n_row, n_col = state.config.n_row, state.config.n_col
    tiles_r = -(-fan_in // n_row)
    tiles_c = -(-fan_out // n_col)
    mask = np.tile(state.active, (tiles_r, tiles_c))[:fan_in, :fan_out]

    groups = {}
    for pe in sorted(state.faults):
        if not state.active[pe]:
            continue
        r, c = pe
        rows = np.arange(r, fan_in, n_row)
        cols = np.arange(c, fan_out, n_col)
        if not len(rows) or not len(cols):
            continue
        fault = state.faults[pe]
        ii, jj = np.meshgrid(rows, cols, indexing="ij")
        entry = groups.setdefault(fault.signature, (fault, [], []))
        entry[1].append(ii.ravel())
        entry[2].append(jj.ravel())
    plans = []
    for fault, i_parts, j_parts in groups.values():
        plans.append((fault, np.concatenate(i_parts), np.concatenate(j_parts)))
    return mask, plans


def _scatter_columns(acc, cols, contrib):
    order = np.argsort(cols, kind="stable")
    sorted_cols = cols[order]
    sorted_contrib = contrib[:, order]
    starts = np.flatnonzero(np.r_[True, sorted_cols[1:] != sorted_cols[:-1]])
    sums = np.add.reduceat(sorted_contrib, starts, axis=1)
    acc[:, sorted_cols[starts]] += sums


def faulty_matmul_factory(state: ArrayState, weight_shapes, mode: str, rng):
    """Matmul callback for quant_forward that routes through faulty PEs."""
    fmt = state.config.fmt
    plans = {}
    for idx, shape in enumerate(weight_shapes):
        plans[idx] = _layer_plan(shape, state)

    def matmul(idx, aq, wq):
        mask, fault_plans = plans[idx]
        w_eff = np.where(mask, wq, 0)
        if fmt == "int8":
            acc = exact_int_matmul(aq, w_eff)
        else:
            acc = aq @ w_eff
        for fault, ii, jj in fault_plans:
            if fmt == "int8":
                products = aq[:, ii].astype(np.int64) * w_eff[ii, jj].astype(np.int64)
            else:
                products = aq[:, ii] * w_eff[ii, jj]
            faulty = apply_fault_to_products(products, fault, fmt, mode, rng)
            _scatter_columns(acc, jj, (faulty - products).astype(np.float64))
        return acc

    return matmul


def run_array(model, state: ArrayState, dataset: LabeledDataset, mode: str = "sim",
              seed: int = 0, eval_samples: int | None = None) -> float:
    """Top-1 accuracy with every multiply routed through its hosting PE."""
    data = dataset if eval_samples is None else dataset.subset(eval_samples)
    if len(data) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    rng = np.random.default_rng(seed)
    matmul = faulty_matmul_factory(state, [w.shape for w in model.weights], mode, rng)
    if isinstance(model, MlpModel):
        x = data.flat_float()
    else:
        x = data.images.astype(np.float64)[..., None] / 255.0
    logits = quant_forward(model, x, fmt=state.config.fmt, matmul_fn=matmul)
    return float(np.mean(np.argmax(logits, axis=1) == data.labels))
