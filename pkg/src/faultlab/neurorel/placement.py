"""Endurance-aware synapse placement inside one crossbar.

Synapses sorted by activation (descending) go onto cells sorted by
endurance (descending): the busiest synapse always lands on the most
durable cell. Ties break by synapse index, then cell (row, col).
"""

from __future__ import annotations

import math

import numpy as np

from .crossbar import EnduranceMap


def place_synapses(synapses, endurance_map: EnduranceMap) -> dict:
    """Injective synapse-index -> (row, col) assignment."""
    n = endurance_map.n
    if len(synapses) > n * n:
        raise ValueError(
            f"{len(synapses)} synapses exceed the {n}x{n} crossbar's {n * n} cells"
        )
    order = sorted(range(len(synapses)),
                   key=lambda k: (-synapses[k].activation, k))
    flat = endurance_map.endurance.ravel()
    cell_order = np.lexsort(
        (np.arange(flat.size) % n, np.arange(flat.size) // n, -flat)
    )
    return {
        k: (int(cell_order[slot] // n), int(cell_order[slot] % n))
        for slot, k in enumerate(order)
    }


def effective_lifetime(assignment: dict, synapses, endurance_map: EnduranceMap) -> float:
    """Workload windows until the busiest-per-endurance cell wears out.

    min over mapped cells of endurance / activation; cells whose synapse
    never writes (activation 0) cannot wear out and are excluded. All-idle
    mappings have unbounded lifetime (inf).
    """
    if not assignment:
        raise ValueError("no mapped synapses")
    best = math.inf
    for k, (row, col) in assignment.items():
        activation = synapses[k].activation
        if activation > 0:
            best = min(best, float(endurance_map.endurance[row, col]) / activation)
    return best
