"""Aggregate campaign CSVs into summary tables and charts.

Schemas are recognized by their headers; a file whose header deviates
from a known schema is reported with the offending column named.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path

from . import svgplot

SCHEMAS = {
    "dram": ["campaign", "bit_pos", "column", "fault_count", "run_seed",
             "accuracy", "drop_pp"],
    "sweep": ["format", "k", "fr", "seed", "accuracy", "drop_pp"],
    "fault_train": ["run_seed", "baseline_accuracy", "faulty_accuracy",
                    "retrained_accuracy", "loss_before", "loss_after",
                    "relative_reduction"],
    "deactivate": ["run_seed", "stage", "accuracy", "drop_pp", "active_pes",
                   "active_faulty"],
    "endurance": ["row", "col", "path_segments", "temperature_k",
                  "endurance_cycles"],
    "history": ["epoch", "accuracy"],
    "metrics": ["metric", "value"],
    "mapping": ["cluster", "tile", "synapse", "cell_row", "cell_col", "endurance",
                "lifetime"],
}


class ReportError(RuntimeError):
    pass


def _read_csv(path: Path):
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ReportError(f"{path.name}: empty CSV") from None
        rows = list(reader)
    if not rows:
        raise ReportError(f"{path.name}: no data rows")
    return header, rows


def _classify(path: Path, header):
    for name, schema in SCHEMAS.items():
        if header == schema:
            return name
    for name, schema in SCHEMAS.items():
        if len(header) == len(schema):
            for got, want in zip(header, schema):
                if got != want:
                    raise ReportError(
                        f"{path.name}: unexpected column '{got}' (expected '{want}')"
                    )
    raise ReportError(f"{path.name}: unrecognized schema {header}")


def _mean_std(values):
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def _aggregate(rows, key_idx, value_idx):
    groups = defaultdict(list)
    for row in rows:
        try:
            value = float(row[value_idx])
        except ValueError:
            continue
        groups[tuple(row[k] for k in key_idx)].append(value)
    return {k: _mean_std(v) for k, v in sorted(groups.items())}


def report(directory, write_svg: bool = True) -> str:
    """Summarize every known CSV in a run directory; returns the text table."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.csv"))
    if not paths:
        raise ReportError(f"no CSV files in {directory}")
    lines = []
    for path in paths:
        header, rows = _read_csv(path)
        kind = _classify(path, header)
        lines.append(f"== {path.name} ({kind}, {len(rows)} rows)")
        if kind == "dram":
            agg = _aggregate(rows, (0, 1, 2, 3), 6)
            for (campaign, bit, col, count), (mean, std) in agg.items():
                where = f"column {col}" if col else f"count {count}"
                lines.append(
                    f"   {campaign} bit {bit} {where}: drop "
                    f"{mean:+.3f} ± {std:.3f} pp"
                )
            if write_svg:
                _dram_chart(directory, path, rows)
        elif kind == "sweep":
            agg = _aggregate(rows, (0, 1, 2), 5)
            for (fmt, k, fr), (mean, std) in agg.items():
                lines.append(
                    f"   {fmt} K={k} FR={fr}%: drop {mean:+.3f} ± {std:.3f} pp"
                )
        elif kind == "fault_train":
            before = [float(r[4]) for r in rows]
            after = [float(r[5]) for r in rows]
            lines.append(
                f"   normalized loss {_mean_std(before)[0]:.4f} -> "
                f"{_mean_std(after)[0]:.4f} over {len(rows)} seeds"
            )
        elif kind == "deactivate":
            agg = _aggregate(rows, (1,), 3)
            for (stage,), (mean, std) in agg.items():
                lines.append(f"   {stage}: drop {mean:+.3f} ± {std:.3f} pp")
        elif kind == "endurance":
            cells = {(int(r[0]), int(r[1])): float(r[4]) for r in rows}
            n = max(r for r, _ in cells) + 1
            lines.append(
                f"   {n}x{n} map, endurance {cells[(0, 0)]:.3g} (driver corner) "
                f"to {cells[(n - 1, n - 1)]:.3g} (far corner)"
            )
            if write_svg:
                matrix = [[cells[(i, j)] for j in range(n)] for i in range(n)]
                out = directory / f"report_{path.stem}.svg"
                out.write_text(svgplot.heatmap(
                    matrix, f"Endurance map ({n}x{n}, log10 cycles)"))
        elif kind == "history":
            accs = [float(r[1]) for r in rows]
            lines.append(f"   {len(accs)} epochs, final accuracy {accs[-1]:.4f}")
        elif kind == "metrics":
            for row in rows:
                lines.append(f"   {row[0]} = {row[1]}")
        elif kind == "mapping":
            lifetimes = [float(r[6]) for r in rows if r[6]]
            if lifetimes:
                lines.append(
                    f"   {len(rows)} synapses mapped, min lifetime "
                    f"{min(lifetimes):.4g} windows"
                )
            else:
                lines.append(f"   {len(rows)} synapses mapped, all idle")
    return "\n".join(lines)


def _dram_chart(directory, path, rows):
    by_bit = defaultdict(lambda: defaultdict(list))
    is_column = any(r[2] for r in rows)
    for r in rows:
        x = int(r[2]) if is_column else int(r[3])
        by_bit[r[1]][x].append(float(r[6]))
    series = {
        f"bit {bit}": [(x, sum(v) / len(v)) for x, v in sorted(points.items())]
        for bit, points in by_bit.items()
    }
    xlabel = "column" if is_column else "faults per layer"
    out = directory / f"report_{path.stem}.svg"
    out.write_text(svgplot.line_chart(
        series, f"{path.stem}: mean accuracy drop", xlabel, "mean drop (pp)"))
