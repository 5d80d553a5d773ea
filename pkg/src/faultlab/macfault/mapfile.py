"""Fault map file format: YAML document with config, faults, and FSR dump.

Schema (faultlab-faultmap/1):
  format: faultlab-faultmap/1
  config: {n_row, n_col, fmt}
  seed: int or null
  fr_max_non_crit: float or null
  faults: [{row, col, cone_bits: [[bit, stuck], ...], carry: bool}]
  fsr: [{row, col, criticality}]          # present when an FSR was dumped
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .array import ArrayConfig, FaultStatusRegister, FsrEntry
from .faults import LogicConeFault

FORMAT_TAG = "faultlab-faultmap/1"


def save_fault_map(path, config: ArrayConfig, fault_map: dict,
                   fsr: FaultStatusRegister | None = None, seed: int | None = None):
    doc = {
        "format": FORMAT_TAG,
        "config": {"n_row": config.n_row, "n_col": config.n_col, "fmt": config.fmt},
        "seed": seed,
        "fr_max_non_crit": None if fsr is None else fsr.fr_max_non_crit,
        "faults": [
            {
                "row": pe[0],
                "col": pe[1],
                "cone_bits": [[b, v] for b, v in fault.cone_bits],
                "carry": fault.carry_fault,
            }
            for pe, fault in sorted(fault_map.items())
        ],
    }
    if fsr is not None:
        doc["fsr"] = [
            {"row": e.pe[0], "col": e.pe[1], "criticality": e.criticality}
            for e in fsr.entries
        ]
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))


def load_fault_map(path):
    """Returns (config, fault_map, fsr_or_None, seed_or_None)."""
    doc = yaml.safe_load(Path(path).read_text())
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise ValueError(f"{path}: not a {FORMAT_TAG} document")
    cfg = doc["config"]
    config = ArrayConfig(n_row=cfg["n_row"], n_col=cfg["n_col"], fmt=cfg["fmt"])
    fault_map = {}
    for item in doc.get("faults", []):
        pe = (int(item["row"]), int(item["col"]))
        fault_map[pe] = LogicConeFault(
            pe=pe,
            cone_bits=tuple((int(b), int(v)) for b, v in item["cone_bits"]),
            carry_fault=bool(item["carry"]),
        )
    fsr = None
    if "fsr" in doc:
        entries = tuple(
            FsrEntry(pe=(int(e["row"]), int(e["col"])), criticality=e["criticality"])
            for e in doc["fsr"]
        )
        fsr = FaultStatusRegister(entries=entries,
                                  fr_max_non_crit=float(doc["fr_max_non_crit"]))
    return config, fault_map, fsr, doc.get("seed")
