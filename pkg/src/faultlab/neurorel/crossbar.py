"""PCM crossbar parasitics, self-heating temperature, and endurance maps.

Cell (i, j) sits i + j wire segments from the driver corner, which is
indexed (0, 0) — physically the bottom-left, hottest corner; (n-1, n-1)
is the far, coolest corner. Programming current through a cell is
V_active / (R_device + segments * r_seg); Joule self-heating raises the
cell temperature by R_thermal * I^2 * R_device above ambient, and
endurance falls exponentially with that temperature rise.

The temperature and endurance constants are calibrated so the default
128x128 geometry at 298 K spans roughly 1e6 write cycles at the driver
corner to 1e10 at the far corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CP_VOLTAGES = {"diode": (1.8, 3.0), "transistor": (1.2, 1.8)}  # (idle, active)


@dataclass(frozen=True)
class CrossbarConfig:
    n: int = 128
    r_seg: float = 25.0  # ohms per wire segment
    access_device: str = "diode"
    t_amb: float = 298.0
    cp_idle: float | None = None
    cp_active: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("crossbar dimension must be >= 1")
        if self.r_seg < 0:
            raise ValueError("segment resistance must be non-negative")
        if self.access_device not in CP_VOLTAGES:
            raise ValueError(f"unknown access device {self.access_device!r}")
        if self.t_amb <= 0:
            raise ValueError("ambient temperature must be positive")
        idle, active = CP_VOLTAGES[self.access_device]
        if self.cp_idle is None:
            object.__setattr__(self, "cp_idle", idle)
        if self.cp_active is None:
            object.__setattr__(self, "cp_active", active)
        if self.cp_idle <= 0 or self.cp_active <= 0:
            raise ValueError("charge-pump voltages must be positive")


def cell_path_length(i: int, j: int, config: CrossbarConfig) -> int:
    """Parasitic segments on the current path of cell (i, j): i + j."""
    if not (0 <= i < config.n and 0 <= j < config.n):
        raise ValueError(f"cell ({i}, {j}) outside {config.n}x{config.n} crossbar")
    return i + j


@dataclass(frozen=True)
class EnduranceModelParams:
    r_device: float = 10_000.0  # ohms
    r_thermal: float = 115_000.0  # K/W
    beta: float = 0.15  # 1/K, endurance decay per kelvin
    e_ref: float = 1e12  # cycles at t_ref
    t_ref: float = 298.0

    def __post_init__(self):
        if self.r_device <= 0 or self.r_thermal <= 0:
            raise ValueError("resistances must be positive")
        if self.beta <= 0 or self.e_ref <= 0:
            raise ValueError("endurance constants must be positive")


@dataclass(frozen=True)
class EnduranceMap:
    temperature: np.ndarray  # kelvin, (n, n)
    endurance: np.ndarray  # write cycles, (n, n)

    def __post_init__(self):
        if self.temperature.shape != self.endurance.shape:
            raise ValueError("temperature and endurance shapes differ")
        if not np.all(self.endurance > 0):
            raise ValueError("endurance must be positive everywhere")

    @property
    def n(self) -> int:
        return self.temperature.shape[0]


def default_endurance_params(
    config: CrossbarConfig,
    e_hot: float = 1e6,
    e_cold: float = 1e10,
    t_hot: float = 400.0,
    r_device: float = 10_000.0,
) -> EnduranceModelParams:
    """Calibrate thermal and endurance constants to the corner targets.

    Solves R_thermal so the driver corner reaches ``t_hot``, then beta and
    E_ref so corner endurances hit ``e_hot`` and ``e_cold`` exactly for
    this geometry. Needs r_seg > 0 (otherwise the map is uniform and the
    corner ratio cannot be met).
    """
    if config.r_seg <= 0:
        raise ValueError("corner calibration needs r_seg > 0")
    if not (0 < e_hot < e_cold):
        raise ValueError("need 0 < e_hot < e_cold")
    if t_hot <= config.t_amb:
        raise ValueError("t_hot must exceed ambient")
    v = config.cp_active
    i_hot = v / r_device
    i_cold = v / (r_device + 2 * (config.n - 1) * config.r_seg)
    r_thermal = (t_hot - config.t_amb) / (i_hot**2 * r_device)
    t_cold = config.t_amb + r_thermal * i_cold**2 * r_device
    beta = math.log(e_cold / e_hot) / (t_hot - t_cold)
    e_ref = e_hot * math.exp(beta * (t_hot - config.t_amb))
    return EnduranceModelParams(
        r_device=r_device, r_thermal=r_thermal, beta=beta, e_ref=e_ref,
        t_ref=config.t_amb,
    )


def build_endurance_map(config: CrossbarConfig,
                        params: EnduranceModelParams | None = None) -> EnduranceMap:
    """Per-cell self-heating temperature and write endurance."""
    if params is None:
        params = default_endurance_params(config)
    idx = np.arange(config.n)
    segments = idx[:, None] + idx[None, :]
    current = config.cp_active / (params.r_device + segments * config.r_seg)
    temperature = config.t_amb + params.r_thermal * current**2 * params.r_device
    endurance = params.e_ref * np.exp(-params.beta * (temperature - params.t_ref))
    return EnduranceMap(temperature=temperature, endurance=endurance)
