"""One-dimensional parameter sweeps of the noise figure for a fixed photon pair."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from physics.errors import TwinBeamError
from scripts.pipelines.squeeze_pipeline import TwinBeamPipeline
from scripts.sweeps.ordered_pool import ordered_map
from utils import units


class SweepVariable(Enum):
    PUMP_INTENSITY = "pump_intensity"  # W/cm^2
    CELL_LENGTH = "cell_length"  # mm
    PROBE_ORDER = "probe_order"
    GAS_PRESSURE = "gas_pressure"  # bar


# config key in the physics section for every variable except cell_length
_PHYSICS_KEY = {
    SweepVariable.PUMP_INTENSITY: "pump_intensity_w_cm2",
    SweepVariable.PROBE_ORDER: "probe_order_q",
    SweepVariable.GAS_PRESSURE: "pressure_bar",
}

SWEEP_COLUMNS = ["index", "value", "snf_log10", "two_mode_snf_log10", "snf_db", "var", "var_snl"]


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    start: float
    stop: float
    count: int
    spacing: str = "linear"
    channel_n: int = 14
    probe_order_q: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        if self.count < 2:
            raise ValueError(f"sweep count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(f"sweep start {self.start} must be below stop {self.stop}")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"spacing must be 'linear' or 'log', got: {self.spacing}")
        if self.spacing == "log" and self.start <= 0:
            raise ValueError("log spacing needs a positive start")

    def values(self) -> Tuple[float, ...]:
        if self.spacing == "log":
            grid = np.geomspace(self.start, self.stop, self.count)
        else:
            grid = np.linspace(self.start, self.stop, self.count)
        if self.variable is SweepVariable.PROBE_ORDER:
            return tuple(float(round(v)) for v in grid)
        return tuple(float(v) for v in grid)


def nan_row(index: int, value: float) -> Dict[str, float]:
    row = {c: float("nan") for c in SWEEP_COLUMNS}
    row.update(index=index, value=value)
    return row


def sweep_point(base: TwinBeamPipeline, spec: SweepSpec, index: int, value: float) -> Dict[str, float]:
    """
    One independent point; dipoles stay those of the base pipeline (calibrated once).
    """
    q = spec.probe_order_q or base.cfg.probe_order_q
    try:
        if spec.variable is SweepVariable.CELL_LENGTH:
            report = base.pair(q, spec.channel_n, z=units.mm_to_m(value))
        else:
            key = _PHYSICS_KEY[spec.variable]
            changes = {key: int(value) if spec.variable is SweepVariable.PROBE_ORDER else value}
            config = base.config.with_section("physics", **changes)
            pipeline = TwinBeamPipeline(config, model=base.model)
            if spec.variable is SweepVariable.PROBE_ORDER:
                q = int(value)
            report = pipeline.pair(q, spec.channel_n)
    except (TwinBeamError, ValueError, KeyError, ZeroDivisionError) as e:
        logger.warning(f"sweep point {index} ({spec.variable.value}={value:g}) failed: {e}")
        return nan_row(index, value)

    return {
        "index": index,
        "value": value,
        "snf_log10": report.snf_log10,
        "two_mode_snf_log10": report.two_mode_snf_log10,
        "snf_db": report.snf_db,
        "var": report.var,
        "var_snl": report.var_snl,
    }


def run_sweep(
    base: TwinBeamPipeline, spec: SweepSpec, max_workers: Optional[int] = None
) -> List[Dict[str, float]]:
    """Rows in sweep order; failed points are NaN rows, never dropped."""
    values = spec.values()
    logger.info(
        f"Sweeping {spec.variable.value} over {len(values)} points "
        f"[{values[0]:g}, {values[-1]:g}] for channel n={spec.channel_n}"
    )
    return ordered_map(
        lambda item: sweep_point(base, spec, item[0], item[1]),
        list(enumerate(values)),
        max_workers=max_workers,
        desc="sweep points",
    )
