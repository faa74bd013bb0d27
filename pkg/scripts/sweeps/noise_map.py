"""Noise figure over (probe order, conjugate order)."""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from physics.errors import EmptyGridError
from scripts.pipelines.squeeze_pipeline import TwinBeamPipeline
from scripts.sweeps.ordered_pool import ordered_map


@dataclass
class MapRow:
    q: int
    snf_by_conjugate: Dict[int, float]
    channel_by_conjugate: Dict[int, int]
    error: Optional[str] = None


@dataclass
class NoiseFigureMap:
    probe_orders: List[int]
    conjugate_orders: List[int]
    values: np.ndarray  # log10 S_NF, NaN where no channel links the pair
    channels: np.ndarray  # n = q + m, NaN where forbidden

    def rows(self, db: bool = False) -> List[Dict[str, float]]:
        scale = 10.0 if db else 1.0
        out = []
        for i, q in enumerate(self.probe_orders):
            row = {"q": q}
            for j, m in enumerate(self.conjugate_orders):
                row[f"m{m}"] = scale * self.values[i, j]
            out.append(row)
        return out

    def columns(self) -> List[str]:
        return ["q"] + [f"m{m}" for m in self.conjugate_orders]

    def long_rows(self) -> List[Dict[str, float]]:
        out = []
        for i, q in enumerate(self.probe_orders):
            for j, m in enumerate(self.conjugate_orders):
                value = self.values[i, j]
                if math.isnan(value):
                    continue
                out.append(
                    {"q": q, "m": m, "n": int(self.channels[i, j]), "snf_log10": value, "snf_db": 10.0 * value}
                )
        return out

    def most_squeezed(self, q: int) -> Optional[int]:
        """Conjugate order with the most negative S_NF in row q."""
        row = self.values[self.probe_orders.index(q)]
        if np.all(np.isnan(row)):
            return None
        return self.conjugate_orders[int(np.nanargmin(row))]


def compute_row(pipeline: TwinBeamPipeline, q: int, channel_orders: Sequence[int]) -> MapRow:
    try:
        reports = pipeline.run(q=q, channels=channel_orders)
    except EmptyGridError as e:
        logger.warning(f"probe order q={q}: {e}")
        return MapRow(q=q, snf_by_conjugate={}, channel_by_conjugate={}, error=str(e))
    return MapRow(
        q=q,
        snf_by_conjugate={r.n - q: r.snf_log10 for r in reports},
        channel_by_conjugate={r.n - q: r.n for r in reports},
    )


def noise_figure_map(
    pipeline: TwinBeamPipeline,
    probe_orders: Sequence[int],
    channel_orders: Optional[Sequence[int]] = None,
    max_workers: Optional[int] = None,
) -> NoiseFigureMap:
    """
    One multimode run per probe order; rows are independent and computed in parallel.
    """
    channel_orders = tuple(channel_orders or pipeline.cfg.channel_orders_n)
    probe_orders = [int(q) for q in probe_orders]
    logger.info(f"Noise-figure map over q={probe_orders}, n={list(channel_orders)}")

    rows = ordered_map(
        lambda q: compute_row(pipeline, q, channel_orders),
        probe_orders,
        max_workers=max_workers,
        desc="map rows",
    )

    conjugates = sorted({m for row in rows for m in row.snf_by_conjugate})
    values = np.full((len(rows), len(conjugates)), np.nan)
    channels = np.full((len(rows), len(conjugates)), np.nan)
    for i, row in enumerate(rows):
        for j, m in enumerate(conjugates):
            if m in row.snf_by_conjugate:
                values[i, j] = row.snf_by_conjugate[m]
                channels[i, j] = row.channel_by_conjugate[m]
    return NoiseFigureMap(probe_orders, conjugates, values, channels)
