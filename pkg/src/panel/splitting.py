"""
Seeded per-period train/validation splitting.

For period j with B_j observations, m_j = min(ceil(fraction * B_j), B_j - 1)
observations go to the training side. The draw uses the PCG64 substream
``seeding.substream(seed, SPLIT_STREAM, j)``: a full permutation of 0..B_j-1
is drawn, its first m_j entries (sorted) are the training rows and the rest
(sorted) the validation rows.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import SplitError
from ..seeding import SPLIT_STREAM, substream
from .panel import Panel, PeriodBatch, stack_batches

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SplitPanel:
    """Per-period partition of a panel into training and validation sides."""

    train: Tuple[PeriodBatch, ...]
    validation: Tuple[PeriodBatch, ...]
    seed: int
    train_fraction: float

    @property
    def n_periods(self) -> int:
        return len(self.validation)

    def train_counts(self) -> Tuple[int, ...]:
        return tuple(b.size for b in self.train)

    def validation_counts(self) -> Tuple[int, ...]:
        return tuple(b.size for b in self.validation)

    def validation_batch(self, j: int) -> PeriodBatch:
        return self.validation[j - 1]

    def train_window(self, start: int, end: int) -> Tuple[np.ndarray, np.ndarray]:
        """Stacked training data of periods start..end (inclusive, 1-based)."""
        return stack_batches(self.train[start - 1:end])


def train_count(size: int, train_fraction: float) -> int:
    # the small slack keeps e.g. 0.8 * 5 from rounding up to 5
    return min(math.ceil(train_fraction * size - 1e-9), size - 1)


def partition_indices(size: int, train_fraction: float, seed: int, period: int) -> Tuple[np.ndarray, np.ndarray]:
    """Training and validation row indices of one period."""
    m = train_count(size, train_fraction)
    permutation = substream(seed, SPLIT_STREAM, period).permutation(size)
    return np.sort(permutation[:m]), np.sort(permutation[m:])


def split_batch(batch: PeriodBatch, train_fraction: float, seed: int) -> Tuple[PeriodBatch, PeriodBatch]:
    if batch.size < 2:
        raise SplitError(
            f"Period {batch.period} has a single observation: cannot guarantee nonempty validation",
            {"period": batch.period},
        )
    train_idx, validation_idx = partition_indices(batch.size, train_fraction, seed, batch.period)
    return batch.subset(train_idx), batch.subset(validation_idx)


def split(panel: Panel, train_fraction: float, seed: int) -> SplitPanel:
    """Split every period of a panel with its own seeded substream."""
    if not 0.0 < train_fraction < 1.0:
        raise SplitError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if seed < 0:
        raise SplitError(f"seed must be unsigned, got {seed}")
    batches = list(panel)
    logger.debug(f"Splitting {len(batches)} periods with fraction {train_fraction} and seed {seed}")
    sides = [split_batch(batch, train_fraction, seed) for batch in batches]
    return SplitPanel(
        train=tuple(s[0] for s in sides),
        validation=tuple(s[1] for s in sides),
        seed=seed,
        train_fraction=train_fraction,
    )
