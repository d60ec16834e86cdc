"""
Pairwise model comparison by adaptive window choice.

The window ℓ̂ is the least minimizer of φ̂ + ψ̂ over the scanned windows, and
f1 wins iff Δ̂ at ℓ̂ is ≤ 0. Ties therefore favor f1: callers pass the
incumbent (the tournament pivot) as f1.
"""

from dataclasses import dataclass
from typing import Any, Dict, Hashable, Optional, Sequence, Tuple

import numpy as np

from ..config import ComparisonConfig
from ..panel import SplitPanel
from .gapscan import (
    GapScanRow,
    LossDifferenceStream,
    loss_difference_stream,
    scan,
    scan_r2,
    second_moments,
)


@dataclass(frozen=True)
class DuelOutcome:
    winner: Hashable
    loser: Hashable
    chosen_window: int
    delta_hat_at_choice: float
    scan: Optional[Tuple[GapScanRow, ...]] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "winner": self.winner,
            "loser": self.loser,
            "chosen_window": self.chosen_window,
            "delta_hat_at_choice": self.delta_hat_at_choice,
        }
        if self.scan is not None:
            out["scan"] = [row.to_dict() for row in self.scan]
        return out


def choose_window(rows: Sequence[GapScanRow]) -> GapScanRow:
    """The row with the least score; the smallest ℓ among equal scores."""
    scores = np.array([row.score for row in rows])
    return rows[int(np.argmin(scores))]


def decide(
    rows: Sequence[GapScanRow],
    ids: Tuple[Hashable, Hashable] = (1, 2),
    keep_scan: bool = True,
) -> DuelOutcome:
    chosen = choose_window(rows)
    first, second = ids
    winner, loser = (first, second) if chosen.delta_hat <= 0 else (second, first)
    return DuelOutcome(
        winner=winner,
        loser=loser,
        chosen_window=chosen.ell,
        delta_hat_at_choice=chosen.delta_hat,
        scan=tuple(rows) if keep_scan else None,
    )


def duel_stream(
    stream: LossDifferenceStream,
    cfg: ComparisonConfig,
    ids: Tuple[Hashable, Hashable] = (1, 2),
    keep_scan: bool = True,
    n_candidates: int = 2,
) -> DuelOutcome:
    return decide(scan(stream, cfg.resolve(stream.t, n_candidates)), ids, keep_scan)


def duel_stream_r2(
    stream: LossDifferenceStream,
    moments: Sequence[float],
    cfg: ComparisonConfig,
    ids: Tuple[Hashable, Hashable] = (1, 2),
    keep_scan: bool = True,
    n_candidates: int = 2,
) -> DuelOutcome:
    return decide(scan_r2(stream, moments, cfg.resolve(stream.t, n_candidates)), ids, keep_scan)


def duel_mse(
    f1,
    f2,
    validation: SplitPanel,
    t: int,
    cfg: ComparisonConfig,
    ids: Tuple[Hashable, Hashable] = (1, 2),
    keep_scan: bool = True,
) -> DuelOutcome:
    """Compare two fitted models at period t in mean squared error."""
    return duel_stream(loss_difference_stream(f1, f2, validation, t), cfg, ids, keep_scan)


def duel_r2(
    f1,
    f2,
    validation: SplitPanel,
    t: int,
    cfg: ComparisonConfig,
    moments: Optional[Sequence[float]] = None,
    ids: Tuple[Hashable, Hashable] = (1, 2),
    keep_scan: bool = True,
) -> DuelOutcome:
    """Compare two fitted models at period t in R², with V_j from the validation side unless given."""
    if moments is None:
        moments = second_moments(validation, t)
    return duel_stream_r2(loss_difference_stream(f1, f2, validation, t), moments, cfg, ids, keep_scan)
