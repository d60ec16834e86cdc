"""
Out-of-sample R² against the zero forecast and against the window mean.
"""

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np

from ..exceptions import ConfigurationError, DegenerateMetricError, DimensionMismatchError
from ..models import R2Metric

_YEAR_LABEL = re.compile(r"^(\d{4})(?:[-/]?(\d{1,2}))?(?:[-/]?\d{1,2})?$")
YEAR_BLOCK = 12


@dataclass(frozen=True)
class RegimeWindow:
    """An evaluation window of ordinal periods, both ends inclusive."""

    label: str
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ConfigurationError(f"Regime '{self.label}' starts after it ends ({self.start} > {self.end})")


@dataclass(frozen=True, eq=False)
class PredictionLog:
    """Aligned per-observation predictions and realized responses of one algorithm."""

    tag: str
    periods: np.ndarray
    predictions: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        periods = np.asarray(self.periods, dtype=np.int64).reshape(-1)
        predictions = np.asarray(self.predictions, dtype=np.float64).reshape(-1)
        targets = np.asarray(self.targets, dtype=np.float64).reshape(-1)
        if not periods.shape == predictions.shape == targets.shape:
            raise DimensionMismatchError(
                f"Prediction log '{self.tag}' has misaligned lengths "
                f"{periods.shape[0]}/{predictions.shape[0]}/{targets.shape[0]}"
            )
        if not (np.all(np.isfinite(predictions)) and np.all(np.isfinite(targets))):
            raise DegenerateMetricError(f"Prediction log '{self.tag}' holds non-finite values")
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "predictions", predictions)
        object.__setattr__(self, "targets", targets)

    @property
    def size(self) -> int:
        return int(self.targets.shape[0])

    def distinct_periods(self) -> np.ndarray:
        return np.unique(self.periods)

    def restrict(self, window: Optional[RegimeWindow]) -> "PredictionLog":
        if window is None:
            return self
        mask = (self.periods >= window.start) & (self.periods <= window.end)
        return self.select(mask)

    def select(self, mask: np.ndarray) -> "PredictionLog":
        return PredictionLog(self.tag, self.periods[mask], self.predictions[mask], self.targets[mask])


def _window_arrays(log: PredictionLog, window: Optional[RegimeWindow]):
    sub = log.restrict(window)
    if sub.size == 0:
        name = window.label if window is not None else log.tag
        raise DegenerateMetricError(f"Window '{name}' holds no observations")
    return sub.predictions, sub.targets


def r2_zero(log: PredictionLog, window: Optional[RegimeWindow] = None) -> float:
    """1 - Σ(ŷ - y)² / Σy²."""
    predictions, targets = _window_arrays(log, window)
    denominator = float(np.sum(targets**2))
    if denominator == 0.0:
        raise DegenerateMetricError("degenerate denominator: Σy² = 0")
    return 1.0 - float(np.sum((predictions - targets) ** 2)) / denominator


def r2_standard(log: PredictionLog, window: Optional[RegimeWindow] = None) -> float:
    """1 - Σ(ŷ - y)² / Σ(y - ȳ)²."""
    predictions, targets = _window_arrays(log, window)
    if targets.shape[0] < 2:
        raise DegenerateMetricError("degenerate denominator: fewer than two observations")
    denominator = float(np.sum((targets - targets.mean()) ** 2))
    if denominator == 0.0:
        raise DegenerateMetricError("degenerate denominator: zero variance")
    return 1.0 - float(np.sum((predictions - targets) ** 2)) / denominator


def r2(log: PredictionLog, window: Optional[RegimeWindow] = None, metric: R2Metric = R2Metric.ZERO) -> float:
    return r2_zero(log, window) if metric == R2Metric.ZERO else r2_standard(log, window)


def year_keys(periods: Iterable[int], labels: Mapping[int, str]) -> Dict[int, str]:
    """Calendar year of each period from its label, or 12-period ordinal blocks when labels are not dates."""
    periods = [int(t) for t in periods]
    matches = {t: _YEAR_LABEL.match(labels.get(t, "")) for t in periods}
    if periods and all(m is not None for m in matches.values()):
        return {t: matches[t].group(1) for t in periods}
    return {t: str((t - 1) // YEAR_BLOCK + 1) for t in periods}


def annual_r2(
    log: PredictionLog,
    labels: Mapping[int, str],
    metric: R2Metric = R2Metric.ZERO,
) -> Dict[str, Optional[float]]:
    """Per-year R²; years with a degenerate denominator map to None."""
    keys = year_keys(log.distinct_periods(), labels)
    observation_years = np.array([keys[int(t)] for t in log.periods])
    table: Dict[str, Optional[float]] = {}
    for year in sorted(set(keys.values()), key=_year_order):
        try:
            table[year] = r2(log.select(observation_years == year), None, metric)
        except DegenerateMetricError:
            table[year] = None
    return table


def _year_order(key: str):
    return int(key) if key.isdigit() else key


def year_month_key(label: str) -> Optional[int]:
    """YYYYMM integer of a date-like label, or None."""
    match = _YEAR_LABEL.match(label or "")
    if match is None or match.group(2) is None:
        return None
    return int(match.group(1)) * 100 + int(match.group(2))


def mean_defined(values: List[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None
