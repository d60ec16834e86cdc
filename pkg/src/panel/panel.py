"""
Period-indexed covariate/response panels and their CSV codec.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..exceptions import DataParseError, DimensionMismatchError, EmptyDataError, SchemaError

logger = logging.getLogger(__name__)


class CsvSchema(BaseModel):
    """Column roles of a panel CSV; every other column is a feature, in header order."""

    period_column: str = Field(default="period")
    target_column: str = Field(default="y")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Observation:
    """One covariate/response pair."""

    x: np.ndarray
    y: float


@dataclass(frozen=True, eq=False)
class PeriodBatch:
    """All observations of one period, stored as a (B, d) matrix and a length-B vector."""

    period: int
    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64).reshape(-1)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2 or features.shape[0] != targets.shape[0]:
            raise DimensionMismatchError(
                f"Period {self.period}: features {features.shape} do not align with targets {targets.shape}"
            )
        if targets.shape[0] < 1:
            raise EmptyDataError(f"Period {self.period} has no observations")
        if not (np.all(np.isfinite(features)) and np.all(np.isfinite(targets))):
            raise DataParseError(f"Period {self.period} contains non-finite values", {"period": self.period})
        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "targets", _frozen(targets))

    @property
    def size(self) -> int:
        return int(self.targets.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.features.shape[1])

    @property
    def observations(self) -> Tuple[Observation, ...]:
        return tuple(Observation(x=self.features[i], y=float(self.targets[i])) for i in range(self.size))

    def subset(self, indices: Sequence[int]) -> "PeriodBatch":
        idx = np.asarray(indices, dtype=np.int64)
        return PeriodBatch(self.period, self.features[idx], self.targets[idx])

    def with_targets(self, targets: np.ndarray) -> "PeriodBatch":
        return PeriodBatch(self.period, self.features, targets)


def stack_batches(batches: Sequence[PeriodBatch]) -> Tuple[np.ndarray, np.ndarray]:
    """Concatenate batches into one design matrix and response vector."""
    if not batches:
        raise EmptyDataError("No periods to stack")
    return (
        np.vstack([b.features for b in batches]),
        np.concatenate([b.targets for b in batches]),
    )


@dataclass(frozen=True, eq=False)
class Panel:
    """Periods 1..T of a shared covariate dimension d."""

    dimension: int
    periods: Tuple[PeriodBatch, ...]
    labels: Dict[int, str] = field(default_factory=dict)
    feature_names: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(self.periods))
        if not self.periods:
            raise EmptyDataError("A panel needs at least one period")
        for expected, batch in enumerate(self.periods, start=1):
            if batch.period != expected:
                raise SchemaError(
                    f"Period indices must be contiguous from 1; found {batch.period} at position {expected}"
                )
            if batch.dimension != self.dimension:
                raise DimensionMismatchError(
                    f"Period {batch.period} has dimension {batch.dimension}, panel has {self.dimension}"
                )
        if not self.feature_names:
            object.__setattr__(self, "feature_names", tuple(f"x{i + 1}" for i in range(self.dimension)))
        if len(self.feature_names) != self.dimension:
            raise SchemaError("feature_names must have one entry per covariate")
        object.__setattr__(self, "labels", dict(self.labels))

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    @property
    def n_observations(self) -> int:
        return sum(b.size for b in self.periods)

    def batch(self, t: int) -> PeriodBatch:
        if not 1 <= t <= self.n_periods:
            raise IndexError(f"Period {t} outside 1..{self.n_periods}")
        return self.periods[t - 1]

    def label(self, t: int) -> str:
        return self.labels.get(t, str(t))

    def __iter__(self) -> Iterator[PeriodBatch]:
        return iter(self.periods)

    def truncate(self, n_periods: int) -> "Panel":
        """Keep periods 1..n_periods."""
        return Panel(
            dimension=self.dimension,
            periods=self.periods[:n_periods],
            labels={t: v for t, v in self.labels.items() if t <= n_periods},
            feature_names=self.feature_names,
        )

    def replace_batch(self, batch: PeriodBatch) -> "Panel":
        periods = list(self.periods)
        periods[batch.period - 1] = batch
        return Panel(self.dimension, tuple(periods), self.labels, self.feature_names)

    @classmethod
    def from_arrays(
        cls,
        periods: Sequence[int],
        features: np.ndarray,
        targets: np.ndarray,
        labels: Optional[Dict[int, str]] = None,
        feature_names: Sequence[str] = (),
    ) -> "Panel":
        """Build a panel from ordinal period tags 1..T aligned with rows."""
        periods = np.asarray(periods, dtype=np.int64)
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        targets = np.asarray(targets, dtype=np.float64)
        batches = [
            PeriodBatch(int(t), features[periods == t], targets[periods == t])
            for t in np.unique(periods)
        ]
        return cls(features.shape[1], tuple(batches), labels or {}, tuple(feature_names))


def _parse_numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    values = pd.to_numeric(raw.str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        position = int(np.argmax(bad))
        # header is line 1, first data row is line 2
        row_number = position + 2
        raise DataParseError(
            f"Non-numeric or missing value {raw.iloc[position]!r} in column '{column}' at row {row_number}",
            {"row": row_number, "column": column},
        )
    return values


def _period_sort_key(values: List[str]):
    try:
        numeric = {v: float(v) for v in values}
    except ValueError:
        return lambda v: v
    if not all(math.isfinite(x) for x in numeric.values()):
        return lambda v: v
    return lambda v: numeric[v]


def load_csv(path: Union[str, Path], schema: Optional[CsvSchema] = None) -> Panel:
    """Read a UTF-8 comma-separated panel, re-indexing periods to 1..T in ascending order."""
    schema = schema or CsvSchema()
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError(f"Panel file '{path}' does not exist")
    except pd.errors.EmptyDataError:
        raise SchemaError(f"Panel file '{path}' has no header row")

    columns = list(frame.columns)
    for role, column in (("period", schema.period_column), ("target", schema.target_column)):
        if column not in columns:
            raise SchemaError(
                f"Missing {role} column '{column}' in '{path}'", {"columns": columns}
            )
    feature_columns = [c for c in columns if c not in (schema.period_column, schema.target_column)]
    if not feature_columns:
        raise SchemaError(f"No feature columns in '{path}'")
    if frame.empty:
        raise EmptyDataError("no data rows")

    period_raw = frame[schema.period_column].str.strip()
    if (period_raw == "").any():
        row_number = int(np.argmax((period_raw == "").to_numpy())) + 2
        raise DataParseError(f"Missing period value at row {row_number}", {"row": row_number})
    targets = _parse_numeric(frame, schema.target_column)
    features = np.column_stack([_parse_numeric(frame, c) for c in feature_columns])

    distinct = list(dict.fromkeys(period_raw.tolist()))
    ordered = sorted(distinct, key=_period_sort_key(distinct))
    ordinal = {value: t for t, value in enumerate(ordered, start=1)}
    periods = period_raw.map(ordinal).to_numpy(dtype=np.int64)

    panel = Panel.from_arrays(
        periods,
        features,
        targets,
        labels={t: value for value, t in ordinal.items()},
        feature_names=feature_columns,
    )
    logger.info(
        f"Loaded panel from {path}: T={panel.n_periods}, d={panel.dimension}, "
        f"{panel.n_observations} observations"
    )
    return panel


def panel_frame(panel: Panel, schema: Optional[CsvSchema] = None) -> pd.DataFrame:
    """Long-format frame: one row per observation, period label first and response last."""
    schema = schema or CsvSchema()
    records = []
    for batch in panel:
        frame = pd.DataFrame(batch.features, columns=list(panel.feature_names))
        frame.insert(0, schema.period_column, panel.label(batch.period))
        frame[schema.target_column] = batch.targets
        records.append(frame)
    return pd.concat(records, ignore_index=True)


def save_csv(panel: Panel, path: Union[str, Path], schema: Optional[CsvSchema] = None) -> None:
    """Write a panel so that load_csv reproduces it; floats use shortest round-trip repr."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    panel_frame(panel, schema).to_csv(path, index=False, encoding="utf-8")
