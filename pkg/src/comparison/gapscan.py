"""
Rolling-window performance-gap scans.

For two models and a decision period t, the validation loss differences
u = (f1(x) - y)² - (f2(x) - y)² of periods 1..t-1 are pooled over the last ℓ
periods for every ℓ. Each window gets an empirical-Bernstein width ψ̂ for its
stochastic error and a drift proxy φ̂ from its disagreement with every
shorter window:

    ψ̂ = 8M²                                                  if n = 1
    ψ̂ = v̂·sqrt(2 log(2/δ′)/n) + 64 M² log(2/δ′) / (3(n-1))  otherwise
    φ̂_ℓ = max_{i ≤ ℓ} (|Δ̂_ℓ - Δ̂_i| - (ψ̂_ℓ + ψ̂_i))₊

The R² variant divides Δ̂ and v̂ by the pooled second moment V_{t,ℓ} and
replaces M² by M²/v in ψ̂.
"""

import io
import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import ComparisonConfig
from ..exceptions import DimensionMismatchError, EmptyDataError
from ..panel import SplitPanel

logger = logging.getLogger(__name__)

ROW_COLUMNS = ("ell", "n", "delta_hat", "v_hat", "psi_hat", "phi_hat", "score")


@dataclass(frozen=True, eq=False)
class LossDifferenceStream:
    """Per-period validation loss differences for periods 1..t-1, newest last."""

    values: Tuple[np.ndarray, ...]

    def __post_init__(self):
        values = tuple(np.asarray(v, dtype=np.float64).reshape(-1) for v in self.values)
        if not values:
            raise EmptyDataError("A loss difference stream needs at least one period")
        for j, v in enumerate(values, start=1):
            if v.shape[0] < 1:
                raise EmptyDataError(f"Period {j} has no validation observations")
            if not np.all(np.isfinite(v)):
                raise EmptyDataError(f"Period {j} has non-finite loss differences")
        object.__setattr__(self, "values", values)

    @property
    def t(self) -> int:
        """The decision period the stream serves."""
        return len(self.values) + 1

    @property
    def counts(self) -> np.ndarray:
        return np.array([v.shape[0] for v in self.values], dtype=np.int64)

    def negated(self) -> "LossDifferenceStream":
        return LossDifferenceStream(tuple(-v for v in self.values))

    @classmethod
    def from_losses(cls, losses1: Sequence[np.ndarray], losses2: Sequence[np.ndarray]) -> "LossDifferenceStream":
        """Build from per-period squared errors of the two models."""
        if len(losses1) != len(losses2):
            raise DimensionMismatchError("Loss histories cover different numbers of periods")
        return cls(tuple(np.asarray(a) - np.asarray(b) for a, b in zip(losses1, losses2)))


@dataclass(frozen=True)
class GapScanRow:
    ell: int
    n: int
    delta_hat: float
    v_hat: Optional[float]
    psi_hat: float
    phi_hat: float
    score: float

    def to_dict(self) -> dict:
        return asdict(self)


def squared_errors(model, validation: SplitPanel, t: int) -> Tuple[np.ndarray, ...]:
    """Per-period validation squared errors of a model for periods 1..t-1."""
    out = []
    for j in range(1, t):
        batch = validation.validation_batch(j)
        out.append((model.predict(batch.features) - batch.targets) ** 2)
    return tuple(out)


def loss_difference_stream(f1, f2, validation: SplitPanel, t: int) -> LossDifferenceStream:
    """u_{j,i} = (f1(x) - y)² - (f2(x) - y)² over validation observations of periods 1..t-1."""
    if t < 2:
        raise EmptyDataError(f"A loss difference stream needs t >= 2, got {t}")
    if f1.dimension != f2.dimension:
        raise DimensionMismatchError(
            f"Models disagree on covariate dimension: {f1.dimension} vs {f2.dimension}"
        )
    return LossDifferenceStream.from_losses(squared_errors(f1, validation, t), squared_errors(f2, validation, t))


def second_moments(validation: SplitPanel, t: int) -> np.ndarray:
    """V_j = (1/n_j) Σ y² over validation observations of periods 1..t-1."""
    return np.array(
        [float(np.mean(validation.validation_batch(j).targets ** 2)) for j in range(1, t)],
        dtype=np.float64,
    )


def _window_limit(stream: LossDifferenceStream, cfg: ComparisonConfig) -> int:
    history = len(stream.values)
    if cfg.max_lookback is not None and cfg.max_lookback < history:
        logger.debug(f"Gap scan at t={stream.t} capped at {cfg.max_lookback} of {history} windows")
        return cfg.max_lookback
    return history


def _window_sums(stream: LossDifferenceStream, limit: int):
    """Pooled count, sum and shifted sum of squares over the newest ℓ periods, ℓ = 1..limit."""
    recent = stream.values[::-1][:limit]
    shift = float(np.mean(np.concatenate(recent)))
    counts = np.cumsum([v.shape[0] for v in recent]).astype(np.float64)
    sums = np.cumsum([float(np.sum(v)) for v in recent])
    shifted = np.cumsum([float(np.sum(v - shift)) for v in recent])
    shifted_sq = np.cumsum([float(np.sum((v - shift) ** 2)) for v in recent])
    return counts, sums, shifted, shifted_sq


def _sample_std(counts: np.ndarray, shifted: np.ndarray, shifted_sq: np.ndarray) -> np.ndarray:
    """Pooled sample standard deviation with n-1 denominator; NaN where n = 1."""
    std = np.full(counts.shape, np.nan)
    many = counts > 1
    variance = (shifted_sq[many] - shifted[many] ** 2 / counts[many]) / (counts[many] - 1)
    std[many] = np.sqrt(np.maximum(variance, 0.0))
    return std


def _psi(counts: np.ndarray, std: np.ndarray, m_squared: float, delta_prime: float) -> np.ndarray:
    log_term = math.log(2.0 / delta_prime)
    psi = np.full(counts.shape, 8.0 * m_squared)
    many = counts > 1
    n = counts[many]
    psi[many] = std[many] * np.sqrt(2.0 * log_term / n) + 64.0 * m_squared * log_term / (3.0 * (n - 1))
    return psi


def _phi(delta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """φ̂_ℓ = max over i ≤ ℓ of (|Δ̂_ℓ - Δ̂_i| - (ψ̂_ℓ + ψ̂_i))₊."""
    gaps = np.abs(delta[:, None] - delta[None, :]) - (psi[:, None] + psi[None, :])
    gaps[np.triu_indices(delta.shape[0], k=1)] = -np.inf
    return np.maximum(gaps.max(axis=1), 0.0)


def _rows(counts, delta, std, psi) -> List[GapScanRow]:
    phi = _phi(delta, psi)
    return [
        GapScanRow(
            ell=ell,
            n=int(counts[ell - 1]),
            delta_hat=float(delta[ell - 1]),
            v_hat=None if np.isnan(std[ell - 1]) else float(std[ell - 1]),
            psi_hat=float(psi[ell - 1]),
            phi_hat=float(phi[ell - 1]),
            score=float(phi[ell - 1] + psi[ell - 1]),
        )
        for ell in range(1, counts.shape[0] + 1)
    ]


def scan(stream: LossDifferenceStream, cfg: ComparisonConfig) -> List[GapScanRow]:
    """Gap scan rows for ℓ = 1..min(t-1, max_lookback) in the MSE metric."""
    limit = _window_limit(stream, cfg)
    counts, sums, shifted, shifted_sq = _window_sums(stream, limit)
    delta = sums / counts
    std = _sample_std(counts, shifted, shifted_sq)
    psi = _psi(counts, std, cfg.m_squared, cfg.delta_prime)
    return _rows(counts, delta, std, psi)


def floor_second_moments(moments: Sequence[float], v_floor: float) -> np.ndarray:
    moments = np.asarray(moments, dtype=np.float64)
    low = moments < v_floor
    if low.any():
        logger.warning(
            f"{int(low.sum())} period second moment(s) below v_floor={v_floor:g} "
            f"(min {moments.min():.3g}); clamped to the floor"
        )
        moments = np.where(low, v_floor, moments)
    return moments


def scan_r2(stream: LossDifferenceStream, moments: Sequence[float], cfg: ComparisonConfig) -> List[GapScanRow]:
    """Gap scan rows in the R² metric: Δ̂ and v̂ scaled by the pooled second moment V_{t,ℓ}."""
    moments = floor_second_moments(moments, cfg.v_floor)
    if moments.shape[0] != len(stream.values):
        raise DimensionMismatchError(
            f"{moments.shape[0]} second moments for {len(stream.values)} history periods"
        )
    limit = _window_limit(stream, cfg)
    counts, sums, shifted, shifted_sq = _window_sums(stream, limit)
    period_counts = stream.counts[::-1][:limit].astype(np.float64)
    pooled = np.cumsum(period_counts * moments[::-1][:limit]) / counts
    delta = sums / counts / pooled
    std = _sample_std(counts, shifted, shifted_sq) / pooled
    psi = _psi(counts, std, cfg.m_squared / cfg.v_floor, cfg.delta_prime)
    return _rows(counts, delta, std, psi)


def rows_to_frame(rows: Sequence[GapScanRow]) -> pd.DataFrame:
    return pd.DataFrame([row.to_dict() for row in rows], columns=list(ROW_COLUMNS))


def rows_to_csv(rows: Sequence[GapScanRow], path=None) -> Optional[str]:
    """Serialize a scan table; returns the CSV text when no path is given."""
    frame = rows_to_frame(rows)
    if path is None:
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False)
        return buffer.getvalue()
    frame.to_csv(path, index=False)
    return None
