"""
Sign-trading wealth and Excess Ratio.
"""

from typing import Sequence, Tuple

import numpy as np

from ..exceptions import InvalidReturnError
from .r2 import PredictionLog


def wealth_curve(log: PredictionLog) -> Tuple[np.ndarray, np.ndarray]:
    """Periods and cumulative wealth W_t = W_{t-1}·Π_i(1 + y_{t,i}·sign(ŷ_{t,i})), W_0 = 1.

    sign(0) = 0, so a zero forecast keeps the position flat.
    """
    factors = 1.0 + log.targets * np.sign(log.predictions)
    bad = factors <= 0.0
    if bad.any():
        i = int(np.argmax(bad))
        raise InvalidReturnError(
            f"bankruptcy/invalid return: factor {factors[i]:.6g} at period {int(log.periods[i])}",
            {"period": int(log.periods[i]), "return": float(log.targets[i])},
        )
    periods = log.distinct_periods()
    growth = np.array([np.prod(factors[log.periods == t]) for t in periods])
    return periods, np.cumprod(growth)


def final_wealth(log: PredictionLog) -> float:
    _, wealth = wealth_curve(log)
    return float(wealth[-1]) if wealth.size else 1.0


def excess_ratio(w_atoms: float, w_baseline: float) -> float:
    """W_atoms / W_baseline - 1."""
    if not w_baseline > 0:
        raise InvalidReturnError(f"Baseline wealth must be positive, got {w_baseline}")
    return w_atoms / w_baseline - 1.0


def average_excess_ratio(ratios: Sequence[float]) -> float:
    """Equal-weight average of per-asset Excess Ratios."""
    if len(ratios) == 0:
        raise InvalidReturnError("No Excess Ratios to average")
    return float(np.mean(ratios))
