from .r2 import (
    PredictionLog,
    RegimeWindow,
    annual_r2,
    mean_defined,
    r2,
    r2_standard,
    r2_zero,
    year_keys,
    year_month_key,
)
from .regimes import NBER_REGIMES, resolve_regime, resolve_regimes
from .wealth import average_excess_ratio, excess_ratio, final_wealth, wealth_curve

__all__ = [
    "NBER_REGIMES",
    "PredictionLog",
    "RegimeWindow",
    "annual_r2",
    "average_excess_ratio",
    "excess_ratio",
    "final_wealth",
    "mean_defined",
    "r2",
    "r2_standard",
    "r2_zero",
    "resolve_regime",
    "resolve_regimes",
    "wealth_curve",
    "year_keys",
    "year_month_key",
]
