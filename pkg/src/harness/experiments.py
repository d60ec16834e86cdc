"""
Single-shot experiments shared by the CLI and the HTTP surface.
"""

from typing import Dict, Optional, Sequence, Tuple

from ..comparison import DuelOutcome, duel_mse, duel_r2
from ..config import DuelConfig
from ..exceptions import ConfigurationError
from ..logging_config import get_logger
from ..model_zoo import EstimatorManager, FittedModel, ModelSpec, fit_spec, training_window
from ..panel import SplitPanel, split
from ..selectors import measure_complexity
from .backtest import load_panel

logger = get_logger(__name__)


def fit_at(spec: ModelSpec, splits: SplitPanel, t: int, manager: Optional[EstimatorManager] = None) -> FittedModel:
    """Fit a specification for period t on the training side of its window; no window means all history."""
    w = training_window(spec.window_exponent, t)
    features, targets = splits.train_window(t - w, t - 1)
    return fit_spec(spec, features, targets, manager, fit_period=t, effective_window=w)


def run_duel(
    duel_config: DuelConfig, f1: Optional[str] = None, f2: Optional[str] = None
) -> Tuple[int, DuelOutcome]:
    """Duel two specifications at one period, keeping the full gap scan; returns the period and outcome."""
    first, second = f1 or duel_config.f1, f2 or duel_config.f2
    if not first or not second:
        raise ConfigurationError("A duel needs two model specifications (f1 and f2)")
    spec1, spec2 = ModelSpec.parse(first), ModelSpec.parse(second)

    panel, _, source = load_panel(duel_config.data)
    t = duel_config.t or panel.n_periods
    if not 2 <= t <= panel.n_periods + 1:
        raise ConfigurationError(f"Duel period must lie in 2..{panel.n_periods + 1}, got {t}")

    splits = split(panel.truncate(t - 1), duel_config.train_fraction, duel_config.seed)
    model1, model2 = fit_at(spec1, splits, t), fit_at(spec2, splits, t)
    cfg = duel_config.effective_comparison
    logger.info(f"Duel at t={t} on {source}: {spec1.label} vs {spec2.label} ({'R²' if duel_config.r2 else 'MSE'})")
    if duel_config.r2:
        return t, duel_r2(model1, model2, splits, t, cfg, keep_scan=True)
    return t, duel_mse(model1, model2, splits, t, cfg, keep_scan=True)


def complexity_table(lambdas: Sequence[int], trials: int, seed: int = 0) -> Dict[int, float]:
    """Mean tournament comparisons for each candidate count."""
    table = {int(n): measure_complexity(int(n), trials, seed) for n in lambdas}
    for n, mean in table.items():
        logger.info(f"Λ={n}: {mean:.3f} comparisons on average over {trials} trials")
    return table
