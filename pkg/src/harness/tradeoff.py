"""
Window length against model complexity.

Three fixed models are refit every period on a seeded training subsample of
each earlier period: ridge on the recent window, a forest on the recent window
and the same forest on all history. Annual zero-benchmark R² is averaged over
seeds; across several panels, each year counts the panels in which each model
has the highest annual R².
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..config import TradeoffConfig
from ..exceptions import BacktestError, ReportError
from ..logging_config import get_logger
from ..metrics import PredictionLog, annual_r2, mean_defined
from ..model_zoo import ModelSpec, fit_spec
from ..models import ModelFamily, R2Metric
from ..panel import Panel, split
from .reporting import write_json

logger = get_logger(__name__)


def tradeoff_models(config: TradeoffConfig) -> Dict[str, tuple]:
    """Model name -> (specification, window in periods or None for all history)."""
    forest = ModelSpec(
        family=ModelFamily.RANDOM_FOREST,
        n_tree=config.forest_n_tree,
        max_depth=config.forest_max_depth,
        seed=config.forest_seed,
    )
    return {
        f"ridge(alpha={config.ridge_alpha:g})[{config.recent_window}]": (
            ModelSpec(family=ModelFamily.RIDGE, alpha=config.ridge_alpha),
            config.recent_window,
        ),
        f"forest[{config.recent_window}]": (forest, config.recent_window),
        "forest[all]": (forest, None),
    }


@dataclass
class TradeoffReport:
    models: List[str]
    annual: Dict[str, Dict[str, Dict[str, Optional[float]]]]
    dominance: Dict[str, Dict[str, int]]

    def to_dict(self) -> Dict[str, Any]:
        return {"models": self.models, "annual": self.annual, "dominance": self.dominance}


def _panel_logs(panel: Panel, config: TradeoffConfig, seed: int) -> Dict[str, PredictionLog]:
    models = tradeoff_models(config)
    splits = split(panel, config.train_fraction, seed)
    predictions: Dict[str, List[np.ndarray]] = {name: [] for name in models}
    periods, targets = [], []
    for t in range(config.warmup + 1, panel.n_periods + 1):
        batch = panel.batch(t)
        for name, (spec, window) in models.items():
            w = t - 1 if window is None else min(window, t - 1)
            features, y = splits.train_window(t - w, t - 1)
            model = fit_spec(spec, features, y, fit_period=t, effective_window=w)
            predictions[name].append(model.predict(batch.features))
        periods.append(np.full(batch.size, t))
        targets.append(batch.targets)
    all_periods, all_targets = np.concatenate(periods), np.concatenate(targets)
    return {
        name: PredictionLog(name, all_periods, np.concatenate(p), all_targets)
        for name, p in predictions.items()
    }


def run_tradeoff(panels: Dict[str, Panel], config: Optional[TradeoffConfig] = None) -> TradeoffReport:
    """Seed-averaged annual R² of the three fixed models on every panel, plus dominance counts."""
    config = config or TradeoffConfig()
    if not panels:
        raise BacktestError("The tradeoff experiment needs at least one panel")
    names = list(tradeoff_models(config))
    annual: Dict[str, Dict[str, Dict[str, Optional[float]]]] = {}
    for panel_name, panel in panels.items():
        if panel.n_periods <= config.warmup:
            raise BacktestError(f"Panel '{panel_name}' is shorter than the warmup")
        per_seed = []
        for seed in config.seeds:
            logs = _panel_logs(panel, config, seed)
            per_seed.append({name: annual_r2(logs[name], panel.labels, R2Metric.ZERO) for name in names})
            logger.debug(f"Tradeoff on {panel_name}: seed {seed} done")
        years = list(per_seed[0][names[0]].keys())
        annual[panel_name] = {
            name: {year: mean_defined([run[name][year] for run in per_seed]) for year in years}
            for name in names
        }
        logger.info(f"Tradeoff on {panel_name}: {len(years)} years, {len(config.seeds)} seeds")

    dominance: Dict[str, Dict[str, int]] = {}
    for table in annual.values():
        for year in table[names[0]]:
            scores = {name: table[name][year] for name in names if table[name][year] is not None}
            if not scores:
                continue
            best = max(scores, key=lambda name: (scores[name], -names.index(name)))
            counts = dominance.setdefault(year, {name: 0 for name in names})
            counts[best] += 1
    return TradeoffReport(models=names, annual=annual, dominance=dominance)


def emit_tradeoff(report: TradeoffReport, outdir: Union[str, Path]) -> List[str]:
    outdir = Path(outdir)
    rows = [
        {"panel": panel, "model": model, "year": year, "r2_zero": value}
        for panel, table in report.annual.items()
        for model, years in table.items()
        for year, value in years.items()
    ]
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        write_json(report.to_dict(), outdir / "tradeoff.json")
        pd.DataFrame(rows, columns=["panel", "model", "year", "r2_zero"]).to_csv(
            outdir / "tradeoff_annual.csv", index=False
        )
    except OSError as e:
        raise ReportError(f"Cannot write tradeoff report to '{outdir}': {e}")
    return ["tradeoff.json", "tradeoff_annual.csv"]
