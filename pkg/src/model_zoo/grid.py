"""
Candidate grid construction: every family/hyperparameter specification crossed
with every training-window exponent k.
"""

import logging
from concurrent.futures import Executor
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import GridConfig
from ..exceptions import AtomsLabError, ModelFitError
from ..models import ModelFamily
from ..panel import SplitPanel
from .base_model import FittedModel, ModelSpec, training_window
from .estimator_manager import EstimatorManager

logger = logging.getLogger(__name__)


def specifications(grid: GridConfig) -> List[ModelSpec]:
    """Window-free specifications in grid order: ridge, lasso, elastic net, forest."""
    specs = [ModelSpec(family=ModelFamily.RIDGE, alpha=a) for a in grid.ridge_alphas]
    specs += [ModelSpec(family=ModelFamily.LASSO, alpha=a) for a in grid.lasso_alphas]
    specs += [
        ModelSpec(family=ModelFamily.ELASTIC_NET, alpha=a, l1_ratio=r)
        for a in grid.enet_alphas
        for r in grid.enet_l1_ratios
    ]
    specs += [
        ModelSpec(family=ModelFamily.RANDOM_FOREST, n_tree=n, max_depth=depth, seed=grid.forest_seed)
        for n in grid.forest_n_trees
        for depth in grid.forest_max_depths
    ]
    return specs


def candidate_specs(grid: GridConfig) -> List[ModelSpec]:
    """Specifications crossed with window exponents; k varies fastest."""
    return [spec.with_window(k) for spec in specifications(grid) for k in grid.window_exponents]


def grid_size(grid: GridConfig) -> int:
    return len(specifications(grid)) * len(grid.window_exponents)


def fit_spec(
    spec: ModelSpec,
    features: np.ndarray,
    targets: np.ndarray,
    manager: Optional[EstimatorManager] = None,
    **provenance,
) -> FittedModel:
    """Fit one specification, tagging any failure with the specification label."""
    manager = manager or EstimatorManager()
    try:
        return manager.fit(features, targets, spec, **provenance)
    except AtomsLabError as e:
        details = {**e.details, "spec": spec.label}
        raise type(e)(f"{spec.label}: {e.message}", details) from e
    except np.linalg.LinAlgError as e:
        raise ModelFitError(f"{spec.label}: {e}", {"spec": spec.label}) from e


def build_candidate_grid(
    t: int,
    splits: SplitPanel,
    grid: GridConfig,
    executor: Optional[Executor] = None,
    specs: Optional[List[ModelSpec]] = None,
) -> List[FittedModel]:
    """Fit every candidate for period t on the training side of periods t-w .. t-1, w = 4^k ∧ (t-1).

    The returned list follows ``candidate_specs(grid)`` order, so list index is
    the stable candidate identity used by the selectors.
    """
    if t < 2:
        raise ModelFitError(f"Candidates need at least one history period; got t={t}")
    if t - 1 > splits.n_periods:
        raise ModelFitError(f"Period {t} needs {t - 1} history periods, split has {splits.n_periods}")
    specs = specs if specs is not None else candidate_specs(grid)
    manager = EstimatorManager(tol=grid.cd_tolerance, max_iter=grid.cd_max_iter)

    windows: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
    for spec in specs:
        w = training_window(spec.window_exponent, t)
        if w not in windows:
            windows[w] = splits.train_window(t - w, t - 1)

    def fit_one(spec: ModelSpec) -> FittedModel:
        w = training_window(spec.window_exponent, t)
        features, targets = windows[w]
        return fit_spec(spec, features, targets, manager, fit_period=t, effective_window=w)

    if executor is None:
        candidates = [fit_one(spec) for spec in specs]
    else:
        candidates = list(executor.map(fit_one, specs))
    logger.debug(f"Fitted {len(candidates)} candidates for period {t}")
    return candidates
