"""
Non-adaptive selectors.

Fixed-val(ℓ) picks the candidate with the least summed validation squared
error over periods (t-ℓ)∨1 .. t-1. Fixed-CV pools every observation of the
trailing window (36 periods by default), cross-validates the window-free
specifications on random observation folds and refits the winner on all
pooled data.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import GridConfig, SelectorSettings
from ..exceptions import EmptyDataError
from ..logging_config import LoggerMixin
from ..model_zoo import EstimatorManager, FittedModel, ModelSpec, fit_spec, specifications
from ..panel import SplitPanel, stack_batches
from ..seeding import FOLD_STREAM, derive_seed, substream
from .base_selector import BaseSelector, CandidateLosses, Selection, SelectionContext

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaselineChoice:
    """A baseline's decision and the loss table it minimized."""

    method: str
    chosen: int
    losses: Tuple[float, ...]
    labels: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "chosen": self.chosen,
            "losses": list(self.losses),
            "labels": list(self.labels),
        }


def _argmin_first(losses: Sequence[float]) -> int:
    return int(np.argmin(np.asarray(losses, dtype=np.float64)))


def fixed_val(
    candidates: Sequence[FittedModel],
    validation: SplitPanel,
    t: int,
    window: int,
    losses: Optional[CandidateLosses] = None,
) -> BaselineChoice:
    """Fixed-val(ℓ): least summed validation squared error over periods (t-ℓ)∨1 .. t-1."""
    if t < 2 or window < 1:
        raise EmptyDataError(f"Fixed-val needs t >= 2 and ℓ >= 1, got t={t}, ℓ={window}")
    losses = losses or CandidateLosses(list(candidates), validation, t)
    first = max(t - window, 1)
    table = tuple(losses.window_total(i, first) for i in range(len(candidates)))
    return BaselineChoice(
        method=f"Fixed-val({window})",
        chosen=_argmin_first(table),
        losses=table,
        labels=tuple(c.spec.label for c in candidates),
    )


def cv_window_data(splits: SplitPanel, t: int, window: int = 36) -> Tuple[np.ndarray, np.ndarray, int]:
    """All observations (both split sides) of periods max(t-window, 1) .. t-1."""
    first = max(t - window, 1)
    used = t - first
    if used < window:
        logger.info(f"Fixed-CV at t={t} uses {used} periods, fewer than the {window}-period window")
    batches = []
    for j in range(first, t):
        batches.append(splits.train[j - 1])
        batches.append(splits.validation[j - 1])
    features, targets = stack_batches(batches)
    return features, targets, used


def fold_assignment(n: int, folds: int, seed: int) -> List[np.ndarray]:
    """Random partition of 0..n-1 into near-equal folds."""
    permutation = substream(seed, FOLD_STREAM).permutation(n)
    return [np.sort(part) for part in np.array_split(permutation, folds)]


def cross_validation_losses(
    features: np.ndarray,
    targets: np.ndarray,
    specs: Sequence[ModelSpec],
    folds: int,
    seed: int,
    manager: Optional[EstimatorManager] = None,
    executor: Optional[Executor] = None,
) -> Tuple[float, ...]:
    """Mean held-out MSE across folds of every specification."""
    n = targets.shape[0]
    if n < folds:
        raise EmptyDataError(f"Fixed-CV needs at least {folds} observations, got {n}")
    parts = fold_assignment(n, folds, seed)
    manager = manager or EstimatorManager()

    def evaluate(spec: ModelSpec) -> float:
        fold_mse = []
        for held_out in parts:
            keep = np.ones(n, dtype=bool)
            keep[held_out] = False
            model = fit_spec(spec, features[keep], targets[keep], manager)
            residual = model.predict(features[held_out]) - targets[held_out]
            fold_mse.append(float(np.mean(residual**2)))
        return float(np.mean(fold_mse))

    if executor is None:
        return tuple(evaluate(spec) for spec in specs)
    return tuple(executor.map(evaluate, specs))


def fixed_cv(
    features: np.ndarray,
    targets: np.ndarray,
    grid: GridConfig,
    folds: int = 5,
    seed: int = 0,
    specs: Optional[Sequence[ModelSpec]] = None,
    executor: Optional[Executor] = None,
    **provenance,
) -> Tuple[BaselineChoice, FittedModel]:
    """Cross-validate window-free specifications and refit the winner on all given data."""
    specs = list(specs) if specs is not None else specifications(grid)
    manager = EstimatorManager(tol=grid.cd_tolerance, max_iter=grid.cd_max_iter)
    table = cross_validation_losses(features, targets, specs, folds, seed, manager, executor)
    chosen = _argmin_first(table)
    model = fit_spec(specs[chosen], features, targets, manager, **provenance)
    choice = BaselineChoice(
        method="Fixed-CV",
        chosen=chosen,
        losses=table,
        labels=tuple(s.label for s in specs),
    )
    return choice, model


class FixedValSelector(BaseSelector, LoggerMixin):
    """Least validation loss over a fixed trailing window."""

    def __init__(self, settings: SelectorSettings):
        super().__init__(settings, f"Least validation loss over the last {settings.window} periods")
        self.window = settings.window

    def select(self, context: SelectionContext) -> Selection:
        choice = fixed_val(context.candidates, context.splits, context.t, self.window, context.losses)
        model = context.candidates[choice.chosen]
        return Selection(
            selector=self.name,
            model=model,
            candidate_index=choice.chosen,
            trace=choice.to_dict() if context.retain_traces else None,
        )


class FixedCVSelector(BaseSelector, LoggerMixin):
    """K-fold cross-validation of specifications on a fixed trailing window, refit on all of it."""

    def __init__(self, settings: SelectorSettings):
        super().__init__(
            settings,
            f"{settings.folds}-fold CV over the last {settings.cv_window} periods, winner refit on all pooled data",
        )

    def select(self, context: SelectionContext) -> Selection:
        features, targets, used = cv_window_data(context.splits, context.t, self.settings.cv_window)
        choice, model = fixed_cv(
            features,
            targets,
            context.grid,
            folds=self.settings.folds,
            seed=derive_seed(context.seed, context.t),
            executor=context.executor,
            fit_period=context.t,
            effective_window=used,
        )
        self.logger.debug(f"{self.name} at t={context.t}: refit {model.spec.label} on {targets.shape[0]} observations")
        return Selection(
            selector=self.name,
            model=model,
            candidate_index=None,
            trace=choice.to_dict() if context.retain_traces else None,
            details={"cv_periods": used},
        )
