import logging

import numpy as np
import pytest

from src.config import SelectorSettings
from src.exceptions import EmptyDataError
from src.model_zoo import ModelSpec, build_candidate_grid, fit_ridge
from src.models import ModelFamily, SelectorKind
from src.panel import PeriodBatch, split
from src.selectors import (
    FixedCVSelector,
    FixedValSelector,
    SelectionContext,
    cross_validation_losses,
    cv_window_data,
    fixed_cv,
    fixed_val,
    fold_assignment,
)
from tests.conftest import linear_model, ridge_only_grid, small_grid, validation_panel


def zero_target_panel(periods=3):
    return validation_panel([PeriodBatch(j, [[0.0]], [0.0]) for j in range(1, periods + 1)])


class TestFixedVal:
    def test_hand_computed_losses(self):
        candidates = [linear_model([0.0, 0.5]), linear_model([0.0, 0.1])]
        choice = fixed_val(candidates, zero_target_panel(), t=3, window=2)

        assert choice.chosen == 1
        assert choice.losses == pytest.approx((0.5, 0.02))
        assert choice.method == "Fixed-val(2)"

    def test_zero_error_candidate_wins(self):
        candidates = [linear_model([0.0, 0.3]), linear_model([0.0, 0.0]), linear_model([1.0, -0.2])]
        assert fixed_val(candidates, zero_target_panel(), t=4, window=3).chosen == 1

    def test_first_index_wins_ties(self):
        candidates = [linear_model([0.0, 0.2]), linear_model([0.0, -0.2])]
        assert fixed_val(candidates, zero_target_panel(), t=4, window=3).chosen == 0

    def test_long_window_is_clamped_to_history(self, small_panel):
        splits = split(small_panel, 0.8, seed=0)
        candidates = build_candidate_grid(4, splits, small_grid())
        clamped = fixed_val(candidates, splits, t=4, window=50)
        exact = fixed_val(candidates, splits, t=4, window=3)
        assert clamped.losses == exact.losses

    def test_table_matches_direct_sum(self, small_panel):
        splits = split(small_panel, 0.8, seed=4)
        candidates = build_candidate_grid(9, splits, small_grid())
        choice = fixed_val(candidates, splits, t=9, window=4)

        for model, loss in zip(candidates, choice.losses):
            direct = 0.0
            for j in range(5, 9):
                batch = splits.validation[j - 1]
                direct += float(np.sum((model.predict(batch.features) - batch.targets) ** 2))
            assert loss == pytest.approx(direct, rel=1e-12)
        assert choice.chosen == int(np.argmin(choice.losses))

    def test_needs_history(self):
        with pytest.raises(EmptyDataError):
            fixed_val([linear_model([0.0, 0.0])], zero_target_panel(), t=1, window=2)


class TestFixedCV:
    def test_folds_partition_the_observations(self):
        parts = fold_assignment(23, 5, seed=3)
        assert len(parts) == 5
        assert sorted(np.concatenate(parts).tolist()) == list(range(23))
        assert {len(p) for p in parts} <= {4, 5}
        assert all(np.array_equal(a, b) for a, b in zip(parts, fold_assignment(23, 5, seed=3)))

    def test_losses_match_a_direct_loop(self, rng):
        features = rng.normal(size=(30, 2))
        targets = features @ np.array([1.0, -1.0]) + rng.normal(scale=0.3, size=30)
        specs = [ModelSpec(family=ModelFamily.RIDGE, alpha=a) for a in (0.01, 1.0)]
        table = cross_validation_losses(features, targets, specs, folds=3, seed=5)

        parts = fold_assignment(30, 3, seed=5)
        for spec, loss in zip(specs, table):
            fold_mse = []
            for held_out in parts:
                keep = np.setdiff1d(np.arange(30), held_out)
                model = fit_ridge(features[keep], targets[keep], spec.alpha)
                fold_mse.append(np.mean((model.predict(features[held_out]) - targets[held_out]) ** 2))
            assert loss == pytest.approx(np.mean(fold_mse), rel=1e-10)

    def test_single_specification_is_chosen(self, rng):
        features = rng.normal(size=(12, 1))
        targets = rng.normal(size=12)
        choice, model = fixed_cv(features, targets, ridge_only_grid(), folds=3, seed=0)
        assert choice.chosen == 0
        assert model.training_count == 12

    def test_too_few_observations(self, rng):
        with pytest.raises(EmptyDataError):
            cross_validation_losses(
                rng.normal(size=(3, 1)), rng.normal(size=3),
                [ModelSpec(family=ModelFamily.RIDGE, alpha=1.0)], folds=5, seed=0,
            )

    def test_window_pools_both_split_sides(self, small_panel, caplog):
        splits = split(small_panel, 0.8, seed=0)
        with caplog.at_level(logging.INFO, logger="src.selectors.baselines"):
            features, targets, used = cv_window_data(splits, t=5, window=36)

        assert used == 4
        assert targets.shape[0] == sum(small_panel.batch(j).size for j in range(1, 5))
        assert "fewer than the 36-period window" in caplog.text

    def test_full_window(self, small_panel):
        splits = split(small_panel, 0.8, seed=0)
        _, targets, used = cv_window_data(splits, t=10, window=3)
        assert used == 3
        assert targets.shape[0] == sum(small_panel.batch(j).size for j in range(7, 10))


class TestSelectors:
    def test_fixed_val_selector(self, small_panel):
        splits = split(small_panel, 0.8, seed=0)
        grid = small_grid()
        candidates = build_candidate_grid(7, splits, grid)
        context = SelectionContext(t=7, candidates=candidates, splits=splits, grid=grid, seed=0, retain_traces=True)

        selection = FixedValSelector(SelectorSettings(kind=SelectorKind.FIXED_VAL, window=3)).select(context)

        assert selection.selector == "Fixed-val(3)"
        assert selection.model is candidates[selection.candidate_index]
        assert selection.trace["chosen"] == selection.candidate_index

    def test_fixed_cv_selector_refits_on_pooled_window(self, small_panel):
        splits = split(small_panel, 0.8, seed=0)
        grid = small_grid()
        candidates = build_candidate_grid(7, splits, grid)
        context = SelectionContext(t=7, candidates=candidates, splits=splits, grid=grid, seed=0)

        selection = FixedCVSelector(SelectorSettings(kind=SelectorKind.FIXED_CV, cv_window=4, folds=3)).select(context)

        assert selection.candidate_index is None
        assert selection.model.fit_period == 7
        assert selection.model.spec.window_exponent is None
        assert selection.model.training_count == sum(small_panel.batch(j).size for j in range(3, 7))
        assert selection.details == {"cv_periods": 4}
