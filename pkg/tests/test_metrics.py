import numpy as np
import pytest

from src.config import RegimeSpec
from src.exceptions import ConfigurationError, DegenerateMetricError, DimensionMismatchError, InvalidReturnError
from src.metrics import (
    PredictionLog,
    RegimeWindow,
    annual_r2,
    average_excess_ratio,
    excess_ratio,
    final_wealth,
    r2,
    r2_standard,
    r2_zero,
    resolve_regimes,
    wealth_curve,
    year_keys,
    year_month_key,
)
from src.models import R2Metric


def log_of(predictions, targets, periods=None):
    periods = periods if periods is not None else list(range(1, len(targets) + 1))
    return PredictionLog("test", periods, predictions, targets)


class TestR2:
    def test_zero_benchmark_example(self):
        assert r2_zero(log_of([1.0, 1.0], [1.0, 2.0])) == pytest.approx(0.8)

    def test_mean_benchmark_example(self):
        assert r2_standard(log_of([1.0, 1.0], [1.0, 2.0])) == pytest.approx(-1.0)

    def test_perfect_forecast(self):
        log = log_of([0.3, -0.2, 0.5], [0.3, -0.2, 0.5])
        assert r2(log, metric=R2Metric.ZERO) == 1.0
        assert r2(log, metric=R2Metric.STANDARD) == 1.0

    def test_permutation_invariant(self, rng):
        predictions, targets = rng.normal(size=20), rng.normal(size=20)
        order = rng.permutation(20)
        assert r2_zero(log_of(predictions, targets)) == pytest.approx(
            r2_zero(log_of(predictions[order], targets[order])), rel=1e-12
        )

    def test_degenerate_denominators(self):
        with pytest.raises(DegenerateMetricError):
            r2_zero(log_of([0.1, 0.2], [0.0, 0.0]))
        with pytest.raises(DegenerateMetricError):
            r2_standard(log_of([0.1, 0.2], [1.0, 1.0]))
        with pytest.raises(DegenerateMetricError):
            r2_standard(log_of([0.1], [1.0]))

    def test_window_restriction(self):
        log = log_of([1.0, 0.0, 1.0], [1.0, 5.0, 2.0], periods=[1, 2, 3])
        assert r2_zero(log, RegimeWindow("edge", 3, 3)) == pytest.approx(0.75)
        with pytest.raises(DegenerateMetricError):
            r2_zero(log, RegimeWindow("empty", 4, 9))

    def test_misaligned_log(self):
        with pytest.raises(DimensionMismatchError):
            PredictionLog("bad", [1, 2], [0.1], [0.2, 0.3])


class TestAnnual:
    def test_calendar_labels_group_by_year(self):
        labels = {1: "1999-11", 2: "1999-12", 3: "2000-01"}
        assert year_keys([1, 2, 3], labels) == {1: "1999", 2: "1999", 3: "2000"}

    def test_ordinal_periods_group_in_blocks_of_twelve(self):
        keys = year_keys([1, 12, 13, 25], {})
        assert keys == {1: "1", 12: "1", 13: "2", 25: "3"}

    def test_degenerate_year_is_undefined(self):
        labels = {1: "2001-01", 2: "2002-01"}
        log = log_of([0.5, 1.0], [0.0, 2.0], periods=[1, 2])
        assert annual_r2(log, labels) == {"2001": None, "2002": pytest.approx(0.75)}

    def test_year_month_key(self):
        assert year_month_key("2007-11") == 200711
        assert year_month_key("2007") is None
        assert year_month_key("period 4") is None


class TestWealth:
    def test_two_period_example(self):
        log = log_of([1.0, 1.0], [0.1, -0.1])
        assert final_wealth(log) == pytest.approx(0.99)

    def test_short_position_and_flat_forecast(self):
        periods, wealth = wealth_curve(log_of([-1.0, 0.0, 2.0], [-0.5, 0.7, 0.1]))
        np.testing.assert_array_equal(periods, [1, 2, 3])
        np.testing.assert_allclose(wealth, [1.5, 1.5, 1.65])

    def test_observations_of_a_period_compound_together(self):
        _, wealth = wealth_curve(log_of([1.0, 1.0, 1.0], [0.1, 0.1, 0.2], periods=[1, 1, 2]))
        np.testing.assert_allclose(wealth, [1.21, 1.452])

    def test_bankruptcy_is_reported(self):
        with pytest.raises(InvalidReturnError, match="bankruptcy/invalid return"):
            wealth_curve(log_of([1.0, 1.0], [0.1, -1.0]))

    def test_excess_ratio(self):
        assert excess_ratio(2.0, 1.0) == 1.0
        assert excess_ratio(1.0, 1.0) == 0.0
        with pytest.raises(InvalidReturnError):
            excess_ratio(1.0, 0.0)

    def test_average_excess_ratio(self):
        assert average_excess_ratio([0.1, 0.3]) == pytest.approx(0.2)
        with pytest.raises(InvalidReturnError):
            average_excess_ratio([])


class TestRegimes:
    def test_ordinal_regime_is_clipped_to_the_evaluation_span(self):
        windows = resolve_regimes([RegimeSpec(label="late", start=8, end=40)], {}, range(3, 21), use_nber=False)
        assert windows == [RegimeWindow("late", 8, 20)]

    def test_nber_presets_follow_calendar_labels(self):
        labels = {t: f"{1990 + (t - 1) // 12}-{(t - 1) % 12 + 1:02d}" for t in range(1, 37)}
        windows = resolve_regimes([], labels, range(2, 37))
        assert windows == [RegimeWindow("Gulf War", 6, 10)]

    def test_regime_outside_the_span_is_dropped(self):
        assert resolve_regimes([RegimeSpec(label="early", start=1, end=2)], {}, range(3, 10), use_nber=False) == []

    def test_reversed_window_is_a_configuration_error(self):
        with pytest.raises(ConfigurationError) as excinfo:
            RegimeWindow("backwards", 5, 2)
        assert not isinstance(excinfo.value, DegenerateMetricError)
        assert "backwards" in excinfo.value.message
