import numpy as np
import pytest
from pydantic import ValidationError

from src.exceptions import EnvironmentSpecError
from src.models import EnvKind
from src.synth import (
    DriftEnv,
    coefficient_path,
    excess_risk,
    generate,
    optimal_predictor,
    regime_index,
    true_risk,
)
from tests.conftest import linear_model


def zigzag(eta, periods):
    path, c, direction = [], 0.0, 1.0
    for _ in range(periods):
        path.append(c)
        if c + direction * eta > 1 + 1e-9 or c + direction * eta < -1e-9:
            direction = -direction
        c += direction * eta
    return np.array(path)


class TestCoefficientPath:
    def test_zigzag_bounces_between_zero_and_one(self):
        env = DriftEnv(eta=0.1)
        path = coefficient_path(env, 25)

        np.testing.assert_allclose(path, zigzag(0.1, 25), atol=1e-9)
        assert path[0] == 0.0
        assert path[10] == pytest.approx(1.0)
        assert path[20] == pytest.approx(0.0)
        np.testing.assert_allclose(np.abs(np.diff(path)), 0.1, atol=1e-12)

    def test_zero_drift_is_constant(self):
        np.testing.assert_array_equal(coefficient_path(DriftEnv(eta=0.0), 10), np.zeros(10))

    def test_stationary_uses_initial_coefficient(self):
        env = DriftEnv(kind=EnvKind.STATIONARY, initial_coefficient=0.7)
        np.testing.assert_array_equal(coefficient_path(env, 4), np.full(4, 0.7))

    def test_step_above_one_rejected(self):
        with pytest.raises(EnvironmentSpecError):
            coefficient_path(DriftEnv(eta=1.5), 5)


class TestGenerate:
    def test_noise_free_responses_follow_the_coefficient(self):
        env = DriftEnv(eta=0.2, gamma=0.0, noise_sd=0.0, samples_per_period=5, seed=3)
        panel = generate(env, 8)
        path = coefficient_path(env, 8)
        for batch in panel:
            np.testing.assert_allclose(batch.targets, path[batch.period - 1] * batch.features[:, 0], atol=1e-12)

    def test_shorter_panel_is_a_prefix(self):
        env = DriftEnv(eta=0.05, gamma=0.3, samples_per_period=4, seed=21)
        short, long = generate(env, 5), generate(env, 10)
        for a, b in zip(short, long):
            np.testing.assert_array_equal(a.features, b.features)
            np.testing.assert_array_equal(a.targets, b.targets)

    def test_shape_and_seed_sensitivity(self):
        env = DriftEnv(samples_per_period=6, dimension=3, seed=1)
        panel = generate(env, 4)
        other = generate(env.model_copy(update={"seed": 2}), 4)

        assert (panel.n_periods, panel.dimension, panel.n_observations) == (4, 3, 24)
        assert np.all((panel.batch(1).features >= 0) & (panel.batch(1).features <= 1))
        assert not np.array_equal(panel.batch(1).targets, other.batch(1).targets)

    def test_piecewise_regimes(self):
        env = DriftEnv(
            kind=EnvKind.PIECEWISE_REGIME,
            change_points=[4, 7],
            regime_coefficients=[[0.0], [1.0], [-2.0]],
            noise_sd=0.0,
            samples_per_period=3,
        )
        assert [regime_index(env, t) for t in (1, 3, 4, 6, 7, 9)] == [0, 0, 1, 1, 2, 2]
        panel = generate(env, 9)
        np.testing.assert_allclose(panel.batch(5).targets, panel.batch(5).features[:, 0], atol=1e-12)
        np.testing.assert_allclose(panel.batch(8).targets, -2.0 * panel.batch(8).features[:, 0], atol=1e-12)

    @pytest.mark.parametrize(
        "settings",
        [
            {"change_points": [5, 3]},
            {"change_points": [1]},
            {"change_points": [3], "regime_coefficients": [[1.0]]},
        ],
    )
    def test_invalid_regimes(self, settings):
        with pytest.raises(ValidationError):
            DriftEnv(kind=EnvKind.PIECEWISE_REGIME, **settings)


class TestRisk:
    def test_optimal_predictor_has_no_excess_risk(self):
        env = DriftEnv(eta=0.1, gamma=0.3, noise_sd=0.0)
        best = optimal_predictor(env, 6)
        assert true_risk(env, 6, best, mc_samples=500) == 0.0
        assert excess_risk(env, 6, best, mc_samples=500) == 0.0

    def test_true_risk_of_the_optimum_is_the_noise_variance(self):
        env = DriftEnv(eta=0.1, gamma=0.3, noise_sd=1.0)
        risk = true_risk(env, 6, optimal_predictor(env, 6), mc_samples=20_000)
        assert risk == pytest.approx(1.0, abs=3 * np.sqrt(2 / 20_000))

    def test_zero_predictor_on_unit_slope(self):
        env = DriftEnv(kind=EnvKind.STATIONARY, initial_coefficient=1.0, noise_sd=0.0)
        risk = excess_risk(env, 3, linear_model([0.0, 0.0]), mc_samples=20_000)
        assert risk == pytest.approx(1.0 / 3.0, abs=0.01)

    def test_excess_risk_ignores_noise(self):
        quiet = DriftEnv(eta=0.1, noise_sd=0.0)
        loud = quiet.model_copy(update={"noise_sd": 3.0})
        model = linear_model([0.4, 0.1])
        assert excess_risk(quiet, 4, model, seed=2) == excess_risk(loud, 4, model, seed=2)

    def test_monte_carlo_size_checked(self):
        with pytest.raises(EnvironmentSpecError):
            true_risk(DriftEnv(), 2, linear_model([0.0, 0.0]), mc_samples=0)
