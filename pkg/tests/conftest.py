import logging
from typing import List, Optional, Sequence

import numpy as np
import pytest

from src.config import DataSource, GridConfig, RunConfig, SelectorSettings, SynthSource
from src.model_zoo import LinearModel, ModelSpec
from src.models import EnvKind, ModelFamily, SelectorKind
from src.panel import PeriodBatch, SplitPanel
from src.synth import DriftEnv, generate


@pytest.fixture(autouse=True)
def restore_root_logger():
    """setup_logging (CLI, app lifespan) replaces root handlers; put them back after each test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def linear_model(theta: Sequence[float], **provenance) -> LinearModel:
    return LinearModel(ModelSpec(family=ModelFamily.RIDGE, alpha=1.0), np.asarray(theta, dtype=float), **provenance)


def validation_panel(batches: List[PeriodBatch]) -> SplitPanel:
    """A SplitPanel whose train and validation sides are the same hand-built batches."""
    return SplitPanel(train=tuple(batches), validation=tuple(batches), seed=0, train_fraction=0.5)


def small_grid(**overrides) -> GridConfig:
    settings = dict(
        ridge_alphas=[0.01, 1.0],
        lasso_alphas=[0.01],
        enet_alphas=[1.0],
        enet_l1_ratios=[0.05],
        forest_n_trees=[3],
        forest_max_depths=[2],
        window_exponents=[0, 1, 2],
    )
    settings.update(overrides)
    return GridConfig(**settings)


def ridge_only_grid(alphas=(1.0,), windows=(0, 1, 2)) -> GridConfig:
    return GridConfig(
        ridge_alphas=list(alphas),
        lasso_alphas=[],
        enet_alphas=[],
        enet_l1_ratios=[],
        forest_n_trees=[],
        forest_max_depths=[],
        window_exponents=list(windows),
    )


def synth_run_config(
    env: DriftEnv,
    periods: int,
    grid: Optional[GridConfig] = None,
    selectors: Optional[List[SelectorSettings]] = None,
    **overrides,
) -> RunConfig:
    settings = dict(
        data=DataSource(synth=SynthSource(env=env, periods=periods)),
        seeds=[0, 1],
        grid=grid or small_grid(),
        selectors=selectors or default_test_selectors(),
        threads=1,
        use_nber_regimes=False,
        true_risk_samples=200,
    )
    settings.update(overrides)
    return RunConfig(**settings)


def default_test_selectors() -> List[SelectorSettings]:
    return [
        SelectorSettings(kind=SelectorKind.ATOMS_MSE),
        SelectorSettings(kind=SelectorKind.ATOMS_R2),
        SelectorSettings(kind=SelectorKind.FIXED_VAL, window=3),
        SelectorSettings(kind=SelectorKind.FIXED_CV, cv_window=4, folds=3),
    ]


@pytest.fixture
def drift_env() -> DriftEnv:
    return DriftEnv(
        kind=EnvKind.ZIGZAG_LINEAR_SINE,
        eta=0.1,
        gamma=0.3,
        noise_sd=0.5,
        samples_per_period=10,
        seed=11,
    )


@pytest.fixture
def small_panel(drift_env):
    return generate(drift_env, 12)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
