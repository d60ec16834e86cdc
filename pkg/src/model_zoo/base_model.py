"""
Model specifications, fitted predictors and the estimator interface.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..exceptions import ConfigurationError, DimensionMismatchError, ModelFitError
from ..models import ModelFamily

FAMILY_ALIASES = {
    "ridge": ModelFamily.RIDGE,
    "lasso": ModelFamily.LASSO,
    "enet": ModelFamily.ELASTIC_NET,
    "elastic_net": ModelFamily.ELASTIC_NET,
    "forest": ModelFamily.RANDOM_FOREST,
    "rf": ModelFamily.RANDOM_FOREST,
    "random_forest": ModelFamily.RANDOM_FOREST,
}

PARAMETER_ALIASES = {
    "alpha": "alpha",
    "r": "l1_ratio",
    "l1_ratio": "l1_ratio",
    "n": "n_tree",
    "n_tree": "n_tree",
    "depth": "max_depth",
    "max_depth": "max_depth",
    "seed": "seed",
    "k": "window_exponent",
}


class ModelSpec(BaseModel):
    """A family, its hyperparameters and an optional training-window exponent k (window 4^k ∧ (t-1))."""

    family: ModelFamily
    alpha: Optional[float] = Field(default=None, gt=0.0)
    l1_ratio: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    n_tree: Optional[int] = Field(default=None, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    window_exponent: Optional[int] = Field(default=None, ge=0)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_family_fields(self):
        if self.family in (ModelFamily.RIDGE, ModelFamily.LASSO, ModelFamily.ELASTIC_NET):
            if self.alpha is None or not np.isfinite(self.alpha):
                raise ValueError(f"{self.family.value} needs a finite alpha > 0")
        if self.family == ModelFamily.ELASTIC_NET and self.l1_ratio is None:
            raise ValueError("elastic_net needs l1_ratio in (0, 1)")
        if self.family == ModelFamily.RANDOM_FOREST and (self.n_tree is None or self.max_depth is None):
            raise ValueError("random_forest needs n_tree >= 1 and max_depth >= 1")
        return self

    @property
    def hyperparameters(self) -> Dict[str, Any]:
        if self.family == ModelFamily.RANDOM_FOREST:
            return {"n_tree": self.n_tree, "max_depth": self.max_depth, "seed": self.seed}
        if self.family == ModelFamily.ELASTIC_NET:
            return {"alpha": self.alpha, "l1_ratio": self.l1_ratio}
        return {"alpha": self.alpha}

    @property
    def specification_label(self) -> str:
        """Family and hyperparameters without the window."""
        params = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.hyperparameters.items())
        return f"{self.family.value}({params})"

    @property
    def label(self) -> str:
        if self.window_exponent is None:
            return self.specification_label
        return f"{self.specification_label}[k={self.window_exponent}]"

    def with_window(self, window_exponent: Optional[int]) -> "ModelSpec":
        return self.model_copy(update={"window_exponent": window_exponent})

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        """Parse a command-line specification such as ``ridge:alpha=1,k=2`` or ``forest:n=10,depth=5``."""
        family_name, _, params = text.strip().partition(":")
        family = FAMILY_ALIASES.get(family_name.strip().lower())
        if family is None:
            raise ConfigurationError(
                f"Unknown model family '{family_name}'", {"known": sorted(FAMILY_ALIASES)}
            )
        fields: Dict[str, Any] = {"family": family}
        for item in filter(None, (p.strip() for p in params.split(","))):
            key, sep, value = item.partition("=")
            field = PARAMETER_ALIASES.get(key.strip().lower())
            if not sep or field is None:
                raise ConfigurationError(f"Cannot parse '{item}' in model specification '{text}'")
            fields[field] = value.strip()
        try:
            return cls.model_validate(fields)
        except ValidationError as e:
            raise ConfigurationError(
                f"Invalid model specification '{text}'", {"errors": e.errors(include_url=False, include_context=False)}
            )


def effective_window(window_exponent: int, t: int) -> int:
    """4^k ∧ (t-1)."""
    return min(4**window_exponent, t - 1)


def training_window(window_exponent: Optional[int], t: int) -> int:
    """Periods a specification trains on at period t; no exponent means all t-1 history periods."""
    return t - 1 if window_exponent is None else effective_window(window_exponent, t)


class FittedModel(ABC):
    """A trained predictor together with the provenance of its training data."""

    def __init__(
        self,
        spec: ModelSpec,
        dimension: int,
        fit_period: Optional[int] = None,
        effective_window: Optional[int] = None,
        training_count: int = 0,
    ):
        self.spec = spec
        self.dimension = dimension
        self.fit_period = fit_period
        self.effective_window = effective_window
        self.training_count = training_count

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(1, -1) if features.shape[0] == self.dimension else features.reshape(-1, 1)
        if features.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"{self.spec.label} expects {self.dimension} covariates, got {features.shape[1]}"
            )
        return self._predict(features)

    @abstractmethod
    def _predict(self, features: np.ndarray) -> np.ndarray:
        pass

    def describe(self) -> Dict[str, Any]:
        return {
            "family": self.spec.family.value,
            "hyperparameters": self.spec.hyperparameters,
            "window_exponent": self.spec.window_exponent,
            "effective_window": self.effective_window,
            "fit_period": self.fit_period,
            "training_count": self.training_count,
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec.label}, t={self.fit_period}, n={self.training_count})"


def validate_training_data(features: np.ndarray, targets: np.ndarray) -> tuple:
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if features.ndim == 1:
        features = features.reshape(-1, 1)
    if features.shape[0] != targets.shape[0]:
        raise DimensionMismatchError(
            f"{features.shape[0]} covariate rows but {targets.shape[0]} responses"
        )
    if targets.shape[0] < 1:
        raise ModelFitError("Cannot fit a model on zero observations")
    if not (np.all(np.isfinite(features)) and np.all(np.isfinite(targets))):
        raise ModelFitError("Training data contains non-finite values")
    return features, targets


class BaseEstimator(ABC):
    """Abstract base class for model families."""

    def __init__(self, family: ModelFamily, description: str = "", parameters: Optional[List[str]] = None):
        self._family = family
        self._description = description
        self._parameters = parameters or []

    @property
    def name(self) -> str:
        return self._family.value

    @property
    def family(self) -> ModelFamily:
        return self._family

    @property
    def description(self) -> str:
        return self._description

    @property
    def parameters(self) -> List[str]:
        return self._parameters

    @abstractmethod
    def fit(self, features: np.ndarray, targets: np.ndarray, spec: ModelSpec) -> FittedModel:
        """Fit the family's objective on the given data."""
        pass
