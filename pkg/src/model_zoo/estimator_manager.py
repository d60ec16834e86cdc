from typing import Dict

import numpy as np

from ..exceptions import ModelFitError
from ..logging_config import LoggerMixin
from ..models import ModelFamily
from .base_model import BaseEstimator, FittedModel, ModelSpec
from .forest import ForestEstimator
from .linear import DEFAULT_MAX_ITER, DEFAULT_TOLERANCE, ElasticNetEstimator, LassoEstimator, RidgeEstimator


class EstimatorManager(LoggerMixin):
    def __init__(self, tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER):
        self.estimators = self._get_estimators(tol, max_iter)

    def _get_estimators(self, tol: float, max_iter: int) -> Dict[ModelFamily, BaseEstimator]:
        """Initialize available model families."""
        ridge = RidgeEstimator()
        lasso = LassoEstimator(tol=tol, max_iter=max_iter)
        enet = ElasticNetEstimator(tol=tol, max_iter=max_iter)
        forest = ForestEstimator()
        return {
            ridge.family: ridge,
            lasso.family: lasso,
            enet.family: enet,
            forest.family: forest,
        }

    def get_all_estimator_infos(self):
        """Get all available model families."""
        return {key.value: value.description for key, value in self.estimators.items()}

    def get(self, family: ModelFamily) -> BaseEstimator:
        if family not in self.estimators:
            raise ModelFitError(f"Model family {family} not found")
        return self.estimators[family]

    def fit(self, features: np.ndarray, targets: np.ndarray, spec: ModelSpec, **provenance) -> FittedModel:
        return self.get(spec.family).fit(features, targets, spec, **provenance)
