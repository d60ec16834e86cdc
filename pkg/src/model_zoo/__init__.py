from .base_model import BaseEstimator, FittedModel, ModelSpec, effective_window, training_window
from .estimator_manager import EstimatorManager
from .forest import ForestEstimator, ForestModel, RegressionTree, best_split, fit_forest
from .grid import build_candidate_grid, candidate_specs, fit_spec, grid_size, specifications
from .linear import (
    ElasticNetEstimator,
    LassoEstimator,
    LinearModel,
    RidgeEstimator,
    elastic_net_objective,
    fit_elastic_net,
    fit_lasso,
    fit_ridge,
    kkt_residual,
)

__all__ = [
    "BaseEstimator",
    "ElasticNetEstimator",
    "EstimatorManager",
    "FittedModel",
    "ForestEstimator",
    "ForestModel",
    "LassoEstimator",
    "LinearModel",
    "ModelSpec",
    "RegressionTree",
    "RidgeEstimator",
    "best_split",
    "build_candidate_grid",
    "candidate_specs",
    "effective_window",
    "elastic_net_objective",
    "fit_elastic_net",
    "fit_forest",
    "fit_lasso",
    "fit_ridge",
    "fit_spec",
    "grid_size",
    "kkt_residual",
    "specifications",
    "training_window",
]
