"""
Penalized linear specifications on the augmented covariate x̃ = (x, 1).

All three objectives penalize every coordinate of θ ∈ R^{d+1}, the intercept
coordinate included:

    ridge:        (1/n)‖X̃θ − y‖² + α‖θ‖₂²
    lasso:        (1/2n)‖X̃θ − y‖² + α‖θ‖₁
    elastic net:  (1/2n)‖X̃θ − y‖² + αr‖θ‖₁ + (α/2)(1 − r)‖θ‖₂²
"""

import logging
from typing import Optional

import numpy as np

from ..exceptions import ConvergenceError, ModelFitError
from ..models import ModelFamily
from .base_model import BaseEstimator, FittedModel, ModelSpec, validate_training_data

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITER = 10_000


class LinearModel(FittedModel):
    """Affine predictor ⟨θ, (x, 1)⟩."""

    def __init__(self, spec: ModelSpec, theta: np.ndarray, **provenance):
        theta = np.array(theta, dtype=np.float64, copy=True)
        theta.setflags(write=False)
        super().__init__(spec, dimension=theta.shape[0] - 1, **provenance)
        self.theta = theta

    @property
    def coefficients(self) -> np.ndarray:
        return self.theta[:-1]

    @property
    def intercept(self) -> float:
        return float(self.theta[-1])

    def _predict(self, features: np.ndarray) -> np.ndarray:
        return features @ self.theta[:-1] + self.theta[-1]


def augment(features: np.ndarray) -> np.ndarray:
    return np.column_stack([features, np.ones(features.shape[0])])


def soft_threshold(x: float, t: float) -> float:
    return np.sign(x) * max(abs(x) - t, 0.0)


def ridge_coefficients(features: np.ndarray, targets: np.ndarray, alpha: float) -> np.ndarray:
    """Solve (X̃ᵀX̃/n + αI)θ = X̃ᵀy/n."""
    design = augment(features)
    n = design.shape[0]
    gram = design.T @ design / n + alpha * np.eye(design.shape[1])
    return np.linalg.solve(gram, design.T @ targets / n)


def elastic_net_objective(design: np.ndarray, targets: np.ndarray, theta: np.ndarray, l1: float, l2: float) -> float:
    residual = targets - design @ theta
    n = design.shape[0]
    return float(residual @ residual / (2.0 * n) + l1 * np.abs(theta).sum() + 0.5 * l2 * theta @ theta)


def kkt_residual(design: np.ndarray, targets: np.ndarray, theta: np.ndarray, l1: float, l2: float) -> float:
    """Largest violation of the subgradient optimality condition."""
    n = design.shape[0]
    gradient = -design.T @ (targets - design @ theta) / n + l2 * theta
    active = theta != 0.0
    violation = np.where(
        active,
        np.abs(gradient + l1 * np.sign(theta)),
        np.maximum(np.abs(gradient) - l1, 0.0),
    )
    return float(violation.max())


def coordinate_descent(
    design: np.ndarray,
    targets: np.ndarray,
    l1: float,
    l2: float,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """Cyclic coordinate descent on (1/2n)‖X̃θ − y‖² + l1‖θ‖₁ + (l2/2)‖θ‖₂².

    Stops when a full sweep moves no coordinate by tol or more.
    """
    n, p = design.shape
    theta = np.zeros(p)
    residual = targets.copy()
    column_sq = (design**2).sum(axis=0) / n

    max_change = np.inf
    for iteration in range(1, max_iter + 1):
        max_change = 0.0
        for j in range(p):
            old = theta[j]
            denominator = column_sq[j] + l2
            if denominator == 0.0:
                new = 0.0
            else:
                rho = design[:, j] @ residual / n + column_sq[j] * old
                new = soft_threshold(rho, l1) / denominator
            if new != old:
                residual -= design[:, j] * (new - old)
                theta[j] = new
                max_change = max(max_change, abs(new - old))
        if max_change < tol:
            logger.debug(f"Coordinate descent converged after {iteration} sweeps")
            return theta

    raise ConvergenceError(
        f"Coordinate descent did not converge in {max_iter} sweeps",
        {
            "max_coordinate_change": float(max_change),
            "kkt_residual": kkt_residual(design, targets, theta, l1, l2),
        },
    )


def _check_alpha(alpha: float) -> None:
    if not (alpha > 0 and np.isfinite(alpha)):
        raise ModelFitError(f"alpha must be positive and finite, got {alpha}")


def fit_ridge(features: np.ndarray, targets: np.ndarray, alpha: float, spec: Optional[ModelSpec] = None, **provenance) -> LinearModel:
    features, targets = validate_training_data(features, targets)
    _check_alpha(alpha)
    spec = spec or ModelSpec(family=ModelFamily.RIDGE, alpha=alpha)
    theta = ridge_coefficients(features, targets, alpha)
    return LinearModel(spec, theta, training_count=targets.shape[0], **provenance)


def fit_lasso(
    features: np.ndarray,
    targets: np.ndarray,
    alpha: float,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
    spec: Optional[ModelSpec] = None,
    **provenance,
) -> LinearModel:
    features, targets = validate_training_data(features, targets)
    _check_alpha(alpha)
    spec = spec or ModelSpec(family=ModelFamily.LASSO, alpha=alpha)
    theta = coordinate_descent(augment(features), targets, l1=alpha, l2=0.0, tol=tol, max_iter=max_iter)
    return LinearModel(spec, theta, training_count=targets.shape[0], **provenance)


def fit_elastic_net(
    features: np.ndarray,
    targets: np.ndarray,
    alpha: float,
    l1_ratio: float,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
    spec: Optional[ModelSpec] = None,
    **provenance,
) -> LinearModel:
    features, targets = validate_training_data(features, targets)
    _check_alpha(alpha)
    if not 0.0 < l1_ratio < 1.0:
        raise ModelFitError(f"l1_ratio must lie in (0, 1), got {l1_ratio}")
    spec = spec or ModelSpec(family=ModelFamily.ELASTIC_NET, alpha=alpha, l1_ratio=l1_ratio)
    theta = coordinate_descent(
        augment(features),
        targets,
        l1=alpha * l1_ratio,
        l2=alpha * (1.0 - l1_ratio),
        tol=tol,
        max_iter=max_iter,
    )
    return LinearModel(spec, theta, training_count=targets.shape[0], **provenance)


class RidgeEstimator(BaseEstimator):
    """Ridge family solved by the normal equations."""

    def __init__(self):
        super().__init__(ModelFamily.RIDGE, "Linear model with ridge penalty on all d+1 coordinates", ["alpha"])

    def fit(self, features, targets, spec: ModelSpec, **provenance) -> FittedModel:
        return fit_ridge(features, targets, spec.alpha, spec=spec, **provenance)


class LassoEstimator(BaseEstimator):
    """LASSO family solved by cyclic coordinate descent."""

    def __init__(self, tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER):
        super().__init__(ModelFamily.LASSO, "Linear model with l1 penalty on all d+1 coordinates", ["alpha"])
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, features, targets, spec: ModelSpec, **provenance) -> FittedModel:
        return fit_lasso(features, targets, spec.alpha, tol=self.tol, max_iter=self.max_iter, spec=spec, **provenance)


class ElasticNetEstimator(BaseEstimator):
    """Elastic net family solved by cyclic coordinate descent."""

    def __init__(self, tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER):
        super().__init__(
            ModelFamily.ELASTIC_NET,
            "Linear model with mixed l1/l2 penalty on all d+1 coordinates",
            ["alpha", "l1_ratio"],
        )
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, features, targets, spec: ModelSpec, **provenance) -> FittedModel:
        return fit_elastic_net(
            features, targets, spec.alpha, spec.l1_ratio,
            tol=self.tol, max_iter=self.max_iter, spec=spec, **provenance,
        )
