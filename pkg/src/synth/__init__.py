from .environments import (
    DriftEnv,
    OptimalPredictor,
    coefficient_path,
    excess_risk,
    generate,
    optimal_predictor,
    regime_coefficients,
    regime_index,
    true_risk,
)

__all__ = [
    "DriftEnv",
    "OptimalPredictor",
    "coefficient_path",
    "excess_risk",
    "generate",
    "optimal_predictor",
    "regime_coefficients",
    "regime_index",
    "true_risk",
]
