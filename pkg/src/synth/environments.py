"""
Seeded synthetic drift environments.

All kinds draw x ~ Uniform[0, 1]^d and y = f*_t(x) + Normal(0, noise_sd²):

    zigzag_linear_sine:  f*_t(x) = c_t·x₁ + γ·sin(2πx₁), with c_1 = 0 and c_t
                         stepping by η, reversing direction at 0 and 1
    stationary:          same with c_t ≡ initial_coefficient
    piecewise_regime:    f*_t(x) = ⟨β_r, x⟩ + γ·sin(2πx₁), β_r constant between
                         change points (regime r starts at change_points[r-1])

Period t draws from ``substream(seed, ENV_STREAM, t)``, so a panel of T
periods is a prefix of any longer panel from the same environment.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..exceptions import EnvironmentSpecError
from ..models import EnvKind
from ..panel import Panel, PeriodBatch
from ..seeding import ENV_STREAM, RISK_STREAM, substream

REGIME_STREAM = 0xBE7A
# c_t may land a hair above 1 when 1/η is an integer
_BOUNCE_SLACK = 1e-12


class DriftEnv(BaseModel):
    """Synthetic environment description, embeddable in run configs."""

    kind: EnvKind = Field(default=EnvKind.ZIGZAG_LINEAR_SINE)
    eta: float = Field(default=0.0, ge=0.0, description="Drift step per period")
    gamma: float = Field(default=0.0, description="Misspecification amplitude")
    noise_sd: float = Field(default=1.0, ge=0.0)
    samples_per_period: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0)
    dimension: int = Field(default=1, ge=1)
    change_points: List[int] = Field(default_factory=list, description="First period of each new regime")
    regime_coefficients: Optional[List[List[float]]] = Field(default=None)
    coefficient_scale: float = Field(default=1.0, gt=0.0)
    initial_coefficient: float = Field(default=0.0)

    @model_validator(mode="after")
    def check_regimes(self):
        points = self.change_points
        if any(p < 2 for p in points) or any(b <= a for a, b in zip(points, points[1:])):
            raise ValueError("change_points must be strictly increasing periods >= 2")
        if self.regime_coefficients is not None:
            if len(self.regime_coefficients) != len(points) + 1:
                raise ValueError("regime_coefficients needs one row per regime (len(change_points) + 1)")
            if any(len(row) != self.dimension for row in self.regime_coefficients):
                raise ValueError("every regime coefficient row needs `dimension` entries")
        return self


def _check(env: DriftEnv) -> None:
    if env.kind == EnvKind.ZIGZAG_LINEAR_SINE and env.eta > 1.0:
        raise EnvironmentSpecError(f"Zigzag drift needs eta <= 1, got {env.eta}", {"eta": env.eta})


def coefficient_path(env: DriftEnv, periods: int) -> np.ndarray:
    """c_1..c_T of the zigzag (or constant) linear coefficient."""
    _check(env)
    if env.kind == EnvKind.STATIONARY:
        return np.full(periods, env.initial_coefficient)
    path = np.zeros(periods)
    step, direction = 0, 1
    for t in range(1, periods):
        nxt = (step + direction) * env.eta
        if nxt > 1.0 + _BOUNCE_SLACK or nxt < -_BOUNCE_SLACK:
            direction = -direction
        step += direction
        path[t] = step * env.eta
    return path


def regime_index(env: DriftEnv, t: int) -> int:
    return int(np.searchsorted(np.asarray(env.change_points), t, side="right"))


def regime_coefficients(env: DriftEnv) -> np.ndarray:
    """β_r for every regime, drawn from the environment seed unless given explicitly."""
    if env.regime_coefficients is not None:
        return np.asarray(env.regime_coefficients, dtype=np.float64)
    return np.vstack([
        substream(env.seed, ENV_STREAM, REGIME_STREAM, r).normal(0.0, env.coefficient_scale, env.dimension)
        for r in range(len(env.change_points) + 1)
    ])


class OptimalPredictor:
    """The Bayes-optimal predictor f*_t of one period."""

    def __init__(self, env: DriftEnv, t: int, path: Optional[np.ndarray] = None):
        _check(env)
        self.env = env
        self.t = t
        self.dimension = env.dimension
        if env.kind == EnvKind.PIECEWISE_REGIME:
            self.beta = regime_coefficients(env)[regime_index(env, t)]
        else:
            c = (path if path is not None else coefficient_path(env, t))[t - 1]
            self.beta = np.zeros(env.dimension)
            self.beta[0] = c

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64).reshape(-1, self.dimension)
        return features @ self.beta + self.env.gamma * np.sin(2.0 * np.pi * features[:, 0])


def optimal_predictor(env: DriftEnv, t: int) -> OptimalPredictor:
    return OptimalPredictor(env, t)


def _draw(env: DriftEnv, predictor: OptimalPredictor, rng: np.random.Generator, size: int):
    features = rng.uniform(0.0, 1.0, size=(size, env.dimension))
    noise = rng.normal(0.0, env.noise_sd, size=size) if env.noise_sd > 0 else np.zeros(size)
    return features, predictor.predict(features) + noise


def generate(env: DriftEnv, periods: int) -> Panel:
    """Draw a panel of `periods` periods with samples_per_period observations each."""
    _check(env)
    if periods < 1:
        raise EnvironmentSpecError(f"generate needs at least one period, got {periods}")
    path = coefficient_path(env, periods)
    batches = []
    for t in range(1, periods + 1):
        predictor = OptimalPredictor(env, t, path)
        features, targets = _draw(env, predictor, substream(env.seed, ENV_STREAM, t), env.samples_per_period)
        batches.append(PeriodBatch(t, features, targets))
    return Panel(dimension=env.dimension, periods=tuple(batches))


def true_risk(env: DriftEnv, t: int, model, mc_samples: int = 2000, seed: int = 0) -> float:
    """Monte Carlo estimate of the period-t mean squared error L_t(f)."""
    if mc_samples < 1:
        raise EnvironmentSpecError(f"mc_samples must be >= 1, got {mc_samples}")
    predictor = OptimalPredictor(env, t)
    features, targets = _draw(env, predictor, substream(seed, RISK_STREAM, t), mc_samples)
    return float(np.mean((model.predict(features) - targets) ** 2))


def excess_risk(env: DriftEnv, t: int, model, mc_samples: int = 2000, seed: int = 0) -> float:
    """Monte Carlo estimate of L_t(f) - L_t(f*_t) = E[(f(x) - f*_t(x))²]."""
    if mc_samples < 1:
        raise EnvironmentSpecError(f"mc_samples must be >= 1, got {mc_samples}")
    predictor = OptimalPredictor(env, t)
    features = substream(seed, RISK_STREAM, t).uniform(0.0, 1.0, size=(mc_samples, env.dimension))
    return float(np.mean((model.predict(features) - predictor.predict(features)) ** 2))
