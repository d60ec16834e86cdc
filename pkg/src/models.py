"""
Shared enumerations and API payload models for ATOMS Lab.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ModelFamily(str, Enum):
    """Candidate model family enumeration."""

    RIDGE = "ridge"
    LASSO = "lasso"
    ELASTIC_NET = "elastic_net"
    RANDOM_FOREST = "random_forest"


class SelectorKind(str, Enum):
    """Selector enumeration."""

    ATOMS_MSE = "atoms_mse"
    ATOMS_R2 = "atoms_r2"
    FIXED_VAL = "fixed_val"
    FIXED_CV = "fixed_cv"


class DeltaMode(str, Enum):
    """How the per-duel confidence level is chosen."""

    FIXED = "fixed"
    PAIRWISE = "pairwise"
    TOURNAMENT = "tournament"


class ResplitMode(str, Enum):
    """When the train/validation split is redrawn within one seed."""

    ONCE = "once"
    PER_PERIOD = "per_period"


class R2Metric(str, Enum):
    """Out-of-sample R² definition."""

    ZERO = "zero"
    STANDARD = "standard"


class EnvKind(str, Enum):
    """Synthetic drift environment enumeration."""

    ZIGZAG_LINEAR_SINE = "zigzag_linear_sine"
    PIECEWISE_REGIME = "piecewise_regime"
    STATIONARY = "stationary"


class RegistryEntry(BaseModel):
    """Registry entry describing a pluggable component."""

    name: str
    description: str
    parameters: List[str] = []


class GapScanTable(BaseModel):
    """API response carrying one duel's gap scan."""

    t: int
    winner: int
    loser: int
    chosen_window: int
    delta_hat_at_choice: float
    rows: List[Dict[str, Any]]


class ComplexityResponse(BaseModel):
    """API response for the tournament complexity measurement."""

    trials: int
    mean_comparisons: Dict[int, float]


class PanelSummary(BaseModel):
    """API response describing a generated panel."""

    periods: int
    dimension: int
    observations: int
    csv: Optional[str] = Field(default=None, description="Panel rendered in the standard CSV layout")
