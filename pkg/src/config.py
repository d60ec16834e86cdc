"""
Configuration management with dotenv support.

Process settings come from the environment; experiment settings come from JSON
files validated into the pydantic models below.
"""

import json
import math
import os
from pathlib import Path
from typing import List, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .exceptions import ConfigurationError
from .models import DeltaMode, ResplitMode, SelectorKind
from .panel import CsvSchema
from .synth.environments import DriftEnv

# Load environment variables from .env file
load_dotenv()


class ServiceConfig(BaseModel):
    """Service configuration."""

    name: str = Field(default="ATOMS Lab")
    version: str = Field(default="1.0.0")
    host: str = Field(default="0.0.0.0")
    port: int = Field(default=8000)
    debug: bool = Field(default=False)


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = Field(default="INFO")
    format: str = Field(default="detailed")  # detailed, simple, json
    console_enabled: bool = Field(default=True)
    file_enabled: bool = Field(default=False)
    file_path: Optional[str] = Field(default=None)


class RuntimeConfig(BaseModel):
    """Worker pool configuration."""

    threads: int = Field(default=0, ge=0, description="0 means one worker per CPU")

    @property
    def worker_count(self) -> int:
        return self.threads or (os.cpu_count() or 1)


class AppConfig(BaseModel):
    """Process-wide configuration."""

    service: ServiceConfig = Field(default_factory=ServiceConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)


def get_config() -> AppConfig:
    """Get configuration from environment variables."""

    service_config = ServiceConfig(
        name=os.getenv("SERVICE_NAME", "ATOMS Lab"),
        version=os.getenv("SERVICE_VERSION", "1.0.0"),
        host=os.getenv("SERVICE_HOST", "0.0.0.0"),
        port=int(os.getenv("SERVICE_PORT", "8000")),
        debug=os.getenv("DEBUG", "False").lower() == "true",
    )

    logging_config = LoggingConfig(
        level=os.getenv("LOG_LEVEL", "DEBUG" if service_config.debug else "INFO"),
        format=os.getenv("LOG_FORMAT", "detailed"),
        console_enabled=os.getenv("LOG_CONSOLE_ENABLED", "true").lower() == "true",
        file_enabled=os.getenv("LOG_FILE_ENABLED", "false").lower() == "true",
        file_path=os.getenv("LOG_FILE_PATH"),
    )

    try:
        threads = int(os.getenv("ATOMS_LAB_THREADS", "0"))
    except ValueError as e:
        raise ConfigurationError(f"ATOMS_LAB_THREADS must be an integer: {e}")
    runtime_config = RuntimeConfig(threads=max(threads, 0))

    return AppConfig(
        service=service_config,
        logging=logging_config,
        runtime=runtime_config,
    )


# Global configuration instance
config = get_config()


# --------------------------------------------------------------------------
# Experiment configuration
# --------------------------------------------------------------------------

DEFAULT_MSE_M_SQUARED = 5e-4
DEFAULT_R2_M_SQUARED = 5.0


class ComparisonConfig(BaseModel):
    """Hyperparameters of the adaptive rolling-window comparison."""

    delta_prime: float = Field(default=0.1, gt=0.0, lt=1.0)
    m_squared: float = Field(default=DEFAULT_MSE_M_SQUARED, gt=0.0)
    v_floor: float = Field(default=1e-8, gt=0.0)
    max_lookback: Optional[int] = Field(default=None, ge=1)
    delta_mode: DeltaMode = Field(default=DeltaMode.FIXED)
    confidence: float = Field(default=0.1, gt=0.0, lt=1.0, description="Overall δ for theory-scaled modes")

    def resolve(self, t: int, n_candidates: int = 2) -> "ComparisonConfig":
        """Return a fixed-δ′ copy for period t.

        pairwise: δ′ = δ/(3t); tournament: δ′ = δ/(3Λ²t).
        """
        if self.delta_mode == DeltaMode.FIXED:
            return self
        if self.delta_mode == DeltaMode.PAIRWISE:
            delta_prime = self.confidence / (3.0 * t)
        else:
            delta_prime = self.confidence / (3.0 * n_candidates**2 * t)
        return self.model_copy(update={"delta_prime": delta_prime, "delta_mode": DeltaMode.FIXED})


def _log_grid(*exponents: float) -> List[float]:
    return [10.0**e for e in exponents]


class GridConfig(BaseModel):
    """Candidate grid: family hyperparameters crossed with window exponents."""

    ridge_alphas: List[float] = Field(default_factory=lambda: _log_grid(-3, -1.5, 0, 1.5, 3))
    lasso_alphas: List[float] = Field(default_factory=lambda: _log_grid(-5, -3.5, -2, -0.5, 1))
    enet_alphas: List[float] = Field(default_factory=lambda: _log_grid(-3, 0, 3))
    enet_l1_ratios: List[float] = Field(default_factory=lambda: [0.01, 0.05, 0.1])
    forest_n_trees: List[int] = Field(default_factory=lambda: [10, 100, 200])
    forest_max_depths: List[int] = Field(default_factory=lambda: [3, 5, 10])
    forest_seed: int = Field(default=0, ge=0)
    window_exponents: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4, 5])
    cd_tolerance: float = Field(default=1e-8, gt=0.0)
    cd_max_iter: int = Field(default=10_000, ge=1)

    @field_validator("ridge_alphas", "lasso_alphas", "enet_alphas")
    @classmethod
    def validate_alphas(cls, v):
        if any(not (a > 0 and math.isfinite(a)) for a in v):
            raise ValueError("regularization parameters must be positive and finite")
        return v

    @field_validator("enet_l1_ratios")
    @classmethod
    def validate_ratios(cls, v):
        if any(not 0.0 < r < 1.0 for r in v):
            raise ValueError("elastic net mixing ratios must lie in (0, 1)")
        return v

    @field_validator("forest_n_trees", "forest_max_depths")
    @classmethod
    def validate_forest(cls, v):
        if any(x < 1 for x in v):
            raise ValueError("forest sizes and depths must be at least 1")
        return v

    @field_validator("window_exponents")
    @classmethod
    def validate_windows(cls, v):
        if not v or any(k < 0 for k in v):
            raise ValueError("window exponents must be a nonempty list of integers >= 0")
        return v


class SelectorSettings(BaseModel):
    """One selector entry of a run."""

    kind: SelectorKind
    name: Optional[str] = None
    comparison: Optional[ComparisonConfig] = None
    window: Optional[int] = Field(default=None, ge=1, description="Fixed-val look-back ℓ")
    cv_window: int = Field(default=36, ge=1)
    folds: int = Field(default=5, ge=2)

    @model_validator(mode="after")
    def check_kind_fields(self):
        if self.kind == SelectorKind.FIXED_VAL and self.window is None:
            raise ValueError("fixed_val selectors need a window")
        return self

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == SelectorKind.ATOMS_MSE:
            return "ATOMS"
        if self.kind == SelectorKind.ATOMS_R2:
            return "ATOMS-R2"
        if self.kind == SelectorKind.FIXED_VAL:
            return f"Fixed-val({self.window})"
        return "Fixed-CV"

    @property
    def effective_comparison(self) -> ComparisonConfig:
        if self.comparison is not None:
            return self.comparison
        if self.kind == SelectorKind.ATOMS_R2:
            return ComparisonConfig(m_squared=DEFAULT_R2_M_SQUARED)
        return ComparisonConfig()


def default_selectors() -> List[SelectorSettings]:
    return [
        SelectorSettings(kind=SelectorKind.ATOMS_MSE),
        SelectorSettings(kind=SelectorKind.ATOMS_R2),
        SelectorSettings(kind=SelectorKind.FIXED_VAL, window=32),
        SelectorSettings(kind=SelectorKind.FIXED_VAL, window=128),
        SelectorSettings(kind=SelectorKind.FIXED_VAL, window=512),
        SelectorSettings(kind=SelectorKind.FIXED_CV),
    ]


class CsvSource(BaseModel):
    path: str
    csv_schema: CsvSchema = Field(default_factory=CsvSchema, alias="schema")

    model_config = {"populate_by_name": True}


class SynthSource(BaseModel):
    env: DriftEnv
    periods: int = Field(ge=1)


class DataSource(BaseModel):
    """Exactly one of a CSV file or a synthetic environment."""

    csv: Optional[CsvSource] = None
    synth: Optional[SynthSource] = None

    @model_validator(mode="after")
    def check_exactly_one(self):
        if (self.csv is None) == (self.synth is None):
            raise ValueError("data source needs exactly one of 'csv' or 'synth'")
        return self


class RegimeSpec(BaseModel):
    """Evaluation regime bounded by calendar labels or ordinal periods (inclusive)."""

    label: str
    start: Union[int, str]
    end: Union[int, str]


class RunConfig(BaseModel):
    """Walk-forward backtest configuration."""

    data: DataSource
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    seeds: List[int] = Field(default_factory=lambda: list(range(20)))
    resplit: ResplitMode = Field(default=ResplitMode.ONCE)
    selectors: List[SelectorSettings] = Field(default_factory=default_selectors)
    grid: GridConfig = Field(default_factory=GridConfig)
    warmup: int = Field(default=2, ge=1)
    max_lookback: Optional[int] = Field(default=None, ge=1)
    output_dir: str = Field(default="outputs/backtest")
    regimes: List[RegimeSpec] = Field(default_factory=list)
    use_nber_regimes: bool = Field(default=True)
    retain_traces: bool = Field(default=False)
    threads: Optional[int] = Field(default=None, ge=0)
    true_risk_samples: int = Field(default=2000, ge=1)

    @field_validator("selectors")
    @classmethod
    def validate_selectors(cls, v):
        if not v:
            raise ValueError("at least one selector is required")
        labels = [s.label for s in v]
        if len(set(labels)) != len(labels):
            raise ValueError(f"selector labels must be unique: {labels}")
        return v

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v):
        if not v or any(s < 0 for s in v):
            raise ValueError("seeds must be a nonempty list of unsigned integers")
        return v

    @classmethod
    def from_json_file(cls, path: Union[str, Path]) -> "RunConfig":
        """Load and validate a run configuration file."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read run config '{path}': {e}")
        return cls.from_dict(raw, base_dir=Path(path).parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Optional[Path] = None) -> "RunConfig":
        try:
            run_config = cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigurationError("Invalid run config", {"errors": e.errors(include_url=False, include_context=False)})
        if base_dir is not None and run_config.data.csv is not None:
            csv_path = Path(run_config.data.csv.path)
            if not csv_path.is_absolute():
                run_config.data.csv.path = str(base_dir / csv_path)
        return run_config

    def worker_count(self) -> int:
        threads = config.runtime.threads if self.threads is None else self.threads
        return threads or (os.cpu_count() or 1)


class TradeoffConfig(BaseModel):
    """Fixed-model comparison of training-window length against model complexity."""

    seeds: List[int] = Field(default_factory=lambda: list(range(20)))
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    warmup: int = Field(default=2, ge=1)
    recent_window: int = Field(default=64, ge=1)
    ridge_alpha: float = Field(default=1.0, gt=0.0)
    forest_n_tree: int = Field(default=200, ge=1)
    forest_max_depth: int = Field(default=5, ge=1)
    forest_seed: int = Field(default=0, ge=0)

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v):
        if not v or any(s < 0 for s in v):
            raise ValueError("seeds must be a nonempty list of unsigned integers")
        return v


class DuelConfig(BaseModel):
    """A single duel between two specifications at one period."""

    data: DataSource
    f1: Optional[str] = Field(default=None, description="Specification string, e.g. ridge:alpha=1,k=2")
    f2: Optional[str] = None
    t: Optional[int] = Field(default=None, ge=2, description="Defaults to the last period")
    seed: int = Field(default=0, ge=0)
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    r2: bool = Field(default=False, description="Compare in R² instead of mean squared error")
    comparison: Optional[ComparisonConfig] = None

    @property
    def effective_comparison(self) -> ComparisonConfig:
        if self.comparison is not None:
            return self.comparison
        return ComparisonConfig(m_squared=DEFAULT_R2_M_SQUARED if self.r2 else DEFAULT_MSE_M_SQUARED)

    @classmethod
    def from_json_file(cls, path: Union[str, Path]) -> "DuelConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
            duel_config = cls.model_validate(raw)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read duel config '{path}': {e}")
        except ValidationError as e:
            raise ConfigurationError("Invalid duel config", {"errors": e.errors(include_url=False, include_context=False)})
        if duel_config.data.csv is not None and not Path(duel_config.data.csv.path).is_absolute():
            duel_config.data.csv.path = str(Path(path).parent / duel_config.data.csv.path)
        return duel_config
