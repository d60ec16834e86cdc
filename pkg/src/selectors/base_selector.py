"""
Selector interface and the per-period context shared by all selectors.
"""

import threading
from abc import ABC, abstractmethod
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..comparison import second_moments, squared_errors
from ..config import GridConfig, SelectorSettings
from ..model_zoo import FittedModel
from ..models import SelectorKind
from ..panel import SplitPanel


class CandidateLosses:
    """Lazily computed validation squared errors of each candidate on periods 1..t-1."""

    def __init__(self, candidates: List[FittedModel], validation: SplitPanel, t: int):
        self.candidates = candidates
        self.validation = validation
        self.t = t
        self._cache: Dict[int, Tuple[np.ndarray, ...]] = {}
        self._moments: Optional[np.ndarray] = None
        self._lock = threading.Lock()

    def __getitem__(self, index: int) -> Tuple[np.ndarray, ...]:
        cached = self._cache.get(index)
        if cached is None:
            cached = squared_errors(self.candidates[index], self.validation, self.t)
            with self._lock:
                self._cache.setdefault(index, cached)
        return cached

    def window_total(self, index: int, first_period: int) -> float:
        """Summed squared error over validation periods first_period..t-1."""
        return float(sum(np.sum(errors) for errors in self[index][first_period - 1:]))

    @property
    def second_moments(self) -> np.ndarray:
        if self._moments is None:
            self._moments = second_moments(self.validation, self.t)
        return self._moments


@dataclass
class SelectionContext:
    """Everything a selector may look at when choosing the model for period t."""

    t: int
    candidates: List[FittedModel]
    splits: SplitPanel
    grid: GridConfig
    seed: int
    executor: Optional[Executor] = None
    retain_traces: bool = False
    losses: Optional[CandidateLosses] = None

    def __post_init__(self):
        if self.losses is None:
            self.losses = CandidateLosses(self.candidates, self.splits, self.t)


@dataclass
class Selection:
    """One selector's choice for one period."""

    selector: str
    model: FittedModel
    candidate_index: Optional[int]
    duel_count: int = 0
    final_window: Optional[int] = None
    trace: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)


class BaseSelector(ABC):
    """Abstract base class for model selectors."""

    def __init__(self, settings: SelectorSettings, description: str = ""):
        self._settings = settings
        self._description = description

    @property
    def name(self) -> str:
        return self._settings.label

    @property
    def kind(self) -> SelectorKind:
        return self._settings.kind

    @property
    def settings(self) -> SelectorSettings:
        return self._settings

    @property
    def description(self) -> str:
        return self._description

    @abstractmethod
    def select(self, context: SelectionContext) -> Selection:
        """Choose the model used to predict period context.t."""
        pass
