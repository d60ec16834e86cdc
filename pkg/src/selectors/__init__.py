from .atoms import (
    AtomsSelector,
    SelectionRound,
    SelectionTrace,
    measure_complexity,
    noiseless_duel,
    select,
)
from .base_selector import BaseSelector, CandidateLosses, Selection, SelectionContext
from .baselines import (
    BaselineChoice,
    FixedCVSelector,
    FixedValSelector,
    cross_validation_losses,
    cv_window_data,
    fixed_cv,
    fixed_val,
    fold_assignment,
)
from .selector_manager import SelectorManager

__all__ = [
    "AtomsSelector",
    "BaseSelector",
    "BaselineChoice",
    "CandidateLosses",
    "FixedCVSelector",
    "FixedValSelector",
    "Selection",
    "SelectionContext",
    "SelectionRound",
    "SelectionTrace",
    "SelectorManager",
    "cross_validation_losses",
    "cv_window_data",
    "fixed_cv",
    "fixed_val",
    "fold_assignment",
    "measure_complexity",
    "noiseless_duel",
    "select",
]
