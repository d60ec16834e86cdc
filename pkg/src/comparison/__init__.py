from .duel import DuelOutcome, choose_window, decide, duel_mse, duel_r2, duel_stream, duel_stream_r2
from .gapscan import (
    ROW_COLUMNS,
    GapScanRow,
    LossDifferenceStream,
    floor_second_moments,
    loss_difference_stream,
    rows_to_csv,
    rows_to_frame,
    scan,
    scan_r2,
    second_moments,
    squared_errors,
)

__all__ = [
    "DuelOutcome",
    "GapScanRow",
    "LossDifferenceStream",
    "ROW_COLUMNS",
    "choose_window",
    "decide",
    "duel_mse",
    "duel_r2",
    "duel_stream",
    "duel_stream_r2",
    "floor_second_moments",
    "loss_difference_stream",
    "rows_to_csv",
    "rows_to_frame",
    "scan",
    "scan_r2",
    "second_moments",
    "squared_errors",
]
