from .panel import (
    CsvSchema,
    Observation,
    Panel,
    PeriodBatch,
    load_csv,
    panel_frame,
    save_csv,
    stack_batches,
)
from .splitting import SplitPanel, partition_indices, split, split_batch, train_count

__all__ = [
    "CsvSchema",
    "Observation",
    "Panel",
    "PeriodBatch",
    "SplitPanel",
    "load_csv",
    "panel_frame",
    "partition_indices",
    "save_csv",
    "split",
    "split_batch",
    "stack_batches",
    "train_count",
]
