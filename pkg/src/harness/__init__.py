from .backtest import (
    BacktestReport,
    PeriodSelection,
    PortfolioReport,
    SeedRun,
    WalkForward,
    assemble,
    load_panel,
    run,
    run_many,
)
from .experiments import complexity_table, fit_at, run_duel
from .reporting import emit, emit_portfolio, render_summary
from .tradeoff import TradeoffReport, emit_tradeoff, run_tradeoff, tradeoff_models

__all__ = [
    "BacktestReport",
    "PeriodSelection",
    "PortfolioReport",
    "SeedRun",
    "TradeoffReport",
    "WalkForward",
    "assemble",
    "complexity_table",
    "emit",
    "emit_portfolio",
    "emit_tradeoff",
    "fit_at",
    "load_panel",
    "render_summary",
    "run",
    "run_duel",
    "run_many",
    "run_tradeoff",
    "tradeoff_models",
]
