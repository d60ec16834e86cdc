"""
Report files of a backtest.

    metrics.json     seed-averaged metric tables (byte-reproducible)
    predictions.csv  seed, period, label, selector, observation, prediction, y
    selections.csv   seed, period, selector, family, hyperparameters, window k, duel count, final ℓ̂
    wealth.csv       period, label, selector, seed-averaged wealth
    annual_r2.csv    selector, year, r2_zero, r2_standard
    timing.json      wall-clock timing
    traces.json      tournament traces and baseline loss tables (retain_traces only)
    summary.md       human-readable tables
    *.svg            charts
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

from ..exceptions import AtomsLabError, ReportError
from ..models import R2Metric
from ..templates import get_template_manager
from .backtest import BacktestReport, PortfolioReport
from .plots import write_plots

logger = logging.getLogger(__name__)

SELECTION_COLUMNS = [
    "seed",
    "period",
    "label",
    "selector",
    "family",
    "hyperparameters",
    "window_exponent",
    "effective_window",
    "duel_count",
    "final_window",
    "model",
]


def write_json(payload: Any, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def predictions_frame(report: BacktestReport) -> pd.DataFrame:
    frames = []
    for run in report.seed_runs:
        for name in report.selectors:
            log = run.logs[name]
            observation = np.concatenate([np.arange(np.sum(log.periods == t)) for t in np.unique(log.periods)])
            frames.append(
                pd.DataFrame({
                    "seed": run.seed,
                    "period": log.periods,
                    "label": [report.label(int(t)) for t in log.periods],
                    "selector": name,
                    "observation": observation,
                    "prediction": log.predictions,
                    "y": log.targets,
                })
            )
    return pd.concat(frames, ignore_index=True)


def selections_frame(report: BacktestReport) -> pd.DataFrame:
    rows = []
    for run in report.seed_runs:
        for s in run.selections:
            rows.append({
                "seed": s.seed,
                "period": s.period,
                "label": report.label(s.period),
                "selector": s.selector,
                "family": s.family,
                "hyperparameters": json.dumps(s.hyperparameters, sort_keys=True),
                "window_exponent": s.window_exponent,
                "effective_window": s.effective_window,
                "duel_count": s.duel_count,
                "final_window": s.final_window,
                "model": s.label,
            })
    return pd.DataFrame(rows, columns=SELECTION_COLUMNS).astype(
        {"window_exponent": "Int64", "effective_window": "Int64", "final_window": "Int64"}
    )


def wealth_frame(report: BacktestReport) -> pd.DataFrame:
    rows = [
        {"period": t, "label": report.label(t), "selector": name, "wealth": value}
        for name, curve in report.wealth.items()
        for t, value in zip(report.periods, curve)
    ]
    return pd.DataFrame(rows, columns=["period", "label", "selector", "wealth"])


def annual_frame(report: BacktestReport) -> pd.DataFrame:
    rows = []
    for name in report.selectors:
        zero = report.annual[name][R2Metric.ZERO.value]
        standard = report.annual[name][R2Metric.STANDARD.value]
        for year in zero:
            rows.append({"selector": name, "year": year, "r2_zero": zero[year], "r2_standard": standard.get(year)})
    return pd.DataFrame(rows, columns=["selector", "year", "r2_zero", "r2_standard"])


def traces_payload(report: BacktestReport) -> List[Dict[str, Any]]:
    return [trace for run in report.seed_runs for trace in run.traces]


def render_summary(report: BacktestReport) -> str:
    return get_template_manager().render("backtest_summary.md.j2", {"report": report})


def emit(report: BacktestReport, outdir: Union[str, Path], plots: bool = True) -> List[str]:
    """Write all report files into outdir and return their names."""
    if not report.selectors:
        raise ReportError("Cannot emit a report without selectors")
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        write_json(report.to_dict(), outdir / "metrics.json")
        predictions_frame(report).to_csv(outdir / "predictions.csv", index=False)
        selections_frame(report).to_csv(outdir / "selections.csv", index=False)
        wealth_frame(report).to_csv(outdir / "wealth.csv", index=False)
        annual_frame(report).to_csv(outdir / "annual_r2.csv", index=False)
        write_json(report.timing, outdir / "timing.json")
        written = ["metrics.json", "predictions.csv", "selections.csv", "wealth.csv", "annual_r2.csv", "timing.json"]
        traces = traces_payload(report)
        if traces:
            write_json(traces, outdir / "traces.json")
            written.append("traces.json")
    except OSError as e:
        raise ReportError(f"Cannot write report to '{outdir}': {e}", {"outdir": str(outdir)})

    try:
        (outdir / "summary.md").write_text(render_summary(report), encoding="utf-8")
        written.append("summary.md")
    except (AtomsLabError, OSError) as e:
        logger.warning(f"Could not write summary.md: {e}")

    if plots:
        written += write_plots(report, outdir)
    logger.info(f"Wrote {len(written)} report files to {outdir}")
    return written


def emit_portfolio(portfolio: PortfolioReport, outdir: Union[str, Path], plots: bool = True) -> List[str]:
    """One report directory per asset plus portfolio.json with the cross-asset averages."""
    outdir = Path(outdir)
    written = []
    for name, report in portfolio.reports.items():
        written += [f"{name}/{f}" for f in emit(report, outdir / name, plots)]
    try:
        write_json(portfolio.to_dict(), outdir / "portfolio.json")
    except OSError as e:
        raise ReportError(f"Cannot write report to '{outdir}': {e}", {"outdir": str(outdir)})
    written.append("portfolio.json")
    return written
