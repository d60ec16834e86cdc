"""
Static SVG charts of a backtest report.
"""

import logging
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..models import R2Metric  # noqa: E402

logger = logging.getLogger(__name__)

# fixed salt and no date keep SVG output identical across runs
plt.rcParams["svg.hashsalt"] = "atoms-lab"
SVG_METADATA = {"Date": None}


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata=SVG_METADATA, bbox_inches="tight")
    plt.close(fig)


def plot_overall_r2(report, path: Path) -> None:
    names = report.selectors
    fig, ax = plt.subplots(figsize=(8, 4))
    positions = np.arange(len(names))
    for offset, metric in ((-0.2, R2Metric.ZERO), (0.2, R2Metric.STANDARD)):
        values = [report.overall[n][metric.value] or 0.0 for n in names]
        ax.bar(positions + offset, values, width=0.4, label=f"R² ({metric.value})")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(positions)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("Out-of-sample R²")
    ax.legend()
    _save(fig, path)


def plot_annual_r2(report, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(10, 4))
    for name in report.selectors:
        table = report.annual[name][R2Metric.ZERO.value]
        years = list(table.keys())
        values = [np.nan if v is None else v for v in table.values()]
        ax.plot(years, values, marker="o", markersize=3, label=name)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("Annual out-of-sample R²")
    ax.tick_params(axis="x", rotation=90)
    ax.legend(fontsize="small")
    _save(fig, path)


def plot_annual_box(report, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    data = [
        [v for v in report.annual[name][R2Metric.ZERO.value].values() if v is not None]
        for name in report.selectors
    ]
    ax.boxplot(data)
    ax.set_xticks(range(1, len(report.selectors) + 1))
    ax.set_xticklabels(report.selectors, rotation=30, ha="right")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("Annual out-of-sample R²")
    _save(fig, path)


def plot_regime_r2(report, path: Path) -> None:
    regimes = [w.label for w in report.regimes]
    fig, ax = plt.subplots(figsize=(8, 4))
    positions = np.arange(len(regimes))
    width = 0.8 / max(len(report.selectors), 1)
    for i, name in enumerate(report.selectors):
        values = [report.regime_metrics[r][name][R2Metric.ZERO.value] or 0.0 for r in regimes]
        ax.bar(positions + i * width - 0.4 + width / 2, values, width=width, label=name)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(positions)
    ax.set_xticklabels(regimes)
    ax.set_ylabel("Out-of-sample R²")
    ax.legend(fontsize="small")
    _save(fig, path)


def plot_wealth(report, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(10, 4))
    labels = [report.label(t) for t in report.periods]
    for name, curve in report.wealth.items():
        ax.plot(labels, np.log(curve), label=name)
    ax.set_ylabel("Log wealth")
    step = max(len(labels) // 12, 1)
    ax.set_xticks(labels[::step])
    ax.tick_params(axis="x", rotation=90)
    ax.legend(fontsize="small")
    _save(fig, path)


def write_plots(report, outdir: Path) -> List[str]:
    """Write every chart; failures are logged and skipped."""
    jobs: List[tuple] = [
        ("overall_r2.svg", plot_overall_r2),
        ("annual_r2.svg", plot_annual_r2),
        ("annual_r2_box.svg", plot_annual_box),
    ]
    if report.regimes:
        jobs.append(("regime_r2.svg", plot_regime_r2))
    if report.wealth:
        jobs.append(("wealth.svg", plot_wealth))

    written = []
    for filename, plot in jobs:
        try:
            plot(report, outdir / filename)
            written.append(filename)
        except Exception as e:
            plt.close("all")
            logger.warning(f"Could not draw {filename}: {e}")
    return written
