"""
Walk-forward backtest.

For every seed the panel is split into training and validation sides; then for
t = warmup+1 .. T the candidate grid is fitted on training data of periods < t,
each selector picks a model from the history < t, and the pick predicts every
observation of period t. Metrics are computed per seed and averaged.
"""

import time
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import DataSource, RunConfig
from ..exceptions import AtomsLabError, BacktestError, DegenerateMetricError, InvalidReturnError
from ..logging_config import get_logger, get_logger_with_context
from ..metrics import (
    PredictionLog,
    RegimeWindow,
    annual_r2,
    excess_ratio,
    mean_defined,
    r2_standard,
    r2_zero,
    resolve_regimes,
    wealth_curve,
    average_excess_ratio,
)
from ..model_zoo import FittedModel, build_candidate_grid, candidate_specs
from ..models import R2Metric, ResplitMode, SelectorKind
from ..panel import Panel, SplitPanel, load_csv, split
from ..seeding import derive_seed
from ..selectors import BaseSelector, SelectionContext, SelectorManager
from ..synth import DriftEnv, excess_risk, generate

logger = get_logger(__name__)

ATOMS_KINDS = (SelectorKind.ATOMS_MSE, SelectorKind.ATOMS_R2)


@dataclass(frozen=True)
class PeriodSelection:
    """One row of the selection log."""

    seed: int
    period: int
    selector: str
    candidate_index: Optional[int]
    label: str
    family: str
    hyperparameters: Dict[str, Any]
    window_exponent: Optional[int]
    effective_window: Optional[int]
    duel_count: int
    final_window: Optional[int]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "period": self.period,
            "selector": self.selector,
            "candidate_index": self.candidate_index,
            "label": self.label,
            "family": self.family,
            "hyperparameters": self.hyperparameters,
            "window_exponent": self.window_exponent,
            "effective_window": self.effective_window,
            "duel_count": self.duel_count,
            "final_window": self.final_window,
        }


@dataclass
class SeedRun:
    """Everything one seed produced."""

    seed: int
    logs: Dict[str, PredictionLog]
    selections: List[PeriodSelection]
    traces: List[Dict[str, Any]] = field(default_factory=list)
    # synthetic sources only: per-period excess risk of each selector and each grid candidate
    selector_excess: Dict[str, List[float]] = field(default_factory=dict)
    candidate_excess: Optional[np.ndarray] = None
    seconds: float = 0.0


@dataclass
class BacktestReport:
    """Seed-averaged evaluation of every selector on identical out-of-sample observations."""

    selectors: List[str]
    atoms_selectors: List[str]
    baseline_selectors: List[str]
    seeds: List[int]
    periods: List[int]
    labels: Dict[int, str]
    seed_runs: List[SeedRun]
    overall: Dict[str, Dict[str, Optional[float]]]
    annual: Dict[str, Dict[str, Dict[str, Optional[float]]]]
    regimes: List[RegimeWindow]
    regime_metrics: Dict[str, Dict[str, Dict[str, Optional[float]]]]
    wealth: Dict[str, List[float]]
    final_wealth: Dict[str, float]
    excess_ratios: Dict[str, Dict[str, float]]
    synthetic: Optional[Dict[str, Any]] = None
    timing: Dict[str, Any] = field(default_factory=dict)
    source: str = ""

    def label(self, t: int) -> str:
        return self.labels.get(t, str(t))

    def to_dict(self) -> Dict[str, Any]:
        """The metrics.json payload; contains no timing so that it is reproducible byte for byte."""
        return {
            "source": self.source,
            "selectors": self.selectors,
            "seeds": self.seeds,
            "evaluation": {
                "first_period": self.periods[0] if self.periods else None,
                "last_period": self.periods[-1] if self.periods else None,
                "first_label": self.label(self.periods[0]) if self.periods else None,
                "last_label": self.label(self.periods[-1]) if self.periods else None,
                "observations_per_seed": self.seed_runs[0].logs[self.selectors[0]].size if self.seed_runs else 0,
            },
            "overall": self.overall,
            "annual": self.annual,
            "regimes": {
                w.label: {"start": w.start, "end": w.end, "metrics": self.regime_metrics.get(w.label, {})}
                for w in self.regimes
            },
            "final_wealth": self.final_wealth,
            "excess_ratios": self.excess_ratios,
            "synthetic": self.synthetic,
            "selection_counts": self.selection_counts(),
        }

    def selection_counts(self) -> Dict[str, Dict[str, int]]:
        """How often each selector picked each model family, over all seeds and periods."""
        counts: Dict[str, Dict[str, int]] = {name: {} for name in self.selectors}
        for run in self.seed_runs:
            for row in run.selections:
                counts[row.selector][row.family] = counts[row.selector].get(row.family, 0) + 1
        return counts


def load_panel(source: DataSource) -> Tuple[Panel, Optional[DriftEnv], str]:
    """Panel, its environment when synthetic, and a short source description."""
    if source.csv is not None:
        return load_csv(source.csv.path, source.csv.csv_schema), None, source.csv.path
    env = source.synth.env
    return generate(env, source.synth.periods), env, f"synthetic:{env.kind.value}"


class WalkForward:
    """Walk-forward runner for one panel and one run configuration."""

    def __init__(self, config: RunConfig, panel: Panel, env: Optional[DriftEnv] = None):
        self.config = config
        self.panel = panel
        self.env = env
        self.selectors: List[BaseSelector] = SelectorManager().build_all(config.selectors)
        grid = config.grid
        if config.max_lookback is not None:
            for selector in self.selectors:
                if selector.kind in ATOMS_KINDS and selector.comparison.max_lookback is None:
                    selector.comparison = selector.comparison.model_copy(
                        update={"max_lookback": config.max_lookback}
                    )
        self.grid = grid
        self.specs = candidate_specs(grid)
        first = config.warmup + 1
        if panel.n_periods < first:
            raise BacktestError(
                f"Panel has {panel.n_periods} periods; the first prediction is at period {first}",
                {"periods": panel.n_periods, "warmup": config.warmup},
            )
        self.periods = list(range(first, panel.n_periods + 1))

    def _splits(self, seed: int, t: int, cached: Optional[SplitPanel]) -> SplitPanel:
        if self.config.resplit == ResplitMode.ONCE:
            return cached
        return split(self.panel.truncate(t - 1), self.config.train_fraction, derive_seed(seed, t))

    def run_seed(self, seed: int, executor: Optional[Executor] = None) -> SeedRun:
        started = time.perf_counter()
        names = [s.name for s in self.selectors]
        predictions: Dict[str, List[np.ndarray]] = {name: [] for name in names}
        targets: List[np.ndarray] = []
        periods: List[np.ndarray] = []
        selections: List[PeriodSelection] = []
        traces: List[Dict[str, Any]] = []
        selector_excess: Dict[str, List[float]] = {name: [] for name in names}
        candidate_excess: List[List[float]] = []

        try:
            cached = split(self.panel, self.config.train_fraction, seed)
        except AtomsLabError as e:
            raise BacktestError(f"seed {seed}: {e.message}", {**e.details, "seed": seed}) from e

        for t in self.periods:
            log = get_logger_with_context(__name__, seed=seed, period=t)
            current = self.panel.batch(t)
            step = "candidate grid"
            try:
                splits = self._splits(seed, t, cached)
                candidates = build_candidate_grid(t, splits, self.grid, executor, self.specs)
                context = SelectionContext(
                    t=t,
                    candidates=candidates,
                    splits=splits,
                    grid=self.grid,
                    seed=seed,
                    executor=executor,
                    retain_traces=self.config.retain_traces,
                )
                chosen: Dict[str, FittedModel] = {}
                for selector in self.selectors:
                    step = selector.name
                    selection = selector.select(context)
                    model = selection.model
                    chosen[selector.name] = model
                    log.bind(selector=selector.name).debug(
                        f"Chose {model.spec.label} after {selection.duel_count} duels"
                    )
                    predictions[selector.name].append(model.predict(current.features))
                    selections.append(
                        PeriodSelection(
                            seed=seed,
                            period=t,
                            selector=selector.name,
                            candidate_index=selection.candidate_index,
                            label=model.spec.label,
                            family=model.spec.family.value,
                            hyperparameters=model.spec.hyperparameters,
                            window_exponent=model.spec.window_exponent,
                            effective_window=model.effective_window,
                            duel_count=selection.duel_count,
                            final_window=selection.final_window,
                        )
                    )
                    if selection.trace is not None:
                        traces.append({"seed": seed, "period": t, "selector": selector.name, "trace": selection.trace})
                if self.env is not None:
                    step = "excess risk"
                    risk_seed = derive_seed(seed, t)
                    samples = self.config.true_risk_samples
                    for name, model in chosen.items():
                        selector_excess[name].append(excess_risk(self.env, t, model, samples, risk_seed))
                    candidate_excess.append(
                        [excess_risk(self.env, t, c, samples, risk_seed) for c in candidates]
                    )
            except AtomsLabError as e:
                raise BacktestError(
                    f"seed {seed}, period {t}, {step}: {e.message}",
                    {**e.details, "seed": seed, "period": t, "selector": step, "cause": type(e).__name__},
                ) from e
            targets.append(current.targets)
            periods.append(np.full(current.size, t))
            log.debug(f"Period {t} done: " + ", ".join(f"{n}={chosen[n].spec.label}" for n in names))

        all_periods = np.concatenate(periods)
        all_targets = np.concatenate(targets)
        logs = {
            name: PredictionLog(name, all_periods, np.concatenate(predictions[name]), all_targets)
            for name in names
        }
        seconds = time.perf_counter() - started
        logger.info(f"Seed {seed} finished {len(self.periods)} periods in {seconds:.1f}s")
        return SeedRun(
            seed=seed,
            logs=logs,
            selections=selections,
            traces=traces,
            selector_excess=selector_excess if self.env is not None else {},
            candidate_excess=np.asarray(candidate_excess) if self.env is not None else None,
            seconds=seconds,
        )


def _safe(metric, *args) -> Optional[float]:
    try:
        return metric(*args)
    except DegenerateMetricError:
        return None


def _seed_mean(values: Sequence[Optional[float]]) -> Optional[float]:
    return mean_defined(list(values))


def _overall(runs: List[SeedRun], name: str) -> Dict[str, Optional[float]]:
    return {
        R2Metric.ZERO.value: _seed_mean([_safe(r2_zero, run.logs[name]) for run in runs]),
        R2Metric.STANDARD.value: _seed_mean([_safe(r2_standard, run.logs[name]) for run in runs]),
    }


def _annual(runs: List[SeedRun], name: str, labels: Dict[int, str]) -> Dict[str, Dict[str, Optional[float]]]:
    out: Dict[str, Dict[str, Optional[float]]] = {}
    for metric in (R2Metric.ZERO, R2Metric.STANDARD):
        per_seed = [annual_r2(run.logs[name], labels, metric) for run in runs]
        years = list(per_seed[0].keys())
        out[metric.value] = {year: _seed_mean([table[year] for table in per_seed]) for year in years}
    return out


def _wealth(runs: List[SeedRun], name: str) -> Optional[List[float]]:
    """Seed-averaged wealth curve, or None when the responses are not tradable returns."""
    curves = []
    for run in runs:
        try:
            curves.append(wealth_curve(run.logs[name])[1])
        except InvalidReturnError as e:
            logger.warning(f"No wealth curve for {name} (seed {run.seed}): {e.message}")
            return None
    return [float(v) for v in np.mean(curves, axis=0)]


def _synthetic(runs: List[SeedRun], names: List[str], specs_labels: List[str]) -> Dict[str, Any]:
    selector_means = {
        name: float(np.mean([np.mean(run.selector_excess[name]) for run in runs])) for name in names
    }
    candidate_means = np.mean([run.candidate_excess.mean(axis=0) for run in runs], axis=0)
    best = int(np.argmin(candidate_means))
    worst = int(np.argmax(candidate_means))
    return {
        "mean_excess_risk": selector_means,
        "hindsight_best": {"candidate": specs_labels[best], "mean_excess_risk": float(candidate_means[best])},
        "hindsight_worst": {"candidate": specs_labels[worst], "mean_excess_risk": float(candidate_means[worst])},
        "candidate_mean_excess_risk": {label: float(v) for label, v in zip(specs_labels, candidate_means)},
    }


def assemble(
    walk: WalkForward,
    runs: List[SeedRun],
    source: str = "",
) -> BacktestReport:
    """Aggregate per-seed runs into a report; seed order follows the configuration."""
    config = walk.config
    names = [s.name for s in walk.selectors]
    atoms = [s.name for s in walk.selectors if s.kind in ATOMS_KINDS]
    baselines = [s.name for s in walk.selectors if s.kind not in ATOMS_KINDS]
    labels = walk.panel.labels

    regimes = resolve_regimes(config.regimes, labels, walk.periods, config.use_nber_regimes)
    regime_metrics: Dict[str, Dict[str, Dict[str, Optional[float]]]] = {}
    for window in regimes:
        regime_metrics[window.label] = {
            name: {
                R2Metric.ZERO.value: _seed_mean([_safe(r2_zero, run.logs[name], window) for run in runs]),
                R2Metric.STANDARD.value: _seed_mean([_safe(r2_standard, run.logs[name], window) for run in runs]),
            }
            for name in names
        }

    wealth = {name: curve for name in names if (curve := _wealth(runs, name)) is not None}
    final = {name: curve[-1] for name, curve in wealth.items()}
    ratios = {
        a: {b: excess_ratio(final[a], final[b]) for b in baselines if b in final}
        for a in atoms
        if a in final
    }

    synthetic = None
    if walk.env is not None:
        synthetic = _synthetic(runs, names, [s.label for s in walk.specs])

    return BacktestReport(
        selectors=names,
        atoms_selectors=atoms,
        baseline_selectors=baselines,
        seeds=[run.seed for run in runs],
        periods=walk.periods,
        labels=dict(labels),
        seed_runs=runs,
        overall={name: _overall(runs, name) for name in names},
        annual={name: _annual(runs, name, labels) for name in names},
        regimes=regimes,
        regime_metrics=regime_metrics,
        wealth=wealth,
        final_wealth=final,
        excess_ratios=ratios,
        synthetic=synthetic,
        timing={
            "seconds_per_seed": {str(run.seed): run.seconds for run in runs},
            "seconds_total": float(sum(run.seconds for run in runs)),
        },
        source=source,
    )


def run(config: RunConfig, panel: Optional[Panel] = None, env: Optional[DriftEnv] = None) -> BacktestReport:
    """Run the walk-forward backtest described by config.

    A preloaded panel (and its environment, when synthetic) may be passed in to
    skip loading the configured data source.
    """
    source = "panel"
    if panel is None:
        panel, env, source = load_panel(config.data)
    walk = WalkForward(config, panel, env)
    workers = config.worker_count()
    logger.info(
        f"Backtest on {source}: T={panel.n_periods}, {len(walk.specs)} candidates, "
        f"{len(walk.selectors)} selectors, {len(config.seeds)} seeds, {workers} workers"
    )
    if config.max_lookback is not None:
        logger.info(f"Gap scans capped at {config.max_lookback} look-back periods")
    if any(s.kind == SelectorKind.FIXED_CV for s in walk.selectors):
        logger.info("Fixed-CV refits its chosen specification on all pooled data of its window")

    started = time.perf_counter()
    if workers <= 1:
        runs = [walk.run_seed(seed) for seed in config.seeds]
    else:
        outer = min(workers, len(config.seeds))
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="fit") as inner:
            with ThreadPoolExecutor(max_workers=outer, thread_name_prefix="seed") as seeds:
                runs = list(seeds.map(lambda s: walk.run_seed(s, inner), config.seeds))
    report = assemble(walk, runs, source)
    report.timing["wall_seconds"] = time.perf_counter() - started
    return report


@dataclass
class PortfolioReport:
    """Backtests of several panels with cross-asset averages."""

    reports: Dict[str, BacktestReport]
    average_overall: Dict[str, Dict[str, Optional[float]]]
    average_excess_ratios: Dict[str, Dict[str, float]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "assets": {name: {"overall": r.overall, "excess_ratios": r.excess_ratios} for name, r in self.reports.items()},
            "average_overall": self.average_overall,
            "average_excess_ratios": self.average_excess_ratios,
        }


def run_many(config: RunConfig, sources: Dict[str, DataSource]) -> PortfolioReport:
    """One backtest per named data source, plus equal-weight averages across them."""
    if not sources:
        raise BacktestError("run_many needs at least one data source")
    reports = {
        name: run(config.model_copy(update={"data": source})) for name, source in sources.items()
    }
    first = next(iter(reports.values()))
    average_overall = {
        selector: {
            metric: mean_defined([r.overall[selector][metric] for r in reports.values()])
            for metric in first.overall[selector]
        }
        for selector in first.selectors
    }
    average_ratios: Dict[str, Dict[str, float]] = {}
    for a in first.atoms_selectors:
        for b in first.baseline_selectors:
            ratios = [r.excess_ratios[a][b] for r in reports.values() if b in r.excess_ratios.get(a, {})]
            if len(ratios) < len(reports):
                logger.warning(f"Excess Ratio {a} vs {b} is averaged over {len(ratios)} of {len(reports)} assets")
            if ratios:
                average_ratios.setdefault(a, {})[b] = average_excess_ratio(ratios)
    return PortfolioReport(reports, average_overall, average_ratios)
