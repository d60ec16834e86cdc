import dataclasses
import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.comparison import duel_mse
from src.config import ComparisonConfig, DataSource, DuelConfig, SelectorSettings, SynthSource, TradeoffConfig
from src.exceptions import BacktestError, ConfigurationError, ReportError
from src.harness import (
    WalkForward,
    complexity_table,
    emit,
    emit_portfolio,
    emit_tradeoff,
    render_summary,
    run,
    run_duel,
    run_many,
    run_tradeoff,
)
from src.model_zoo import fit_ridge
from src.models import SelectorKind
from src.panel import Panel, split
from src.seeding import derive_seed
from src.selectors import select
from src.synth import DriftEnv, generate
from src.templates import TemplateManager, format_number
from tests.conftest import ridge_only_grid, synth_run_config

GOLDEN_SCHEMA = Path(__file__).parent / "golden" / "report_schema.json"


@pytest.fixture
def quiet_env():
    """Small returns, so sign-trading wealth is defined."""
    return DriftEnv(eta=0.01, gamma=0.0, noise_sd=0.02, samples_per_period=8, seed=5)


@pytest.fixture
def report(drift_env):
    return run(synth_run_config(drift_env, 10, retain_traces=True))


class TestWalkForward:
    def test_logs_are_aligned_across_selectors(self, report):
        assert report.periods == list(range(3, 11))
        for seed_run in report.seed_runs:
            logs = list(seed_run.logs.values())
            assert len(logs) == 4
            for log in logs[1:]:
                np.testing.assert_array_equal(log.periods, logs[0].periods)
                np.testing.assert_array_equal(log.targets, logs[0].targets)
            assert logs[0].size == 8 * 10

    def test_one_selection_row_per_seed_period_and_selector(self, report):
        rows = [row for seed_run in report.seed_runs for row in seed_run.selections]
        assert len(rows) == 2 * 8 * 4
        atoms_rows = [row for row in rows if row.selector == "ATOMS"]
        assert all(row.duel_count >= 14 and row.candidate_index is not None for row in atoms_rows)
        assert all(row.candidate_index is None for row in rows if row.selector == "Fixed-CV")

    def test_metrics_payload(self, report):
        payload = report.to_dict()
        assert payload["selectors"] == ["ATOMS", "ATOMS-R2", "Fixed-val(3)", "Fixed-CV"]
        assert payload["evaluation"]["first_period"] == 3
        assert payload["evaluation"]["last_period"] == 10
        assert set(payload["overall"]["ATOMS"]) == {"zero", "standard"}
        assert set(payload["synthetic"]["mean_excess_risk"]) == set(payload["selectors"])
        best = payload["synthetic"]["hindsight_best"]["mean_excess_risk"]
        worst = payload["synthetic"]["hindsight_worst"]["mean_excess_risk"]
        assert 0.0 <= best <= worst
        assert sum(payload["selection_counts"]["ATOMS"].values()) == 16

    def test_singleton_grid_makes_selectors_agree(self, drift_env):
        selectors = [
            SelectorSettings(kind=SelectorKind.ATOMS_MSE),
            SelectorSettings(kind=SelectorKind.ATOMS_R2),
            SelectorSettings(kind=SelectorKind.FIXED_VAL, window=3),
        ]
        result = run(synth_run_config(drift_env, 8, grid=ridge_only_grid(windows=(1,)), selectors=selectors))
        for seed_run in result.seed_runs:
            logs = list(seed_run.logs.values())
            for log in logs[1:]:
                np.testing.assert_array_equal(log.predictions, logs[0].predictions)

    def test_future_responses_never_reach_predictions(self, drift_env):
        config = synth_run_config(drift_env, 10, seeds=[3])
        panel = generate(drift_env, 10)
        baseline = run(config, panel=panel)

        changed = panel.batch(6).with_targets(panel.batch(6).targets + 100.0)
        mutated = run(config, panel=panel.replace_batch(changed))

        for name in baseline.selectors:
            before = baseline.seed_runs[0].logs[name]
            after = mutated.seed_runs[0].logs[name]
            upto = before.periods <= 6
            np.testing.assert_array_equal(before.predictions[upto], after.predictions[upto])
            assert not np.array_equal(before.targets, after.targets)

    def test_threads_do_not_change_results(self, drift_env):
        serial = run(synth_run_config(drift_env, 8, threads=1))
        threaded = run(synth_run_config(drift_env, 8, threads=3))
        assert json.dumps(serial.to_dict(), sort_keys=True) == json.dumps(threaded.to_dict(), sort_keys=True)

    def test_per_period_resplit(self, drift_env):
        result = run(synth_run_config(drift_env, 8, resplit="per_period", seeds=[0]))
        assert result.periods == list(range(3, 9))

    def test_wealth_and_excess_ratios(self, quiet_env):
        result = run(synth_run_config(quiet_env, 8))
        assert set(result.final_wealth) == set(result.selectors)
        assert set(result.excess_ratios) == {"ATOMS", "ATOMS-R2"}
        assert set(result.excess_ratios["ATOMS"]) == {"Fixed-val(3)", "Fixed-CV"}
        assert all(len(curve) == len(result.periods) for curve in result.wealth.values())

    def test_ordinal_regime(self, drift_env):
        result = run(synth_run_config(drift_env, 10, regimes=[{"label": "late", "start": 7, "end": 99}]))
        assert [(w.label, w.start, w.end) for w in result.regimes] == [("late", 7, 10)]
        assert set(result.regime_metrics["late"]) == set(result.selectors)

    def test_panel_too_short(self, drift_env):
        config = synth_run_config(drift_env, 2)
        with pytest.raises(BacktestError):
            WalkForward(config, generate(drift_env, 2))

    def test_failures_carry_the_seed(self, drift_env):
        panel = Panel.from_arrays([1, 1, 2, 3, 3, 4, 4], np.arange(7.0), np.arange(7.0))
        with pytest.raises(BacktestError) as excinfo:
            run(synth_run_config(drift_env, 4, seeds=[4]), panel=panel)
        assert excinfo.value.details["seed"] == 4


class TestStepByStepReplay:
    def test_six_period_run_with_three_candidates(self, drift_env):
        seed = 3
        panel = generate(drift_env, 6)
        selectors = [
            SelectorSettings(kind=SelectorKind.ATOMS_MSE),
            SelectorSettings(kind=SelectorKind.FIXED_VAL, window=2),
        ]
        config = synth_run_config(drift_env, 6, grid=ridge_only_grid(), selectors=selectors, seeds=[seed])
        seed_run = run(config, panel=panel, env=drift_env).seed_runs[0]

        splits = split(panel, 0.8, seed)
        cfg = ComparisonConfig()
        rows = {(row.period, row.selector): row for row in seed_run.selections}
        atoms_predictions, fixed_predictions, targets = [], [], []
        for t in range(3, 7):
            models = []
            for k in (0, 1, 2):
                w = min(4**k, t - 1)
                features, y = splits.train_window(t - w, t - 1)
                models.append(fit_ridge(features, y, 1.0))

            _, trace = select(
                models,
                lambda pivot, challenger: duel_mse(models[pivot], models[challenger], splits, t, cfg, (pivot, challenger)),
                derive_seed(seed, t),
            )
            totals = []
            for model in models:
                total = 0.0
                for j in range(t - 2, t):
                    batch = splits.validation_batch(j)
                    total += float(np.sum((model.predict(batch.features) - batch.targets) ** 2))
                totals.append(total)
            fixed = int(np.argmin(totals))

            assert rows[(t, "ATOMS")].candidate_index == trace.winner
            assert rows[(t, "ATOMS")].duel_count == trace.total_comparisons
            assert rows[(t, "ATOMS")].final_window == trace.final_window
            assert rows[(t, "Fixed-val(2)")].candidate_index == fixed
            assert rows[(t, "Fixed-val(2)")].effective_window == min(4**fixed, t - 1)

            current = panel.batch(t)
            atoms_predictions.append(models[trace.winner].predict(current.features))
            fixed_predictions.append(models[fixed].predict(current.features))
            targets.append(current.targets)

        np.testing.assert_allclose(seed_run.logs["ATOMS"].predictions, np.concatenate(atoms_predictions), atol=1e-12)
        np.testing.assert_allclose(
            seed_run.logs["Fixed-val(2)"].predictions, np.concatenate(fixed_predictions), atol=1e-12
        )
        np.testing.assert_array_equal(seed_run.logs["ATOMS"].targets, np.concatenate(targets))
        np.testing.assert_array_equal(seed_run.logs["ATOMS"].periods, np.repeat(np.arange(3, 7), 10))


class TestReporting:
    def test_emit_writes_every_file(self, report, tmp_path):
        written = emit(report, tmp_path / "out")
        for name in (
            "metrics.json", "predictions.csv", "selections.csv", "wealth.csv",
            "annual_r2.csv", "timing.json", "traces.json", "summary.md",
            "overall_r2.svg", "annual_r2.svg", "annual_r2_box.svg",
        ):
            assert name in written
            assert (tmp_path / "out" / name).exists()
        metrics = json.loads((tmp_path / "out" / "metrics.json").read_text(encoding="utf-8"))
        assert "timing" not in metrics

    def test_metrics_file_is_reproducible(self, drift_env, tmp_path):
        config = synth_run_config(drift_env, 8)
        emit(run(config), tmp_path / "a", plots=False)
        emit(run(config), tmp_path / "b", plots=False)
        assert (tmp_path / "a" / "metrics.json").read_bytes() == (tmp_path / "b" / "metrics.json").read_bytes()

    def test_predictions_csv_layout(self, report, tmp_path):
        emit(report, tmp_path, plots=False)
        header = (tmp_path / "predictions.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "seed,period,label,selector,observation,prediction,y"

    def test_report_files_match_the_golden_schema(self, report, tmp_path):
        written = emit(report, tmp_path, plots=False)
        golden = json.loads(GOLDEN_SCHEMA.read_text(encoding="utf-8"))

        assert written == golden["files"]
        metrics = json.loads((tmp_path / "metrics.json").read_text(encoding="utf-8"))
        expected = golden["metrics"]
        assert sorted(metrics) == expected["keys"]
        assert sorted(metrics["evaluation"]) == expected["evaluation_keys"]
        for key, value in expected["evaluation"].items():
            assert metrics["evaluation"][key] == value
        for key in ("regimes", "seeds", "selectors", "source"):
            assert metrics[key] == expected[key]
        for name in expected["selectors"]:
            assert sorted(metrics["overall"][name]) == expected["overall_metrics"]
        assert sorted(metrics["synthetic"]) == expected["synthetic_keys"]

        for name, header in golden["csv_headers"].items():
            assert list(pd.read_csv(tmp_path / name).columns) == header
        for name, rows in golden["csv_rows"].items():
            assert len(pd.read_csv(tmp_path / name)) == rows

    def test_emitting_twice_into_one_directory_rewrites_identical_bytes(self, report, tmp_path):
        first = emit(report, tmp_path)
        before = {name: (tmp_path / name).read_bytes() for name in first}
        second = emit(report, tmp_path)

        assert second == first
        assert sorted(p.name for p in tmp_path.iterdir()) == sorted(first)
        for name in second:
            assert (tmp_path / name).read_bytes() == before[name]

    def test_no_selectors(self, report, tmp_path):
        with pytest.raises(ReportError):
            emit(dataclasses.replace(report, selectors=[]), tmp_path)

    def test_summary_lists_selectors(self, report):
        text = render_summary(report)
        assert text.startswith("# Backtest summary")
        for name in report.selectors:
            assert f"| {name} |" in text
        assert "Hindsight-best candidate" in text

    def test_template_manager(self):
        assert "backtest_summary.md.j2" in TemplateManager().get_all_template_ids()
        assert format_number(None) == "n/a"
        assert format_number(0.123456, 3) == "0.123"


class TestPortfolio:
    def test_run_many_averages_over_assets(self, quiet_env, tmp_path):
        sources = {
            "a": DataSource(synth=SynthSource(env=quiet_env, periods=6)),
            "b": DataSource(synth=SynthSource(env=quiet_env.model_copy(update={"seed": 6}), periods=6)),
        }
        selectors = [SelectorSettings(kind=SelectorKind.ATOMS_MSE), SelectorSettings(kind=SelectorKind.FIXED_VAL, window=2)]
        portfolio = run_many(synth_run_config(quiet_env, 6, selectors=selectors, seeds=[0]), sources)

        assert set(portfolio.reports) == {"a", "b"}
        expected = np.mean([r.excess_ratios["ATOMS"]["Fixed-val(2)"] for r in portfolio.reports.values()])
        assert portfolio.average_excess_ratios["ATOMS"]["Fixed-val(2)"] == pytest.approx(expected)

        written = emit_portfolio(portfolio, tmp_path, plots=False)
        assert "portfolio.json" in written and "a/metrics.json" in written

    def test_run_many_needs_sources(self, quiet_env):
        with pytest.raises(BacktestError):
            run_many(synth_run_config(quiet_env, 6), {})


class TestTradeoff:
    def test_dominance_counts_cover_every_panel(self, drift_env, tmp_path):
        panels = {
            "first": generate(drift_env, 8),
            "second": generate(drift_env.model_copy(update={"seed": 12}), 8),
        }
        config = TradeoffConfig(seeds=[0], recent_window=2, forest_n_tree=2, forest_max_depth=2)
        result = run_tradeoff(panels, config)

        assert len(result.models) == 3
        assert set(result.annual) == {"first", "second"}
        assert sum(result.dominance["1"].values()) == 2
        assert emit_tradeoff(result, tmp_path) == ["tradeoff.json", "tradeoff_annual.csv"]

    def test_panel_shorter_than_warmup(self, drift_env):
        with pytest.raises(BacktestError):
            run_tradeoff({"tiny": generate(drift_env, 2)}, TradeoffConfig(seeds=[0]))


class TestExperiments:
    def duel_config(self, drift_env, **overrides):
        settings = dict(
            data=DataSource(synth=SynthSource(env=drift_env, periods=10)),
            f1="ridge:alpha=1,k=1",
            f2="forest:n=3,depth=2",
            t=8,
        )
        settings.update(overrides)
        return DuelConfig(**settings)

    def test_duel_keeps_the_full_scan(self, drift_env):
        t, outcome = run_duel(self.duel_config(drift_env))
        assert t == 8
        assert [row.ell for row in outcome.scan] == list(range(1, 8))
        assert {outcome.winner, outcome.loser} == {1, 2}

    def test_duel_defaults_to_the_last_period(self, drift_env):
        t, _ = run_duel(self.duel_config(drift_env, t=None, r2=True))
        assert t == 10

    def test_duel_period_out_of_range(self, drift_env):
        with pytest.raises(ConfigurationError):
            run_duel(self.duel_config(drift_env, t=12))

    def test_duel_needs_two_specs(self, drift_env):
        with pytest.raises(ConfigurationError):
            run_duel(self.duel_config(drift_env, f2=None))

    def test_complexity_table(self):
        assert complexity_table([1, 2], trials=10) == {1: 0.0, 2: 1.0}
