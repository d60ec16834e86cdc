from concurrent.futures import ThreadPoolExecutor

import pytest

from src.config import SelectorSettings
from src.exceptions import ConfigurationError, EmptyDataError
from src.model_zoo import build_candidate_grid
from src.models import SelectorKind
from src.panel import split
from src.selectors import AtomsSelector, SelectionContext, measure_complexity, noiseless_duel, select
from tests.conftest import ridge_only_grid, small_grid


class RecordingDuel:
    def __init__(self, losses):
        self.calls = []
        self.inner = noiseless_duel(losses)

    def __call__(self, pivot, challenger):
        self.calls.append((pivot, challenger))
        return self.inner(pivot, challenger)


class TestTournament:
    def test_single_candidate_needs_no_duel(self):
        chosen, trace = select(["only"], noiseless_duel([1.0]), seed=0)
        assert chosen == "only"
        assert trace.total_comparisons == 0
        assert trace.rounds == ()

    def test_two_candidates_play_once_with_the_pivot_first(self):
        duel = RecordingDuel([2.0, 1.0])
        chosen, trace = select(["a", "b"], duel, seed=4)

        assert chosen == "b"
        assert trace.total_comparisons == 1
        assert duel.calls == [(trace.rounds[0].pivot, trace.rounds[0].challengers[0])]

    def test_noiseless_duel_finds_the_best(self):
        for seed in range(200):
            chosen, _ = select(["x", "y", "z"], noiseless_duel([3.0, 1.0, 2.0]), seed)
            assert chosen == "y"

    def test_trace_accounts_for_every_duel(self):
        losses = [5.0, 3.0, 8.0, 1.0, 4.0, 2.0, 7.0]
        duel = RecordingDuel(losses)
        _, trace = select(list(range(7)), duel, seed=12)

        assert trace.total_comparisons == len(duel.calls) == sum(len(r.outcomes) for r in trace.rounds)
        assert trace.winner == 3
        for round_ in trace.rounds:
            assert round_.pivot not in round_.challengers
            for challenger, outcome in zip(round_.challengers, round_.outcomes):
                assert outcome.winner in (round_.pivot, challenger)

    def test_eliminated_candidates_lost_or_pivoted(self):
        losses = [4.0, 1.0, 6.0, 2.0, 5.0, 3.0]
        _, trace = select(list(range(6)), noiseless_duel(losses), seed=3)
        remaining = set(range(6))
        for round_ in trace.rounds:
            survivors = set(round_.survivors)
            advancing = survivors or {round_.pivot}
            for gone in remaining - advancing:
                lost = any(o.loser == gone for o in round_.outcomes)
                assert lost or (gone == round_.pivot and survivors)
            remaining = advancing
        assert remaining == {trace.winner}

    def test_same_seed_same_trace(self):
        losses = [float(i % 5) for i in range(20)]
        first = select(list(range(20)), noiseless_duel(losses), seed=99)[1]
        second = select(list(range(20)), noiseless_duel(losses), seed=99)[1]
        assert first == second

    def test_executor_matches_serial(self):
        losses = [0.5, 0.1, 0.9, 0.3, 0.7, 0.2]
        serial = select(list(range(6)), noiseless_duel(losses), seed=8)[1]
        with ThreadPoolExecutor(max_workers=3) as pool:
            parallel = select(list(range(6)), noiseless_duel(losses), seed=8, executor=pool)[1]
        assert serial == parallel

    def test_no_candidates(self):
        with pytest.raises(EmptyDataError):
            select([], noiseless_duel([]), seed=0)


class TestComplexity:
    def test_small_counts(self):
        assert measure_complexity(1, trials=10) == 0.0
        assert measure_complexity(2, trials=10) == 1.0

    def test_at_least_linear(self):
        assert measure_complexity(10, trials=50) >= 9

    @pytest.mark.parametrize("n,trials", [(0, 10), (3, 0)])
    def test_invalid_arguments(self, n, trials):
        with pytest.raises(ConfigurationError):
            measure_complexity(n, trials)


class TestAtomsSelector:
    @pytest.mark.parametrize("kind", [SelectorKind.ATOMS_MSE, SelectorKind.ATOMS_R2])
    def test_selects_a_grid_member(self, small_panel, kind):
        splits = split(small_panel, 0.8, seed=1)
        grid = small_grid()
        candidates = build_candidate_grid(8, splits, grid)
        context = SelectionContext(t=8, candidates=candidates, splits=splits, grid=grid, seed=1, retain_traces=True)

        selection = AtomsSelector(SelectorSettings(kind=kind)).select(context)

        assert selection.model is candidates[selection.candidate_index]
        assert selection.duel_count >= len(candidates) - 1
        assert selection.trace["winner_label"] == selection.model.spec.label
        assert 1 <= selection.final_window <= 7

    def test_selection_is_reproducible(self, small_panel):
        splits = split(small_panel, 0.8, seed=2)
        grid = small_grid()
        candidates = build_candidate_grid(10, splits, grid)
        selector = AtomsSelector(SelectorSettings(kind=SelectorKind.ATOMS_MSE))
        picks = {
            selector.select(SelectionContext(t=10, candidates=candidates, splits=splits, grid=grid, seed=5)).candidate_index
            for _ in range(3)
        }
        assert len(picks) == 1

    def test_singleton_grid(self, small_panel):
        splits = split(small_panel, 0.8, seed=0)
        grid = ridge_only_grid(windows=(1,))
        candidates = build_candidate_grid(5, splits, grid)
        context = SelectionContext(t=5, candidates=candidates, splits=splits, grid=grid, seed=0)

        selection = AtomsSelector(SelectorSettings(kind=SelectorKind.ATOMS_MSE)).select(context)

        assert selection.candidate_index == 0
        assert selection.duel_count == 0
        assert selection.final_window is None
