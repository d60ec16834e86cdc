"""
Adaptive tournament model selection.

Each round draws a pivot uniformly at random from the remaining set S and
duels it, as f1, against every other member. The challengers that beat the
pivot form the next S; if none does, the pivot is returned. The pivot never
advances to the next round.
"""

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..comparison import DuelOutcome, LossDifferenceStream, duel_stream, duel_stream_r2
from ..config import SelectorSettings
from ..exceptions import ConfigurationError, EmptyDataError
from ..logging_config import LoggerMixin
from ..models import SelectorKind
from ..seeding import PIVOT_STREAM, derive_seed, substream
from .base_selector import BaseSelector, Selection, SelectionContext

# duel(pivot_index, challenger_index) with the pivot as f1
Duel = Callable[[int, int], DuelOutcome]


@dataclass(frozen=True)
class SelectionRound:
    pivot: int
    challengers: Tuple[int, ...]
    outcomes: Tuple[DuelOutcome, ...]

    @property
    def survivors(self) -> Tuple[int, ...]:
        return tuple(c for c, o in zip(self.challengers, self.outcomes) if o.winner == c)


@dataclass(frozen=True)
class SelectionTrace:
    """Audit record of one tournament."""

    rounds: Tuple[SelectionRound, ...]
    winner: int
    total_comparisons: int
    rng_seed: int

    @property
    def final_window(self) -> Optional[int]:
        """ℓ̂ of the last duel played, if any."""
        for round_ in reversed(self.rounds):
            if round_.outcomes:
                return round_.outcomes[-1].chosen_window
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "winner": self.winner,
            "total_comparisons": self.total_comparisons,
            "rng_seed": self.rng_seed,
            "rounds": [
                {
                    "pivot": r.pivot,
                    "challengers": list(r.challengers),
                    "duels": [o.to_dict() for o in r.outcomes],
                }
                for r in self.rounds
            ],
        }


def select(
    candidates: Sequence[Any],
    duel: Duel,
    seed: int,
    executor: Optional[Executor] = None,
) -> Tuple[Any, SelectionTrace]:
    """Run the tournament over candidate indices 0..Λ-1 and return the survivor."""
    if not candidates:
        raise EmptyDataError("The tournament needs at least one candidate")
    rng = substream(seed, PIVOT_STREAM)
    remaining: List[int] = list(range(len(candidates)))
    rounds: List[SelectionRound] = []
    comparisons = 0

    while len(remaining) > 1:
        pivot = remaining[int(rng.integers(len(remaining)))]
        challengers = tuple(c for c in remaining if c != pivot)
        if executor is None:
            outcomes = tuple(duel(pivot, c) for c in challengers)
        else:
            outcomes = tuple(executor.map(lambda c: duel(pivot, c), challengers))
        comparisons += len(outcomes)
        round_ = SelectionRound(pivot, challengers, outcomes)
        rounds.append(round_)
        if not round_.survivors:
            remaining = [pivot]
            break
        remaining = list(round_.survivors)

    winner = remaining[0]
    trace = SelectionTrace(tuple(rounds), winner, comparisons, seed)
    return candidates[winner], trace


def noiseless_duel(losses: Sequence[float]) -> Duel:
    """A duel that always prefers the strictly smaller loss, keeping the pivot on ties."""

    def duel(pivot: int, challenger: int) -> DuelOutcome:
        if losses[challenger] < losses[pivot]:
            return DuelOutcome(challenger, pivot, 1, float(losses[challenger] - losses[pivot]))
        return DuelOutcome(pivot, challenger, 1, float(losses[pivot] - losses[challenger]))

    return duel


def measure_complexity(n_candidates: int, trials: int, seed: int = 0) -> float:
    """Mean number of duels the tournament plays over Λ candidates under a noiseless duel."""
    if n_candidates < 1:
        raise ConfigurationError(f"Λ must be at least 1, got {n_candidates}")
    if trials < 1:
        raise ConfigurationError(f"trials must be at least 1, got {trials}")
    candidates = list(range(n_candidates))
    duel = noiseless_duel([float(i) for i in candidates])
    total = 0
    for trial in range(trials):
        _, trace = select(candidates, duel, derive_seed(seed, trial))
        total += trace.total_comparisons
    return total / trials


class AtomsSelector(BaseSelector, LoggerMixin):
    """Tournament over the full candidate grid with MSE or R² duels."""

    def __init__(self, settings: SelectorSettings):
        metric = "R²" if settings.kind == SelectorKind.ATOMS_R2 else "MSE"
        super().__init__(settings, f"Adaptive tournament with rolling-window {metric} duels")
        self.comparison = settings.effective_comparison

    def _duel(self, context: SelectionContext) -> Duel:
        losses = context.losses
        n_candidates = len(context.candidates)
        keep = context.retain_traces
        use_r2 = self.kind == SelectorKind.ATOMS_R2

        def duel(pivot: int, challenger: int) -> DuelOutcome:
            stream = LossDifferenceStream.from_losses(losses[pivot], losses[challenger])
            if use_r2:
                return duel_stream_r2(
                    stream, losses.second_moments, self.comparison, (pivot, challenger), keep, n_candidates
                )
            return duel_stream(stream, self.comparison, (pivot, challenger), keep, n_candidates)

        return duel

    def select(self, context: SelectionContext) -> Selection:
        pivot_seed = derive_seed(context.seed, context.t)
        model, trace = select(context.candidates, self._duel(context), pivot_seed, context.executor)
        self.logger.debug(
            f"{self.name} at t={context.t}: {model.spec.label} after {trace.total_comparisons} duels"
        )
        trace_dict = None
        if context.retain_traces:
            trace_dict = trace.to_dict()
            trace_dict["winner_label"] = model.spec.label
        return Selection(
            selector=self.name,
            model=model,
            candidate_index=trace.winner,
            duel_count=trace.total_comparisons,
            final_window=trace.final_window,
            trace=trace_dict,
        )
