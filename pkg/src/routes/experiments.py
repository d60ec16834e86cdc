from typing import Any, Dict, List

from fastapi import APIRouter
from pydantic import BaseModel, Field

from ..config import DuelConfig, RunConfig
from ..harness import complexity_table, run, run_duel
from ..logging_config import get_logger
from ..models import ComplexityResponse, GapScanTable, PanelSummary
from ..panel import panel_frame
from ..synth import DriftEnv, generate

logger = get_logger(__name__)

router = APIRouter(prefix="/experiments", tags=["experiments"])


class SimulateRequest(BaseModel):
    """Request model for drawing a synthetic panel."""

    env: DriftEnv
    periods: int = Field(..., ge=1, le=100_000)
    include_csv: bool = Field(default=False, description="Return the panel in the standard CSV layout")


class ComplexityRequest(BaseModel):
    """Request model for the tournament complexity measurement."""

    lambdas: List[int] = Field(..., min_length=1, description="Candidate counts Λ")
    trials: int = Field(default=200, ge=1, le=100_000)
    seed: int = Field(default=0, ge=0)


@router.post("/simulate", response_model=PanelSummary)
def simulate(request: SimulateRequest):
    """Draw a panel from a drift environment."""
    panel = generate(request.env, request.periods)
    csv = panel_frame(panel).to_csv(index=False) if request.include_csv else None
    return PanelSummary(
        periods=panel.n_periods,
        dimension=panel.dimension,
        observations=panel.n_observations,
        csv=csv,
    )


@router.post("/duel", response_model=GapScanTable)
def duel(request: DuelConfig):
    """Duel two specifications and return the full gap scan."""
    t, outcome = run_duel(request)
    return GapScanTable(
        t=t,
        winner=outcome.winner,
        loser=outcome.loser,
        chosen_window=outcome.chosen_window,
        delta_hat_at_choice=outcome.delta_hat_at_choice,
        rows=[row.to_dict() for row in outcome.scan],
    )


@router.post("/complexity", response_model=ComplexityResponse)
def complexity(request: ComplexityRequest):
    """Mean number of duels per tournament for each Λ."""
    table = complexity_table(request.lambdas, request.trials, request.seed)
    return ComplexityResponse(trials=request.trials, mean_comparisons=table)


@router.post("/backtest")
def backtest(request: RunConfig) -> Dict[str, Any]:
    """Run a walk-forward backtest and return the report without writing files."""
    report = run(request)
    logger.info(f"Backtest over {len(report.periods)} periods and {len(report.seeds)} seeds finished")
    return report.to_dict()
