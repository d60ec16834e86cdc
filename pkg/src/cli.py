"""
Command-line interface.

    backtest    walk-forward backtest from a run configuration
    simulate    draw a panel from a synthetic drift environment
    duel        compare two specifications at one period and print the gap scan
    complexity  mean tournament comparisons for several candidate counts
    tradeoff    fixed-model window/complexity comparison over CSV panels
    serve       run the HTTP API
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

from pydantic import ValidationError

from .comparison import rows_to_csv, rows_to_frame
from .config import CsvSource, DataSource, DuelConfig, RunConfig, SynthSource, TradeoffConfig, config
from .exceptions import AtomsLabError, ConfigurationError
from .harness import complexity_table, emit, emit_portfolio, emit_tradeoff, run, run_duel, run_many, run_tradeoff
from .logging_config import setup_logging
from .panel import CsvSchema, Panel, load_csv, save_csv
from .synth import generate

logger = logging.getLogger(__name__)


def _named_path(value: str) -> Tuple[str, str]:
    name, sep, path = value.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got '{value}'")
    return name, path


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read '{path}': {e}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atoms-lab", description="Adaptive tournament model selection under drift")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    backtest = sub.add_parser("backtest", help="Run a walk-forward backtest")
    backtest.add_argument("--config", required=True, help="Run configuration JSON")
    backtest.add_argument("--seed", type=int, nargs="+", help="Override the seed list")
    backtest.add_argument("--out", help="Override the output directory")
    backtest.add_argument("--max-lookback", type=int, help="Cap the gap scan look-back")
    backtest.add_argument("--threads", type=int, help="Worker threads (0 = one per CPU)")
    backtest.add_argument(
        "--panel",
        dest="panels",
        type=_named_path,
        action="append",
        metavar="NAME=CSV",
        help="Run one backtest per CSV panel and average across them (repeatable)",
    )
    backtest.add_argument("--no-plots", action="store_true", help="Skip plot files")

    simulate = sub.add_parser("simulate", help="Draw a synthetic panel")
    simulate.add_argument("--env", required=True, help="Environment JSON, bare or as {\"env\": ..., \"periods\": ...}")
    simulate.add_argument("--periods", type=int, help="Number of periods T")
    simulate.add_argument("--seed", type=int, help="Override the environment seed")
    simulate.add_argument("--out", required=True, help="Output CSV path")

    duel = sub.add_parser("duel", help="Duel two specifications and print the gap scan")
    duel.add_argument("--config", required=True, help="Duel configuration JSON")
    duel.add_argument("--f1", help="First specification, e.g. ridge:alpha=1,k=2")
    duel.add_argument("--f2", help="Second specification, e.g. forest:n=10,depth=5")
    duel.add_argument("--t", type=int, help="Period to compare at")
    duel.add_argument("--seed", type=int, help="Split seed")
    duel.add_argument("--r2", action="store_true", help="Compare in R²")
    duel.add_argument("--max-lookback", type=int, help="Cap the gap scan look-back")
    duel.add_argument("--out", help="Also write the scan table as CSV")

    complexity = sub.add_parser("complexity", help="Measure tournament comparisons per candidate count")
    complexity.add_argument("--lambda-list", type=int, nargs="+", required=True, help="Candidate counts Λ")
    complexity.add_argument("--trials", type=int, default=200)
    complexity.add_argument("--seed", type=int, default=0)
    complexity.add_argument("--out", help="Also write the table as JSON")

    tradeoff = sub.add_parser("tradeoff", help="Window length against model complexity")
    tradeoff.add_argument(
        "--panel", dest="panels", type=_named_path, action="append", required=True, metavar="NAME=CSV"
    )
    tradeoff.add_argument("--config", help="Tradeoff configuration JSON")
    tradeoff.add_argument("--seed", type=int, nargs="+", help="Override the seed list")
    tradeoff.add_argument("--out", default="outputs/tradeoff")

    serve = sub.add_parser("serve", help="Run the HTTP API")
    serve.add_argument("--host", default=config.service.host)
    serve.add_argument("--port", type=int, default=config.service.port)
    serve.add_argument("--reload", action="store_true")

    return parser


def cmd_backtest(args: argparse.Namespace) -> int:
    run_config = RunConfig.from_json_file(args.config)
    overrides = {}
    if args.seed:
        overrides["seeds"] = args.seed
    if args.out:
        overrides["output_dir"] = args.out
    if args.max_lookback is not None:
        overrides["max_lookback"] = args.max_lookback
    if args.threads is not None:
        overrides["threads"] = args.threads
    if overrides:
        run_config = RunConfig.from_dict({**run_config.model_dump(by_alias=True), **overrides})

    if args.panels:
        schema = run_config.data.csv.csv_schema if run_config.data.csv is not None else CsvSchema()
        sources: Dict[str, DataSource] = {
            name: DataSource(csv=CsvSource(path=path, schema=schema))
            for name, path in args.panels
        }
        written = emit_portfolio(run_many(run_config, sources), run_config.output_dir, plots=not args.no_plots)
    else:
        written = emit(run(run_config), run_config.output_dir, plots=not args.no_plots)
    print(f"Wrote {len(written)} files to {run_config.output_dir}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    raw = _read_json(args.env)
    if "env" not in raw:
        raw = {"env": raw, "periods": args.periods}
    elif args.periods is not None:
        raw["periods"] = args.periods
    if args.seed is not None:
        raw["env"] = {**raw["env"], "seed": args.seed}
    try:
        source = SynthSource.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError("Invalid environment", {"errors": e.errors(include_url=False, include_context=False)})

    panel = generate(source.env, source.periods)
    save_csv(panel, args.out)
    print(f"Wrote {panel.n_periods} periods, {panel.n_observations} observations to {args.out}")
    return 0


def cmd_duel(args: argparse.Namespace) -> int:
    duel_config = DuelConfig.from_json_file(args.config)
    updates = {}
    if args.t is not None:
        updates["t"] = args.t
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.r2:
        updates["r2"] = True
    duel_config = duel_config.model_copy(update=updates)
    if args.max_lookback is not None:
        comparison = duel_config.effective_comparison.model_copy(update={"max_lookback": args.max_lookback})
        duel_config = duel_config.model_copy(update={"comparison": comparison})

    t, outcome = run_duel(duel_config, args.f1, args.f2)
    print(rows_to_frame(outcome.scan).to_string(index=False))
    print(
        f"t={t} winner=f{outcome.winner} chosen_window={outcome.chosen_window} "
        f"delta_hat={outcome.delta_hat_at_choice:.6g}"
    )
    if args.out:
        rows_to_csv(outcome.scan, args.out)
    return 0


def cmd_complexity(args: argparse.Namespace) -> int:
    table = complexity_table(args.lambda_list, args.trials, args.seed)
    print("lambda,mean_comparisons")
    for n, mean in table.items():
        print(f"{n},{mean:.6g}")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(
            json.dumps({"trials": args.trials, "mean_comparisons": table}, indent=2), encoding="utf-8"
        )
    return 0


def cmd_tradeoff(args: argparse.Namespace) -> int:
    tradeoff_config = TradeoffConfig()
    if args.config:
        try:
            tradeoff_config = TradeoffConfig.model_validate(_read_json(args.config))
        except ValidationError as e:
            raise ConfigurationError(
                "Invalid tradeoff config", {"errors": e.errors(include_url=False, include_context=False)}
            )
    if args.seed:
        tradeoff_config = tradeoff_config.model_copy(update={"seeds": args.seed})

    panels: Dict[str, Panel] = {name: load_csv(path) for name, path in args.panels}
    written = emit_tradeoff(run_tradeoff(panels, tradeoff_config), args.out)
    print(f"Wrote {len(written)} files to {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("src.app:app", host=args.host, port=args.port, reload=args.reload, log_level="info")
    return 0


COMMANDS = {
    "backtest": cmd_backtest,
    "simulate": cmd_simulate,
    "duel": cmd_duel,
    "complexity": cmd_complexity,
    "tradeoff": cmd_tradeoff,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)

    logging_settings = config.logging
    if args.log_level:
        logging_settings = logging_settings.model_copy(update={"level": args.log_level})
    setup_logging(logging_settings)

    try:
        return COMMANDS[args.command](args)
    except AtomsLabError as e:
        print(f"error: {type(e).__name__}: {e.message}", file=sys.stderr)
        logger.debug(f"{type(e).__name__} details: {e.details}")
        return 1
