"""Command-line entry point.

    auv-sim run      --config scenario.json [--seed N] [--out DIR] [--format csv|json] [--db URL]
    auv-sim sweep    --config scenario.json --rho-c 0.375,0.5,0.75 [--out DIR] [--workers N] [--db URL]
    auv-sim sweep    --config scenario.json --d-bar 0,0.5,1 [--out DIR]
    auv-sim validate --config scenario.json
    auv-sim history  [--db URL] [--min-rho-c X] [--max-rho-c Y] [--completed|--failed]

Exit codes: 0 success, 1 configuration error, 2 run aborted, 3 plan not completed.
"""

import argparse
import asyncio
import csv
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

from app.config import DATABASE_URL, LOG_LEVEL, configure_logging
from app.database import get_session, init_db, make_engine
from app.mappers import RunMapper, ScenarioMapper
from app.models import Metrics, SweepTable
from app.schemas import ScenarioConfig
from app.services.archive_service import RunArchiveService
from app.services.scenario_io import ConfigError, load_config, write_log
from app.services.simulation_service import (
    SimulationAbortedError,
    compute_metrics,
    run_simulation,
    sweep_d_bar,
    sweep_rho_c,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ABORTED = 2
EXIT_INCOMPLETE = 3


async def _archive(url: str, items: list[tuple[ScenarioConfig, Metrics, Optional[str]]]) -> None:
    engine = make_engine(url)
    try:
        await init_db(engine)
        async for session in get_session(engine):
            service = RunArchiveService(session)
            for config, metrics, log_path in items:
                await service.archive(config, metrics, log_path)
    finally:
        await engine.dispose()


async def _history(url: str, min_rho_c, max_rho_c, completed) -> list[dict]:
    engine = make_engine(url)
    try:
        await init_db(engine)
        summaries: list[dict] = []
        async for session in get_session(engine):
            records = await RunArchiveService(session).history(min_rho_c, max_rho_c, completed)
            summaries = [RunMapper.to_summary(r) for r in records]
        return summaries
    finally:
        await engine.dispose()


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _metrics_json(metrics: Metrics) -> str:
    return json.dumps(asdict(metrics), indent=2)


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        config = ScenarioMapper.with_seed(config, args.seed)
    log_path = None
    out = Path(args.out) if args.out else None
    try:
        log, metrics = run_simulation(config)
    except SimulationAbortedError as exc:
        logger.error("Run aborted: %s", exc)
        if exc.log.rows:
            if out is not None:
                write_log(exc.log, out / f"run_seed{config.seed}_partial.{args.format}", args.format)
            print(_metrics_json(compute_metrics(exc.log, exc.plan)))
        return EXIT_ABORTED

    if out is not None:
        log_path = str(write_log(log, out / f"run_seed{config.seed}.{args.format}", args.format))
        (out / f"metrics_seed{config.seed}.json").write_text(_metrics_json(metrics), encoding="utf-8")
    print(_metrics_json(metrics))
    if args.db:
        asyncio.run(_archive(args.db, [(config, metrics, log_path)]))
    return EXIT_OK if metrics.completed else EXIT_INCOMPLETE


def _write_table(table: SweepTable, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow((table.parameter, "mean_surge", "max_cross_track_rms", "completed"))
        for row in table.rows:
            writer.writerow((repr(row.value), repr(row.mean_surge), repr(row.max_cross_track_rms), row.completed))


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    tables = []
    try:
        if args.rho_c:
            tables.append(sweep_rho_c(config, args.rho_c, workers=args.workers))
        if args.d_bar:
            tables.append(sweep_d_bar(config, args.d_bar, workers=args.workers))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    except SimulationAbortedError as exc:
        logger.error("Sweep aborted: %s", exc)
        return EXIT_ABORTED

    for table in tables:
        print(f"{table.parameter:>10} {'mean_surge':>12} {'max_xtrack':>12} completed")
        for row in table.rows:
            rms = f"{row.max_cross_track_rms:12.4f}" if row.max_cross_track_rms is not None else f"{'-':>12}"
            print(f"{row.value:10.4f} {row.mean_surge:12.4f} {rms} {row.completed}")
        if args.out:
            _write_table(table, Path(args.out) / f"sweep_{table.parameter}.csv")

    if args.db:
        items = []
        for table in tables:
            with_value = ScenarioMapper.with_rho_c if table.parameter == "rho_c" else ScenarioMapper.with_d_bar
            items.extend((with_value(config, row.value), row.metrics, None) for row in table.rows)
        asyncio.run(_archive(args.db, items))
    return EXIT_OK if all(t.comparable for t in tables) else EXIT_INCOMPLETE


def cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    print(f"{args.config}: ok ({len(config.guidance.waypoints)} waypoints, seed {config.seed})")
    return EXIT_OK


def cmd_history(args: argparse.Namespace) -> int:
    completed = True if args.completed else False if args.failed else None
    for summary in asyncio.run(_history(args.db, args.min_rho_c, args.max_rho_c, completed)):
        print(json.dumps(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auv-sim", description="3D LOS guidance + minimax MPC AUV simulator")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level (default from AUV_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one closed-loop scenario")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None, help="directory for the log and metrics")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--db", default=None, help="archive the run in this database URL")
    run.set_defaults(handler=cmd_run)

    sweep = sub.add_parser("sweep", help="repeat a scenario over parameter values")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--rho-c", type=_float_list, default=None)
    sweep.add_argument("--d-bar", type=_float_list, default=None)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--db", default=None)
    sweep.set_defaults(handler=cmd_sweep)

    validate = sub.add_parser("validate", help="check a scenario file")
    validate.add_argument("--config", required=True)
    validate.set_defaults(handler=cmd_validate)

    history = sub.add_parser("history", help="list archived runs")
    history.add_argument("--db", default=DATABASE_URL)
    history.add_argument("--min-rho-c", type=float, default=None)
    history.add_argument("--max-rho-c", type=float, default=None)
    flag = history.add_mutually_exclusive_group()
    flag.add_argument("--completed", action="store_true")
    flag.add_argument("--failed", action="store_true")
    history.set_defaults(handler=cmd_history)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and not (args.rho_c or args.d_bar):
        parser.error("sweep needs --rho-c and/or --d-bar")
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
