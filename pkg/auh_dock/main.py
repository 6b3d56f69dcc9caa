"""Entry point for the docking simulator command line."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from .config import RuntimeSettings, ScenarioConfig, dump_defaults, load_scenario
from .errors import ConfigError
from .plotting import render_trajectory
from .simulation import run, run_batch
from .trajectory_log import write_log, write_metrics

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _build_parser(settings: RuntimeSettings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auh_dock", description="Deterministic AUH docking simulator")
    parser.add_argument("--dump-defaults", action="store_true", help="print every scenario key with its default")
    commands = parser.add_subparsers(dest="command")

    run_cmd = commands.add_parser("run", help="simulate one seeded docking attempt")
    run_cmd.add_argument("--scenario", required=True)
    run_cmd.add_argument("--seed", type=int, default=None)
    run_cmd.add_argument("--out", default=settings.output_dir)
    run_cmd.add_argument("--max-duration", type=float, default=None)
    run_cmd.add_argument("--plot", action="store_true", help="also write trajectory.png")

    batch_cmd = commands.add_parser("batch", help="simulate seeds 1..N and report the success rate")
    batch_cmd.add_argument("--scenario", required=True)
    batch_cmd.add_argument("--seeds", type=int, required=True)
    batch_cmd.add_argument("--out", default=settings.output_dir)
    batch_cmd.add_argument("--workers", type=int, default=settings.workers)
    batch_cmd.add_argument("--max-duration", type=float, default=None)
    return parser


def _with_duration(config: ScenarioConfig, max_duration: Optional[float]) -> ScenarioConfig:
    if max_duration is None:
        return config
    if not max_duration > 0.0:
        raise ConfigError(f"--max-duration must be positive, got {max_duration}")
    return replace(config, timing=replace(config.timing, max_duration=max_duration))


def _run_command(args: argparse.Namespace) -> int:
    config = _with_duration(load_scenario(args.scenario), args.max_duration)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    records, metrics = run(config, args.seed)
    write_log(records, out_dir / "trajectory.csv")
    write_metrics(metrics, out_dir / "metrics.json")
    if args.plot:
        render_trajectory(records, out_dir / "trajectory.png", panel_depth=config.sds.depth)
    return EXIT_OK if metrics.docked else EXIT_FAILED


def _batch_command(args: argparse.Namespace) -> int:
    if args.seeds < 1:
        raise ConfigError(f"--seeds must be at least 1, got {args.seeds}")
    config = _with_duration(load_scenario(args.scenario), args.max_duration)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    seeds = list(range(1, args.seeds + 1))
    report = run_batch(config, seeds, workers=max(1, args.workers), out_dir=out_dir)
    summary = {
        "runs": report.runs,
        "successes": report.successes,
        "success_rate": report.success_rate,
        "success_floor": config.batch.success_floor,
        "outcomes": {str(m.seed): m.outcome for m in report.metrics},
        "total_times": {str(m.seed): m.total_time for m in report.metrics},
    }
    summary_path = out_dir / "batch_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    LOGGER.info(
        "Batch %s: %s/%s docked (floor %.2f)",
        args.scenario,
        report.successes,
        report.runs,
        config.batch.success_floor,
    )
    return EXIT_OK if report.meets(config.batch.success_floor) else EXIT_FAILED


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the requested command and return the exit code."""
    load_dotenv()
    settings = RuntimeSettings.load()
    logging.getLogger().setLevel(settings.log_level)

    parser = _build_parser(settings)
    args = parser.parse_args(list(argv) if argv is not None else None)

    if args.dump_defaults:
        sys.stdout.write(dump_defaults())
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        if args.command == "run":
            return _run_command(args)
        return _batch_command(args)
    except ConfigError as exc:
        LOGGER.error("Некорректная конфигурация: %s", exc)
        return EXIT_CONFIG


def main(argv: Optional[List[str]] = None) -> None:  # pragma: no cover - thin wrapper
    """Synchronously run the command line."""
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
    )
    try:
        sys.exit(run_cli(argv))
    except KeyboardInterrupt:
        LOGGER.info("Simulation stopped by user")
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":  # pragma: no cover
    main()
