"""
Shared flags, configuration loading and report emission for all subcommands
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict

from thftcalc.core.config import settings
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.experiment import ExperimentConfig, Selection
from thftcalc.services import report_service

logger = logging.getLogger(__name__)


def experiment_flags() -> argparse.ArgumentParser:
    """Parent parser holding the flags every experiment subcommand accepts"""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="Path to an experiment configuration JSON file")
    parent.add_argument("--jobs", type=int, help="Worker threads for quadrature")
    parent.add_argument("--out", help="Write the report into this directory")
    parent.add_argument("--seed", type=int, help="Seed for Monte-Carlo paths")
    parent.add_argument(
        "--format",
        choices=[report_service.FORMAT_JSON, report_service.FORMAT_CSV],
        default=report_service.FORMAT_JSON,
        help="json writes <command>.json; csv also writes ladder.csv",
    )
    parent.add_argument("--preset", help="Theory preset fixing (m, n)")
    parent.add_argument("-m", type=int, help="Topological directions")
    parent.add_argument("-n", type=int, help="Holomorphic directions")
    parent.add_argument("-k", type=int, help="Vertex count")
    return parent


def load_raw_config(path: str) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def load_config(args: argparse.Namespace, overrides: Dict[str, Any] = None) -> ExperimentConfig:
    """
    Merge the config file, explicit flags and command-specific overrides

    Flags override file fields; pydantic validation runs last.
    """
    data = load_raw_config(args.config) if args.config else {}
    flags = {"preset": args.preset, "m": args.m, "n": args.n, "k": args.k, "seed": args.seed}
    for key, value in flags.items():
        if value is not None:
            data[key] = value
    if args.out is not None:
        data["output_dir"] = args.out
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    config = ExperimentConfig.model_validate(data)
    logger.debug(f"Loaded config for {config.signature}")
    return config


def jobs_of(args: argparse.Namespace) -> int:
    return args.jobs or settings.jobs


def require_selection(config: ExperimentConfig, expected: Selection, command: str) -> None:
    if config.selection is not None and config.selection != expected:
        raise ConfigError(
            f"config selects the {config.selection.value} family, {command} evaluates {expected.value}"
        )


def emit(command: str, config: ExperimentConfig, payload: Dict[str, Any], args: argparse.Namespace) -> None:
    """Print the report on stdout and write it when an output directory is set"""
    envelope = report_service.build_envelope(command, config, payload)
    sys.stdout.write(report_service.render_json(envelope.model_dump(mode="json")))
    if config.output_dir is not None:
        report_service.write_report(envelope, config.output_dir, args.format)
