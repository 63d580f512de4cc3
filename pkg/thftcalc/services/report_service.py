"""
Report service - deterministic JSON envelopes, CSV ladders and offline checks
"""

import csv
import hashlib
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel

from thftcalc.core.config import settings
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.experiment import ExperimentConfig
from thftcalc.schemas.report import ConvergenceReport, DoubleLimitReport, ReportEnvelope, Verdict
from thftcalc.utils.extrapolation import assess_ladder

logger = logging.getLogger(__name__)

TOOL_NAME = "thftcalc"
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
LADDER_CSV = "ladder.csv"


def canonical_json(data: Any) -> str:
    """Compact, key-sorted JSON used for hashing"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def render_json(data: Any) -> str:
    """Key-sorted, indented JSON with fixed separators and a trailing newline"""
    return json.dumps(data, sort_keys=True, indent=2, separators=(",", ": "), ensure_ascii=True) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    """sha256 over the canonical JSON of the validated configuration"""
    payload = canonical_json(config.model_dump(mode="json"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def tolerances(config: ExperimentConfig) -> Dict[str, float]:
    ladder = config.ladder
    return {
        "quad_rtol": ladder.quad_rtol,
        "quad_atol": ladder.quad_atol,
        "ladder_tolerance": ladder.tolerance,
        "outer_tolerance": ladder.outer_tolerance,
        "kernel_rtol": settings.kernel_rtol,
    }


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def build_envelope(command: str, config: ExperimentConfig, payload: Dict[str, Any]) -> ReportEnvelope:
    return ReportEnvelope(
        tool=TOOL_NAME,
        version=settings.version,
        command=command,
        config_hash=config_hash(config),
        tolerances=tolerances(config),
        payload=_plain(payload),
    )


def iter_ladders(data: Any, path: str = "payload") -> Iterator[Tuple[str, List[Dict[str, float]]]]:
    """Every ladder-shaped list of {epsilon, value} points with its JSON path"""
    if isinstance(data, dict):
        for key in sorted(data):
            value = data[key]
            child = f"{path}.{key}"
            if (
                key == "ladder"
                and isinstance(value, list)
                and all(isinstance(p, dict) and set(p) == {"epsilon", "value"} for p in value)
            ):
                yield child, value
            else:
                yield from iter_ladders(value, child)
    elif isinstance(data, list):
        for idx, item in enumerate(data):
            yield from iter_ladders(item, f"{path}[{idx}]")


def write_ladder_csv(envelope: ReportEnvelope, path: Path) -> Path:
    """RFC 4180 CSV of every ladder point in the payload"""
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(["series", "epsilon", "value"])
        for series, points in iter_ladders(envelope.payload):
            for point in points:
                writer.writerow([series, repr(float(point["epsilon"])), repr(float(point["value"]))])
    return path


def write_report(
    envelope: ReportEnvelope, out_dir: Optional[str], fmt: str = FORMAT_JSON
) -> List[Path]:
    """
    Write `<command>.json` (and `ladder.csv` for the csv format)

    Args:
        envelope: report to write
        out_dir: target directory, created when missing
        fmt: "json" or "csv"

    Returns:
        Paths written
    """
    if fmt not in (FORMAT_JSON, FORMAT_CSV):
        raise ConfigError(f"unknown format '{fmt}', expected json or csv")
    directory = Path(out_dir or settings.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / f"{envelope.command}.json"
    json_path.write_text(render_json(envelope.model_dump(mode="json")), encoding="utf-8")
    written = [json_path]
    if fmt == FORMAT_CSV:
        written.append(write_ladder_csv(envelope, directory / LADDER_CSV))
    logger.info(f"Report written: {', '.join(str(p) for p in written)}")
    return written


# =============================================================================
# Offline verdict check
# =============================================================================


def _is_convergence(data: Dict[str, Any]) -> bool:
    return {"ladder", "corrected", "verdict", "tolerance"} <= set(data)


def _is_double_limit(data: Dict[str, Any]) -> bool:
    return {"outer", "values", "verdict", "tolerance"} <= set(data)


def recheck_convergence(data: Dict[str, Any]) -> Verdict:
    report = ConvergenceReport.model_validate(data)
    epsilons = [point.epsilon for point in report.ladder]
    values = [point.value for point in report.ladder]
    return assess_ladder(epsilons, values, report.tolerance, report.abs_floor).verdict


def recheck_double_limit(data: Dict[str, Any]) -> Verdict:
    report = DoubleLimitReport.model_validate(data)
    values = [abs(point.inner.extrapolated) for point in report.outer]
    monotone = all(b <= a for a, b in zip(values, values[1:]))
    below = values[-1] < report.tolerance
    converged = below and (monotone or all(v < report.tolerance for v in values))
    return Verdict.CONVERGED if converged else Verdict.INCONCLUSIVE


def _walk(data: Any, path: str, mismatches: List[str], checked: List[str]) -> None:
    if isinstance(data, dict):
        if _is_double_limit(data):
            verdict = recheck_double_limit(data)
            checked.append(path)
            if verdict.value != data["verdict"]:
                mismatches.append(f"{path}: stored {data['verdict']}, derived {verdict.value}")
        elif _is_convergence(data):
            verdict = recheck_convergence(data)
            checked.append(path)
            if verdict.value != data["verdict"]:
                mismatches.append(f"{path}: stored {data['verdict']}, derived {verdict.value}")
            return
        for key in sorted(data):
            _walk(data[key], f"{path}.{key}", mismatches, checked)
    elif isinstance(data, list):
        for idx, item in enumerate(data):
            _walk(item, f"{path}[{idx}]", mismatches, checked)


def check_report(path: str) -> Tuple[List[str], List[str]]:
    """
    Re-derive every verdict of a written report from its ladder data

    Returns:
        (checked JSON paths, mismatch descriptions)

    Raises:
        ConfigError: unreadable or malformed report
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        envelope = ReportEnvelope.model_validate(raw)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read report {path}: {e}") from e
    mismatches: List[str] = []
    checked: List[str] = []
    _walk(envelope.payload, "payload", mismatches, checked)
    logger.info(f"Checked {len(checked)} verdicts in {path}, {len(mismatches)} mismatches")
    return checked, mismatches
