"""
report - configuration schema and offline re-check of written reports
"""

import argparse
import logging
import sys

from thftcalc.core.constants import EXIT_NUMERICAL_FAILURE, EXIT_OK
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.experiment import ExperimentConfig
from thftcalc.services.report_service import check_report, render_json

logger = logging.getLogger(__name__)

NAME = "report"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        help="Print the configuration schema or re-derive the verdicts of a report",
    )
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--schema", action="store_true", help="Print the config JSON schema")
    group.add_argument("--check", metavar="PATH", help="Re-check a written <command>.json")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.schema:
        sys.stdout.write(render_json(ExperimentConfig.model_json_schema()))
        return EXIT_OK
    if args.check is None:
        raise ConfigError("report needs --schema or --check PATH")
    checked, mismatches = check_report(args.check)
    sys.stdout.write(
        render_json({"report": args.check, "checked": checked, "mismatches": mismatches})
    )
    for mismatch in mismatches:
        logger.error(f"Verdict mismatch: {mismatch}")
    return EXIT_OK if not mismatches else EXIT_NUMERICAL_FAILURE
