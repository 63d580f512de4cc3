"""
THFT Weight Calculator - command-line entry point

Every subcommand prints a deterministic JSON report on stdout. Exit codes:
0 when the computation ran (Inconclusive verdicts included), 2 on
configuration errors, 3 on numerical failures.
"""

import logging
from typing import List, Optional

from pydantic import ValidationError

from thftcalc.commands.registry import build_parser
from thftcalc.core.constants import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_FAILURE
from thftcalc.core.exceptions import ConfigError, NumericalError
from thftcalc.core.logging import setup_logging

logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    logger.debug(f"Running {args.command}")
    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG_ERROR
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
