"""
Command registry - combines all subcommands into one parser
"""

import argparse

from thftcalc.commands import anomaly, moments, regulator, report, vanish, weight
from thftcalc.core.config import settings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thftcalc",
        description="One-loop wheel weights, anomaly weights and regulator integrals "
        "of mixed topological-holomorphic field theories",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.version}")
    parser.add_argument(
        "--log-level",
        default=settings.log_level,
        help="Logging level written to stderr",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Exact vanishing for k <= m + n
    vanish.register(subparsers)

    # eps -> 0 ladders of wheel weights
    weight.register(subparsers)

    # Double limit of anomaly weights, framing coefficient when m = 0
    anomaly.register(subparsers)

    # I_{N,k}(eps, L) and its ladders
    regulator.register(subparsers)

    # Gaussian moments on the center-of-mass slots
    moments.register(subparsers)

    # Config schema and offline verdict re-check
    report.register(subparsers)

    return parser
