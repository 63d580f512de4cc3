"""
vanish - admissibility windows and exact vanishing proofs
"""

import argparse
import logging

from thftcalc.commands.common import emit, experiment_flags, load_config
from thftcalc.core.constants import EXIT_OK
from thftcalc.services.anomaly_service import admissible_S_anomaly
from thftcalc.services.wheel_service import vanishes_algebraically

logger = logging.getLogger(__name__)

NAME = "vanish"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[experiment_flags()],
        help="Prove algebraic vanishing of wheels with k <= m + n",
    )
    parser.add_argument(
        "--sweep",
        action="store_true",
        help="Report every k from 1 to m + n + 1 instead of the configured k",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    sig = config.signature
    ks = range(1, sig.m + sig.n + 2) if args.sweep else [sig.k]
    verdicts = []
    for k in ks:
        report = vanishes_algebraically(sig.with_k(k))
        logger.info(f"{sig.with_k(k)}: {report.message}")
        verdicts.append(
            {
                "wheel": report,
                "anomaly_admissible": admissible_S_anomaly(sig.with_k(k)) if k >= 2 else [],
            }
        )
    emit(NAME, config, {"m": sig.m, "n": sig.n, "verdicts": verdicts}, args)
    return EXIT_OK
