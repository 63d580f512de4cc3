"""
anomaly - double limit of anomaly weights, or the framing coefficient of the (0, 1, 2) wheel
"""

import argparse
import logging

from thftcalc.commands.common import (
    emit,
    experiment_flags,
    jobs_of,
    load_config,
    require_selection,
)
from thftcalc.core.constants import EXIT_OK
from thftcalc.schemas.experiment import Selection
from thftcalc.services.anomaly_service import (
    BF_FRAMING_LIMIT,
    AnomalyService,
    admissible_S_anomaly,
    bf_anomaly_coefficient_quadrature,
    bf_anomaly_ladder,
)
from thftcalc.utils.extrapolation import assess_ladder

logger = logging.getLogger(__name__)

NAME = "anomaly"

# Flavor data multiplying the scalar framing coefficient
FRAMING_MULTIPLIER = "J(Z') Tr(A)"

# The two-vertex wheel of holomorphic BF theory on C
FRAMING_SIGNATURE = (0, 1, 2)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[experiment_flags()],
        help="Anomaly double limit (m >= 1) or 2d BF framing coefficient for (m, n, k) = (0, 1, 2)",
    )
    parser.set_defaults(handler=run)


def _framing_payload(config) -> dict:
    L = config.ladder.base_L
    ladder = bf_anomaly_ladder(L, config.ladder.rungs)
    report = assess_ladder(
        [point.epsilon for point in ladder],
        [point.value for point in ladder],
        config.ladder.tolerance,
    )
    epsilon = ladder[-1].epsilon
    return {
        "coefficient": report.extrapolated,
        "expected": BF_FRAMING_LIMIT,
        "multiplier": FRAMING_MULTIPLIER,
        "quadrature_check": {
            "epsilon": epsilon,
            "value": bf_anomaly_coefficient_quadrature(epsilon, L),
        },
        "convergence": report,
    }


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    require_selection(config, Selection.ANOMALY, NAME)
    sig = config.signature
    wd = config.wheel_data()
    payload = {
        "signature": sig,
        "p": wd.p,
        "admissible": admissible_S_anomaly(sig) if sig.k >= 2 else [],
    }
    if (sig.m, sig.n, sig.k) == FRAMING_SIGNATURE:
        payload["framing"] = _framing_payload(config)
        logger.info(f"Framing coefficient of {sig}: {payload['framing']['coefficient']:.10g}")
    else:
        service = AnomalyService(config.ladder, jobs_of(args))
        payload["double_limit"] = service.double_limit(sig, wd.p, config.test_input)
    emit(NAME, config, payload, args)
    return EXIT_OK

