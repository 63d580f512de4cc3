"""
weight - eps -> 0 ladder of a wheel weight
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
from thftcalc.services.integrand_service import ROUTES, ROUTE_IBP
from thftcalc.services.wheel_service import (
    WheelService,
    direct_weight_quadrature,
    vanishes_algebraically,
)

logger = logging.getLogger(__name__)

NAME = "weight"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[experiment_flags()],
        help="Evaluate a wheel weight along an eps-ladder and extrapolate",
    )
    parser.add_argument("--route", choices=ROUTES, default=ROUTE_IBP, help="Integrand assembly route")
    parser.add_argument(
        "--oracle",
        action="store_true",
        help="Add the un-decomposed direct quadrature at the first rung (and at eps = 0 for k = 2)",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    require_selection(config, Selection.WHEEL, NAME)
    wd = config.wheel_data()
    sig = wd.sig
    service = WheelService(config.ladder, jobs_of(args), args.route)
    report = service.epsilon_limit(wd, config.test_input, config.ladder.base_L)
    payload = {
        "signature": sig,
        "p": wd.p,
        "route": args.route,
        "vanishing": vanishes_algebraically(sig, proof=False),
        "convergence": report,
    }
    if args.oracle:
        first = report.ladder[0]
        payload["direct_check"] = {
            "epsilon": first.epsilon,
            "ladder_value": first.value,
            "value": direct_weight_quadrature(wd, config.test_input, first.epsilon, config.ladder.base_L),
        }
        if sig.k == 2:
            payload["direct_limit"] = direct_weight_quadrature(
                wd, config.test_input, 0.0, config.ladder.base_L
            )
    logger.info(f"Weight of {sig}: {report.extrapolated:.10g} ({report.verdict.value})")
    emit(NAME, config, payload, args)
    return EXIT_OK
