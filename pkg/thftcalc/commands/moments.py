"""
moments - center-of-mass Gaussian moments and their T-dependence
"""

import argparse
import logging
from typing import List

from thftcalc.commands.common import emit, experiment_flags, load_config
from thftcalc.core.constants import EXIT_OK
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.moments import MomentFactor
from thftcalc.services.gaussian_service import (
    evaluate_t_dependence,
    gaussian_moment,
    monte_carlo_moment,
    t_dependence,
    tau_identity_check,
    zeta_identity_check,
)

logger = logging.getLogger(__name__)

NAME = "moments"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[experiment_flags()],
        help="Wick moments of y^nu under the center-of-mass Gaussian",
    )
    parser.add_argument("--T", type=float, nargs="+", dest="T", help="Scales T_1..T_k")
    parser.add_argument(
        "--factor",
        action="append",
        default=[],
        metavar="VERTEX,COORD,POWER",
        help="One factor (y^vertex_coord)^power; repeatable",
    )
    parser.add_argument("--monte-carlo", action="store_true", help="Add the sampling oracle")
    parser.add_argument(
        "--identities",
        action="store_true",
        help="Check the zeta and tau identities exactly at the given scales",
    )
    parser.set_defaults(handler=run)


def parse_factor(text: str) -> MomentFactor:
    try:
        vertex, coord, power = (int(part) for part in text.split(","))
    except ValueError as e:
        raise ConfigError(f"factor '{text}' must read VERTEX,COORD,POWER") from e
    return MomentFactor(vertex=vertex, coord=coord, power=power)


def _moment_block(args: argparse.Namespace) -> dict:
    block = {}
    if args.T:
        block["T"] = args.T
    if args.factor:
        block["factors"] = [parse_factor(text).model_dump() for text in args.factor]
    if args.monte_carlo:
        block["monte_carlo"] = True
    return block


def _identity_residuals(sig, T: List[float]) -> dict:
    residuals = {}
    for i in range(1, sig.n + 1):
        residuals[f"zeta_{i}"] = str(zeta_identity_check(i, sig, T))
    for j in range(1, sig.m + 1):
        residuals[f"tau_{j}"] = str(tau_identity_check(j, sig, T))
    return residuals


def run(args: argparse.Namespace) -> int:
    raw_overrides = _moment_block(args)
    config = load_config(args)
    spec = config.moment
    if raw_overrides:
        merged = spec.model_dump() if spec is not None else {}
        merged.update(raw_overrides)
        config = config.model_validate({**config.model_dump(), "moment": merged})
        spec = config.moment
    if spec is None:
        raise ConfigError("moments needs scales, from --T or the config 'moment' block")

    sig = config.signature.with_k(len(spec.T))
    request = spec.request()
    bare_request = request.model_copy(update={"normalized": False})
    monomials = t_dependence(bare_request, sig.k, sig)
    payload = {
        "signature": sig,
        "request": request,
        "T": spec.T,
        "moment": gaussian_moment(request, spec.T, sig),
        "bare_moment": gaussian_moment(bare_request, spec.T, sig),
        "t_dependence": [
            {
                "lam": list(mono.lam),
                "coefficient": str(mono.coefficient),
                "sum_power": str(mono.sum_power),
            }
            for mono in monomials
        ],
        "t_dependence_value": evaluate_t_dependence(monomials, spec.T, sig),
    }
    if spec.monte_carlo:
        mean, stderr = monte_carlo_moment(request, spec.T, sig, spec.samples, config.seed)
        payload["monte_carlo"] = {"mean": mean, "stderr": stderr, "samples": spec.samples}
    if args.identities and sig.k >= 2:
        payload["identities"] = _identity_residuals(sig, spec.T)
    logger.info(f"Moment of degree {request.degree} at T={spec.T}: {payload['moment']:.12g}")
    emit(NAME, config, payload, args)
    return EXIT_OK
