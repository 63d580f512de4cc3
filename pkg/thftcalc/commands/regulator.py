"""
regulator - I_{N,k}(eps, L) values, bounds and ladders
"""

import argparse
import logging

from thftcalc.commands.common import emit, experiment_flags, load_config
from thftcalc.core.constants import EXIT_OK
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.regulator import LimitVerdict, RegulatorQuery
from thftcalc.services.regulator_service import (
    I_integral,
    amgm_bound,
    cauchy_ladder,
    l_decay_ladder,
    limit_verdict,
)

logger = logging.getLogger(__name__)

NAME = "regulator"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[experiment_flags()],
        help="Evaluate the regulator integral over [eps, L]^k",
    )
    parser.add_argument("--N", type=int, dest="N", help="Power of the scale sum")
    parser.add_argument("--epsilon", type=float, help="Lower cutoff, 0 allowed when N < k")
    parser.add_argument("--L", type=float, dest="L", help="Upper cutoff")
    parser.set_defaults(handler=run)


def _query(args: argparse.Namespace, config) -> RegulatorQuery:
    spec = config.regulator
    N = args.N if args.N is not None else (spec.N if spec else None)
    if N is None:
        raise ConfigError("regulator needs N, from --N or the config 'regulator' block")
    epsilon = args.epsilon if args.epsilon is not None else (spec.epsilon if spec else 0.0)
    L = args.L if args.L is not None else (spec.L if spec else 1.0)
    return RegulatorQuery(N=N, k=config.k, epsilon=epsilon, L=L)


def run(args: argparse.Namespace) -> int:
    # (m, n) play no role here; bf leaves them free
    overrides = {}
    if not (args.preset or args.config):
        overrides = {"m": args.m or 0, "n": args.n or 0}
    config = load_config(args, overrides)
    q = _query(args, config)
    verdict = limit_verdict(q.N, q.k)
    payload = {
        "query": q,
        "limit": verdict,
        "value": I_integral(q),
        "cauchy": {"ladder": cauchy_ladder(q, config.ladder.rungs)},
    }
    if q.epsilon > 0 or verdict == LimitVerdict.FINITE:
        payload["amgm_bound"] = amgm_bound(q)
    if verdict == LimitVerdict.FINITE:
        payload["l_decay"] = {"ladder": l_decay_ladder(q.N, q.k, q.L, config.ladder.rungs)}
    logger.info(f"I_{{{q.N},{q.k}}}({q.epsilon}, {q.L}) = {payload['value']:.12g} ({verdict.value})")
    emit(NAME, config, payload, args)
    return EXIT_OK
