"""
Anomaly service - anomaly weights Theta with one distinguished heat-kernel edge,
their double limit and the 2d BF framing coefficient

The distinguished edge carries K_eps: its scale is pinned to eps and its form
is the full volume of its argument. It sits at edge k unless stated otherwise.
"""

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from scipy.integrate import quad

from thftcalc.core.config import settings
from thftcalc.core.exceptions import ConfigError, NumericalError
from thftcalc.schemas.experiment import LadderSpec
from thftcalc.schemas.kernel import SplitKind
from thftcalc.schemas.report import (
    ConvergenceReport,
    DoubleLimitReport,
    LadderPoint,
    OuterPoint,
    Verdict,
)
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.schemas.wheel import AnomalyWheel, TestInput, WheelData
from thftcalc.services.integrand_service import (
    ROUTE_IBP,
    Assignments,
    WheelIntegrand,
    assignments_for,
    compile_terms,
    iter_decorations,
)
from thftcalc.services.wheel_service import cyclic_relabel, rotate_edges
from thftcalc.utils.extrapolation import assess_ladder
from thftcalc.utils.quadrature import integrate_cube

logger = logging.getLogger(__name__)


def admissible_S_anomaly(sig: SpaceSignature) -> List[List[int]]:
    """All S in 1..k-1 with m <= |S| <= k - n - 1"""
    subsets = []
    for size in range(sig.m, sig.k - sig.n):
        subsets.extend(list(S) for S in combinations(range(1, sig.k), size))
    return subsets


def anomaly_terms(sig: SpaceSignature) -> List[Assignments]:
    edges = range(1, sig.k)
    return [
        assignments_for(sig.k, f, g, heat_edges=(sig.k,))
        for S in admissible_S_anomaly(sig)
        for f, g in iter_decorations(sig, S, edges)
    ]


def _check_input(test_input: TestInput, sig: SpaceSignature) -> None:
    try:
        test_input.check(sig)
    except ValueError as e:
        raise ConfigError(str(e)) from e


class AnomalyService:
    """Service for evaluating anomaly weights and their double limits"""

    def __init__(
        self,
        ladder: Optional[LadderSpec] = None,
        jobs: Optional[int] = None,
        route: str = ROUTE_IBP,
    ):
        """
        Initialize anomaly service

        Args:
            ladder: inner and outer ladder shapes and quadrature tolerances
            jobs: worker threads for the scale quadrature
            route: polynomial assembly route, "ibp" or "direct"
        """
        self.ladder = ladder or LadderSpec()
        self.jobs = jobs or settings.jobs
        self.route = route

    def _integrate(
        self,
        integrand: WheelIntegrand,
        epsilon: float,
        L: float,
        fixed: Optional[Tuple[int, float]],
    ) -> float:
        if integrand.is_zero:
            return 0.0
        dim = integrand.sig.k - (0 if fixed is None else 1)
        result = integrate_cube(
            integrand.scale_function(fixed),
            epsilon,
            L,
            dim,
            rtol=self.ladder.quad_rtol,
            atol=self.ladder.quad_atol,
            jobs=self.jobs,
        )
        return result.value

    @staticmethod
    def _check_window(epsilon: float, L: float) -> None:
        if not (0 < epsilon <= L):
            raise ConfigError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")

    def theta_weight(
        self,
        aw: AnomalyWheel,
        test_input: TestInput,
        epsilon: float,
        L: float,
        free_split: Optional[Tuple[SplitKind, int]] = None,
    ) -> float:
        """
        Theta^{k,S}_{eps<L} for one decorated anomaly wheel

        Args:
            aw: anomaly wheel with S, f and g on edges 1..k-1
            test_input: test input on the k-1 slots
            epsilon: heat-kernel scale of the distinguished edge and lower cutoff
            L: upper cutoff
            free_split: when given, edge k carries this propagator piece with a
                free scale in [eps, L] instead of K_eps

        Returns:
            The weight; exactly 0 outside the cardinality window
        """
        sig = aw.sig
        self._check_window(epsilon, L)
        _check_input(test_input, sig)
        if free_split is None:
            if not sig.m <= len(aw.S) <= sig.k - sig.n - 1:
                return 0.0
            assignments = assignments_for(sig.k, aw.f, aw.g, heat_edges=(sig.k,))
            fixed: Optional[Tuple[int, float]] = (sig.k, epsilon)
        else:
            split, index = free_split
            if split not in (SplitKind.E_D, SplitKind.E_DBAR):
                raise ConfigError(f"free distinguished edge must be E_d or E_dbar, got {split}")
            f, g = dict(aw.f), dict(aw.g)
            (f if split == SplitKind.E_D else g)[sig.k] = index
            assignments = assignments_for(sig.k, f, g)
            fixed = None
        integrand = compile_terms(sig, aw.p, [assignments], test_input, self.route)
        value = self._integrate(integrand, epsilon, L, fixed)
        logger.debug(f"Theta S={aw.S} f={aw.f} g={aw.g} of {sig}: {value:.10g}")
        return value

    def theta_total(
        self,
        sig: SpaceSignature,
        p: List[List[int]],
        test_input: TestInput,
        epsilon: float,
        L: float,
    ) -> float:
        """Sum of Theta over the admissible S and all f, g"""
        self._check_window(epsilon, L)
        _check_input(test_input, sig)
        if sig.k < 2 or sig.k <= sig.m + sig.n:
            return 0.0
        integrand = compile_terms(sig, p, anomaly_terms(sig), test_input, self.route)
        return self._integrate(integrand, epsilon, L, (sig.k, epsilon))

    def theta_factor(
        self,
        sig: SpaceSignature,
        p: List[List[int]],
        assignments: Assignments,
        distinguished: int,
        test_input: TestInput,
        epsilon: float,
        L: float,
    ) -> float:
        """
        Unoriented analytic factor with the heat kernel on any edge

        The orientation sign is dropped, so relabeled configurations can be
        compared directly.
        """
        self._check_window(epsilon, L)
        if assignments[distinguished - 1][0] != SplitKind.K_FULL:
            raise ConfigError(f"edge {distinguished} must carry the heat kernel")
        integrand = compile_terms(sig, p, [assignments], test_input, self.route, oriented=False)
        return self._integrate(integrand, epsilon, L, (distinguished, epsilon))

    def _inner_ladder(self, integrand: WheelIntegrand, L: float) -> ConvergenceReport:
        """One quadrature per rung: the heat-kernel scale moves with eps"""
        epsilons = self.ladder.epsilons(L)
        values = [self._integrate(integrand, eps, L, (integrand.sig.k, eps)) for eps in epsilons]
        return assess_ladder(
            epsilons, values, self.ladder.tolerance, abs_floor=self.ladder.outer_tolerance
        )

    def double_limit(
        self, sig: SpaceSignature, p: List[List[int]], test_input: TestInput
    ) -> DoubleLimitReport:
        """
        lim_{L -> 0} lim_{eps -> 0} of the total anomaly weight

        Outer scales L_i = base_L * outer_ratio^-i; each carries an inner
        eps-ladder. Converged requires the last |limit| below the outer
        tolerance with a nonincreasing outer sequence (or every value below it).

        Raises:
            ConfigError: for m = 0, where no vanishing is expected
        """
        if sig.m == 0:
            raise ConfigError(
                "the double limit applies to m >= 1; for (m, n, k) = (0, 1, 2) use the framing coefficient"
            )
        _check_input(test_input, sig)
        tolerance = self.ladder.outer_tolerance
        scales = [
            self.ladder.base_L * self.ladder.outer_ratio ** (-i)
            for i in range(self.ladder.outer_rungs)
        ]

        integrand = None
        if sig.k > sig.m + sig.n:
            integrand = compile_terms(sig, p, anomaly_terms(sig), test_input, self.route)
        outer = []
        for L in scales:
            if integrand is None or integrand.is_zero:
                epsilons = self.ladder.epsilons(L)
                inner = assess_ladder(epsilons, [0.0] * len(epsilons), self.ladder.tolerance)
            else:
                inner = self._inner_ladder(integrand, L)
            logger.info(f"Anomaly {sig} at L={L:.3e}: inner limit {inner.extrapolated:.6e}")
            outer.append(OuterPoint(L=L, inner=inner))

        values = [abs(point.inner.extrapolated) for point in outer]
        monotone = all(b <= a for a, b in zip(values, values[1:]))
        below = values[-1] < tolerance
        converged = below and (monotone or all(v < tolerance for v in values))
        verdict = Verdict.CONVERGED if converged else Verdict.INCONCLUSIVE
        logger.info(f"Double limit of {sig}: last |Theta|={values[-1]:.3e}, verdict={verdict.value}")
        return DoubleLimitReport(
            outer=outer,
            values=values,
            tolerance=tolerance,
            monotone=monotone,
            verdict=verdict,
            limit_is_zero=below,
        )

    def pair_factors(
        self,
        sig: SpaceSignature,
        p_a: List[List[int]],
        p_b: List[List[int]],
        test_input: TestInput,
        epsilon: float,
        L: float,
    ) -> Tuple[float, float]:
        """Analytic factors of two wheels sharing a signature and test input"""
        first = self.theta_total(sig, p_a, test_input, epsilon, L)
        second = self.theta_total(sig, p_b, test_input, epsilon, L)
        return first, second

    def pair_factor_equality(
        self,
        sig: SpaceSignature,
        p_a: List[List[int]],
        p_b: List[List[int]],
        test_input: TestInput,
        epsilon: float,
        L: float,
    ) -> float:
        """
        Difference of the analytic factors of two anomaly wheels

        Wheels differing only in their flavor decoration share the kernel data
        and give residual 0; the opposite sign they carry is not modeled.
        """
        if sig.m != 0 or sig.n != 2:
            raise ConfigError(f"pair factors compare wheels on C^2, got {sig}")
        first, second = self.pair_factors(sig, p_a, p_b, test_input, epsilon, L)
        residual = first - second
        logger.info(f"Pair factors {first:.10g} and {second:.10g}, residual {residual:.3e}")
        return residual


def relabel_distinguished(
    sig: SpaceSignature,
    p: List[List[int]],
    S: Sequence[int],
    f: dict,
    g: dict,
    edge: int,
    test_input: TestInput,
) -> Tuple[AnomalyWheel, TestInput]:
    """
    Rotate an anomaly configuration whose heat kernel sits on `edge` so that
    it sits on edge k

    S, f and g refer to the edges other than `edge`.
    """
    if not 1 <= edge <= sig.k:
        raise ConfigError(f"edge {edge} outside 1..{sig.k}")
    shift = edge % sig.k
    rotated, relabeled = cyclic_relabel(WheelData(sig=sig, p=p), test_input, shift)

    def move(e: int) -> int:
        return rotate_edges([e], sig.k, shift)[0]

    wheel = AnomalyWheel(
        sig=sig,
        p=rotated.p,
        S=rotate_edges(S, sig.k, shift),
        f={move(e): value for e, value in f.items()},
        g={move(e): value for e, value in g.items()},
    )
    return wheel, relabeled


# =============================================================================
# 2d BF framing coefficient
# =============================================================================


# eps -> 0 value of the framing integral
BF_FRAMING_LIMIT = 0.5


def bf_anomaly_coefficient(epsilon: float, L: float) -> float:
    """int_eps^L eps dt / (eps + t)^2 = 1/2 - eps / (eps + L)"""
    if not (0 < epsilon <= L):
        raise ConfigError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")
    return 0.5 - epsilon / (epsilon + L)


def bf_anomaly_coefficient_quadrature(epsilon: float, L: float) -> float:
    """Adaptive quadrature of the same integral"""
    if not (0 < epsilon <= L):
        raise ConfigError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")
    result = quad(
        lambda t: epsilon / (epsilon + t) ** 2,
        epsilon,
        L,
        epsabs=0.0,
        epsrel=1e-12,
        limit=200,
        full_output=1,
    )
    if len(result) > 3:
        raise NumericalError(f"framing coefficient quadrature failed: {result[3]}", residual=result[1])
    return result[0]


def bf_anomaly_ladder(L: float, rungs: int) -> List[LadderPoint]:
    """Framing coefficient along eps_j = L 2^-j"""
    return [
        LadderPoint(epsilon=L * 2.0 ** (-j), value=bf_anomaly_coefficient(L * 2.0 ** (-j), L))
        for j in range(1, rungs + 1)
    ]
