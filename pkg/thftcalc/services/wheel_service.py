"""
Wheel service - admissibility, algebraic vanishing and numerical evaluation of
the analytic wheel weights W^{k,(p)}_{eps<L}
"""

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.rings import PolyElement

from thftcalc.core.config import settings
from thftcalc.core.constants import (
    DIRECT_ZERO_OCTAVES,
    G7_WEIGHTS,
    GK15_NODES,
    GK15_WEIGHTS,
    VAR_W,
    VAR_Y,
)
from thftcalc.core.exceptions import ConfigError, NumericalError
from thftcalc.schemas.experiment import LadderSpec
from thftcalc.schemas.kernel import SplitKind
from thftcalc.schemas.report import ConvergenceReport, VanishingReport
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.schemas.wheel import (
    EdgeDecoration,
    PolynomialTerm,
    TestInput,
    WheelData,
    parse_variable,
)
from thftcalc.services import exterior_service
from thftcalc.services.integrand_service import (
    ROUTE_IBP,
    Assignments,
    WheelIntegrand,
    assignments_for,
    compile_terms,
    iter_decorations,
    wbar_argument,
)
from thftcalc.services.kernel_service import e_coefficient_values, gaussian_values
from thftcalc.utils.extrapolation import assess_ladder
from thftcalc.utils.forms import wedge_all
from thftcalc.utils.polynomials import scalar_ring, substitute
from thftcalc.utils.quadrature import integrate_cube, octave_panels

logger = logging.getLogger(__name__)


def admissible_S(sig: SpaceSignature) -> List[List[int]]:
    """All S in 1..k with m <= |S| <= k - n, by size then lexicographically"""
    subsets = []
    for size in range(sig.m, sig.k - sig.n + 1):
        subsets.extend(list(S) for S in combinations(range(1, sig.k + 1), size))
    return subsets


def in_window(sig: SpaceSignature, S: Sequence[int]) -> bool:
    return sig.m <= len(S) <= sig.k - sig.n


def vanishes_algebraically(sig: SpaceSignature, proof: bool = True) -> VanishingReport:
    """
    Whether the wheel weight vanishes identically, i.e. k <= m + n

    With proof=True the statement is confirmed in exact arithmetic: by degree
    counting for k < m + n and by the contraction identity for k = m + n.
    """
    admissible = admissible_S(sig)
    if sig.k > sig.m + sig.n:
        return VanishingReport(
            m=sig.m,
            n=sig.n,
            k=sig.k,
            vanishes=False,
            proven=False,
            admissible=admissible,
            message="requires numerical evaluation",
        )
    if not proof:
        return VanishingReport(
            m=sig.m,
            n=sig.n,
            k=sig.k,
            vanishes=True,
            proven=False,
            admissible=admissible,
            message="vanishes: k <= m + n",
        )
    mode, checked = exterior_service.prove_vanishing(sig)
    label = {"degree": "degree counting", "edge_case": "edge case", "tadpole": "tadpole"}[mode]
    logger.info(f"Wheel {sig} vanishes, proof by {label} over {checked} terms")
    return VanishingReport(
        m=sig.m,
        n=sig.n,
        k=sig.k,
        vanishes=True,
        mode=mode,
        proven=True,
        checked_terms=checked,
        admissible=admissible,
        message=f"vanishes: algebraic ({label})",
    )


def wheel_terms(sig: SpaceSignature, subsets: Optional[List[List[int]]] = None) -> List[Assignments]:
    """Decorated terms (S, f, g) of a wheel, optionally restricted to given S"""
    subsets = admissible_S(sig) if subsets is None else subsets
    edges = range(1, sig.k + 1)
    return [
        assignments_for(sig.k, f, g)
        for S in subsets
        for f, g in iter_decorations(sig, S, edges)
    ]


class WheelService:
    """Service for evaluating wheel weights and their eps -> 0 limits"""

    def __init__(
        self,
        ladder: Optional[LadderSpec] = None,
        jobs: Optional[int] = None,
        route: str = ROUTE_IBP,
    ):
        """
        Initialize wheel service

        Args:
            ladder: quadrature tolerances and ladder shape
            jobs: worker threads for the scale quadrature
            route: polynomial assembly route, "ibp" or "direct"
        """
        self.ladder = ladder or LadderSpec()
        self.jobs = jobs or settings.jobs
        self.route = route

    def _check(self, wd: WheelData, test_input: TestInput, epsilon: float, L: float) -> None:
        if not (0 < epsilon <= L):
            raise ConfigError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")
        try:
            test_input.check(wd.sig)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def integrand(self, wd: WheelData, terms: List[Assignments], test_input: TestInput) -> WheelIntegrand:
        return compile_terms(wd.sig, wd.p, terms, test_input, self.route)

    def _integrate(self, integrand: WheelIntegrand, epsilon: float, L: float) -> float:
        if integrand.is_zero:
            return 0.0
        result = integrate_cube(
            integrand.scale_function(),
            epsilon,
            L,
            integrand.sig.k,
            rtol=self.ladder.quad_rtol,
            atol=self.ladder.quad_atol,
            jobs=self.jobs,
        )
        return result.value

    def weight_term(
        self,
        wd: WheelData,
        dec: EdgeDecoration,
        test_input: TestInput,
        epsilon: float,
        L: float,
    ) -> float:
        """
        W^{k,(p),S,l}: one S and one index per E_d edge, summed over the E_dbar indices

        Returns exactly 0 outside the cardinality window and for k <= m + n.
        """
        sig = wd.sig
        self._check(wd, test_input, epsilon, L)
        try:
            dec.check(wd)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if not in_window(sig, dec.S) or sig.k <= sig.m + sig.n:
            return 0.0
        edges = range(1, sig.k + 1)
        complement = [edge for edge in edges if edge not in dec.S]
        terms = [
            assignments_for(sig.k, dec.indices, g)
            for _, g in iter_decorations(sig, [], complement)
        ]
        value = self._integrate(self.integrand(wd, terms, test_input), epsilon, L)
        logger.debug(f"Weight term S={dec.S} f={dec.indices} of {sig}: {value:.10g}")
        return value

    def weight_total(self, wd: WheelData, test_input: TestInput, epsilon: float, L: float) -> float:
        """Sum of all decorated terms; exactly 0 when k <= m + n"""
        sig = wd.sig
        self._check(wd, test_input, epsilon, L)
        if sig.k <= sig.m + sig.n:
            return 0.0
        integrand = self.integrand(wd, wheel_terms(sig), test_input)
        value = self._integrate(integrand, epsilon, L)
        logger.info(f"Weight of {sig} on [{epsilon:.3e}, {L:.3e}]: {value:.10g}")
        return value

    def epsilon_limit(self, wd: WheelData, test_input: TestInput, L: Optional[float] = None) -> ConvergenceReport:
        """
        eps-ladder eps_j = L 2^-j from the first rung on, extrapolated to eps -> 0

        All rungs come from one adaptive pass over [eps_rungs, L]^k. A
        vanishing wheel yields an all-zero ladder.
        """
        sig = wd.sig
        L = L or self.ladder.base_L
        rungs = self.ladder.rungs
        epsilons = self.ladder.epsilons(L)
        self._check(wd, test_input, epsilons[-1], L)

        if sig.k <= sig.m + sig.n:
            return assess_ladder(epsilons, [0.0] * rungs, self.ladder.tolerance)

        integrand = self.integrand(wd, wheel_terms(sig), test_input)
        if integrand.is_zero:
            return assess_ladder(epsilons, [0.0] * rungs, self.ladder.tolerance)
        logger.info(f"Running eps-ladder of {rungs} rungs for {sig} at L={L}")
        result = integrate_cube(
            integrand.scale_function(),
            epsilons[-1],
            L,
            sig.k,
            rtol=self.ladder.quad_rtol,
            atol=self.ladder.quad_atol,
            jobs=self.jobs,
        )
        values = result.rung_values(rungs, self.ladder.first_rung)
        return assess_ladder(
            epsilons, values, self.ladder.tolerance, abs_floor=self.ladder.quad_atol
        )


# =============================================================================
# Relabeling
# =============================================================================


def _test_polynomial(ring, test_input: TestInput):
    return ring.from_test_input(test_input)


def _to_terms(ring, poly) -> List[PolynomialTerm]:
    terms = []
    for monom, coeff in sorted(poly.items()):
        fraction = Fraction(int(coeff.numerator), int(coeff.denominator))
        terms.append(
            PolynomialTerm(coefficient=str(fraction), powers=ring.split_monomial(monom))
        )
    return terms


def _rotation_map(ring, sig: SpaceSignature) -> Dict:
    """q^1 -> -(q'^1 + ... + q'^(k-1)), q^b -> q'^(b-1) for every coordinate"""
    slots = sig.k - 1
    mapping = {}
    for i in range(1, sig.m + 1):
        mapping[ring.y(1, i)] = -ring.y_sum(i)
        for b in range(2, slots + 1):
            mapping[ring.y(b, i)] = ring.y(b - 1, i)
    for j in range(1, sig.n + 1):
        mapping[ring.w(1, j)] = -sum((ring.w(a, j) for a in range(1, slots + 1)), ring.zero)
        mapping[ring.wbar(1, j)] = -ring.wbar_sum(j)
        for b in range(2, slots + 1):
            mapping[ring.w(b, j)] = ring.w(b - 1, j)
            mapping[ring.wbar(b, j)] = ring.wbar(b - 1, j)
    return mapping


def rotate_edges(edges: Sequence[int], k: int, shift: int) -> List[int]:
    return sorted((edge - 1 - shift) % k + 1 for edge in edges)


def cyclic_relabel(
    wd: WheelData, test_input: TestInput, shift: int = 1
) -> Tuple[WheelData, TestInput]:
    """
    Rotate vertex labels by `shift`: edge e becomes e - shift (mod k)

    p-rows follow the edges and the test polynomial is pulled back along the
    induced change of center-of-mass coordinates. The damping must be
    symmetric under the rotation.
    """
    sig = wd.sig
    widths = set(test_input.widths.values())
    if widths - {test_input.default_width} or test_input.closing_width != test_input.default_width:
        raise ConfigError(
            "cyclic relabeling needs uniform widths with closing_width equal to default_width"
        )
    shift %= sig.k
    ring = scalar_ring(sig.m, sig.n, sig.k - 1, sig.k)
    poly = _test_polynomial(ring, test_input)
    mapping = _rotation_map(ring, sig)
    for _ in range(shift):
        poly = substitute(poly, mapping)
    p = [list(wd.p[(row + shift) % sig.k]) for row in range(sig.k)]
    relabeled = test_input.model_copy(update={"terms": _to_terms(ring, poly), "widths": {}})
    return WheelData(sig=sig, p=p), relabeled


# =============================================================================
# Oracles
# =============================================================================


def evaluate_test_polynomial(test_input: TestInput, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """
    Polynomial part of a test input at sample points

    Args:
        y: array (N, slots, m)
        w: complex array (N, slots, n)
    """
    values = np.zeros(y.shape[0], dtype=complex)
    for term in test_input.terms:
        monomial = np.full(y.shape[0], float(term.fraction), dtype=complex)
        for name, power in term.powers.items():
            kind, vertex, coord = parse_variable(name)
            if kind == VAR_Y:
                variable = y[:, vertex - 1, coord - 1]
            elif kind == VAR_W:
                variable = w[:, vertex - 1, coord - 1]
            else:
                variable = np.conj(w[:, vertex - 1, coord - 1])
            monomial = monomial * variable ** power
        values = values + monomial
    return values


def _damping_block(test_input: TestInput, kind: str, coord: int, slots: int) -> Tuple[np.ndarray, float]:
    """Damping precision diag(1/sigma^2) + rho 11^T and its Gaussian mass"""
    diag = np.asarray([1.0 / test_input.width(kind, a, coord) ** 2 for a in range(1, slots + 1)])
    rho = 0.0 if test_input.closing_width is None else 1.0 / test_input.closing_width ** 2
    precision = np.diag(diag) + rho * np.ones((slots, slots))
    det = float(np.linalg.det(precision))
    if kind == VAR_Y:
        return precision, (2 * np.pi) ** (slots / 2) / math.sqrt(det)
    return precision, (2 * np.pi) ** slots / det


def pre_ibp_monte_carlo(
    wd: WheelData,
    assignments: Assignments,
    test_input: TestInput,
    T: Sequence[float],
    samples: Optional[int] = None,
    seed: int = 0,
) -> Tuple[float, float]:
    """
    Monte-Carlo Y-integral of one decorated term before integration by parts

    Points are drawn from the test input's damping Gaussian; the estimator
    multiplies the kernel coefficients, the holomorphic-derivative factors,
    the test polynomial and the orientation sign, and rescales by the damping
    mass.

    Returns:
        (estimate, standard error)
    """
    sig = wd.sig
    k, slots = sig.k, sig.k - 1
    T = np.asarray(T, dtype=float)
    if T.shape != (k,) or np.any(T <= 0):
        raise ConfigError(f"need {k} positive scales, got {T.tolist()}")
    samples = samples or settings.mc_samples
    sign = exterior_service.form_sign(sig, assignments)

    factors = []
    mass = 1.0
    for i in range(1, sig.m + 1):
        precision, block_mass = _damping_block(test_input, VAR_Y, i, slots)
        factors.append(np.linalg.cholesky(np.linalg.inv(precision)))
        mass *= block_mass
    for j in range(1, sig.n + 1):
        precision, block_mass = _damping_block(test_input, VAR_W, j, slots)
        factors.append(np.linalg.cholesky(np.linalg.inv(precision)))
        mass *= block_mass

    chunk = max(1, settings.chunk_size)
    streams = np.random.SeedSequence(seed).spawn(-(-samples // chunk))
    total = 0.0
    total_sq = 0.0
    for idx, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        size = min(chunk, samples - idx * chunk)
        y = np.zeros((size, slots, sig.m))
        w = np.zeros((size, slots, sig.n), dtype=complex)
        for i in range(sig.m):
            y[:, :, i] = rng.standard_normal((size, slots)) @ factors[i].T
        for j in range(sig.n):
            chol = factors[sig.m + j]
            real = rng.standard_normal((size, slots)) @ chol.T
            imag = rng.standard_normal((size, slots)) @ chol.T
            w[:, :, j] = real + 1j * imag

        values = sign * evaluate_test_polynomial(test_input, y, w)
        for edge, (split, index) in enumerate(assignments, start=1):
            if edge < k:
                x_arg, z_arg = y[:, edge - 1, :], w[:, edge - 1, :]
            else:
                x_arg, z_arg = -y.sum(axis=1), -w.sum(axis=1)
            T_edge = T[edge - 1]
            if split == SplitKind.K_FULL:
                values = values * gaussian_values(x_arg, z_arg, T_edge, sig)
            else:
                column = index - 1 if split == SplitKind.E_D else sig.m + index - 1
                values = values * e_coefficient_values(x_arg, z_arg, T_edge, sig)[:, column]
            for coord, power in enumerate(wd.p[edge - 1], start=1):
                if power:
                    values = values * (-np.conj(z_arg[:, coord - 1]) / (4 * T_edge)) ** power
        real = values.real
        total += real.sum()
        total_sq += (real ** 2).sum()

    mean = total / samples
    variance = max(total_sq / samples - mean ** 2, 0.0)
    return float(mass * mean), float(mass * math.sqrt(variance / samples))


def term_integrand_at(
    wd: WheelData,
    assignments: Assignments,
    test_input: TestInput,
    T: Sequence[float],
    route: str = ROUTE_IBP,
) -> float:
    """Exact Y-integral of one decorated term at fixed scales"""
    integrand = compile_terms(wd.sig, wd.p, [assignments], test_input, route)
    return float(integrand.evaluate(np.asarray([T], dtype=float))[0])


def undecomposed_polynomial(wd: WheelData, test_input: TestInput) -> PolyElement:
    """
    Pairing of the wedge of full edge propagators with phi

    Each edge carries E_d + E_dbar as one form; no S-subsets or decorations
    are enumerated. The holomorphic-derivative factors enter directly.
    """
    sig = wd.sig
    ctx = exterior_service.reduced_context(sig)
    ring = ctx.ring
    forms = [
        exterior_service.edge_form(sig, edge, SplitKind.E_D)
        + exterior_service.edge_form(sig, edge, SplitKind.E_DBAR)
        for edge in range(1, sig.k + 1)
    ]
    poly = ring.zero
    for _, coeff in wedge_all(forms, ctx):
        poly = poly + coeff
    for edge, row in enumerate(wd.p, start=1):
        for coord, power in enumerate(row, start=1):
            if power:
                factor = -wbar_argument(ring, edge, coord) * ring.inv_T(edge) * ring.const("1/4")
                poly = poly * factor ** power
    return poly * ring.from_test_input(test_input)


def _log_axis_rule(epsilon: float, L: float, splits: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """GK15 nodes in T over split octave panels; weights carry the dT = T ds Jacobian"""
    x = np.asarray(GK15_NODES)
    kronrod_1d = np.asarray(GK15_WEIGHTS)
    gauss_1d = np.zeros(15)
    gauss_1d[1::2] = G7_WEIGHTS
    nodes, kronrod, gauss = [], [], []
    for lower, upper, _ in octave_panels(epsilon, L):
        cuts = np.linspace(lower, upper, splits + 1)
        for a, b in zip(cuts[:-1], cuts[1:]):
            half = 0.5 * (b - a)
            T = np.exp(0.5 * (a + b) + half * x)
            nodes.append(T)
            kronrod.append(half * kronrod_1d * T)
            gauss.append(half * gauss_1d * T)
    return np.concatenate(nodes), np.concatenate(kronrod), np.concatenate(gauss)


def direct_weight_quadrature(
    wd: WheelData,
    test_input: TestInput,
    epsilon: float,
    L: float,
    rtol: float = 1e-9,
    atol: float = 1e-14,
    max_splits: int = 4,
) -> float:
    """
    Weight of any wheel from the un-decomposed edge product

    The Y-integral is exact (Wick moments under the damped center-of-mass
    Gaussian); the scales run through a tensor GK15 product over octave
    panels in log T, every panel split in 1, 2, ... max_splits pieces until
    the Kronrod and Gauss sums agree. With epsilon = 0 the lower limit is
    L 2^-DIRECT_ZERO_OCTAVES, which is only affordable for k = 2.

    Raises:
        ConfigError: on a bad window or test input
        NumericalError: when the panel refinement does not settle
    """
    sig = wd.sig
    if not (0 <= epsilon <= L) or L <= 0:
        raise ConfigError(f"need 0 <= epsilon <= L, got ({epsilon}, {L})")
    try:
        test_input.check(sig)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if sig.k < 2:
        return 0.0
    integrand = WheelIntegrand(sig, test_input, undecomposed_polynomial(wd, test_input))
    if integrand.is_zero:
        return 0.0
    lower = epsilon if epsilon > 0 else L * 2.0 ** (-DIRECT_ZERO_OCTAVES)
    chunk = max(1, settings.chunk_size)

    splits = 1
    while True:
        nodes, kronrod, gauss = _log_axis_rule(lower, L, splits)
        shape = (nodes.size,) * sig.k
        total_k = total_g = 0.0
        for start in range(0, nodes.size ** sig.k, chunk):
            idx = np.unravel_index(np.arange(start, min(start + chunk, nodes.size ** sig.k)), shape)
            values = integrand.evaluate(np.stack([nodes[i] for i in idx], axis=1))
            total_k += float(values @ np.prod([kronrod[i] for i in idx], axis=0))
            total_g += float(values @ np.prod([gauss[i] for i in idx], axis=0))
        error = abs(total_k - total_g)
        logger.debug(
            f"Direct weight of {sig} on [{epsilon:.3e}, {L:.3e}], {splits} splits: "
            f"{total_k:.12g} +- {error:.1e}"
        )
        if error <= max(rtol * abs(total_k), atol):
            return total_k
        if splits >= max_splits:
            logger.error(f"Direct weight quadrature of {sig} did not settle: error {error:.1e}")
            raise NumericalError(
                f"direct weight quadrature of {sig} did not settle: {total_k:.6g} +- {error:.1e}"
            )
        splits *= 2

