"""
Integrand service - polynomial assembly of decorated wheel terms and their exact
Gaussian integration over the center-of-mass slots

A decorated term fixes, per edge, the kernel piece and the coordinate its
coefficient carries. Its Y-integrand is a polynomial in y, w, wbar, 1/T and
the ratios r_a = T_a / sum T, multiplied by the product of edge Gaussians and
the test input's damping. Two assembly routes exist:

    direct  the E coefficients and holomorphic-derivative factors themselves
    ibp     the same factors rewritten as operators d/dw - zeta acting on the
            test input, integrated by parts

Both are integrated exactly in Y by Wick contraction against the combined
precision diag(1/2T_a + 1/sigma^2) + (1/2T_k + rho) 11^T of each coordinate
block.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.rings import PolyElement

from thftcalc.core.constants import VAR_W, VAR_Y
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.kernel import SplitKind
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.schemas.wheel import TestInput
from thftcalc.services.exterior_service import EdgeAssignment, form_sign
from thftcalc.services.gaussian_service import (
    sherman_morrison_det,
    sherman_morrison_inverse,
)
from thftcalc.utils.polynomials import ScalarRing, scalar_ring
from thftcalc.utils.wick import complex_moment_terms, contract_terms, real_moment_terms

logger = logging.getLogger(__name__)

ROUTE_DIRECT = "direct"
ROUTE_IBP = "ibp"
ROUTES = (ROUTE_DIRECT, ROUTE_IBP)

Assignments = Tuple[EdgeAssignment, ...]


def integrand_ring(sig: SpaceSignature) -> ScalarRing:
    return scalar_ring(sig.m, sig.n, sig.k - 1, sig.k)


# =============================================================================
# Decorations
# =============================================================================


def iter_decorations(
    sig: SpaceSignature, S: Sequence[int], edges: Sequence[int]
) -> Iterator[Tuple[Dict[int, int], Dict[int, int]]]:
    """All maps f: S -> 1..m and g: (edges minus S) -> 1..n, ascending edge order"""
    S = sorted(S)
    complement = [edge for edge in edges if edge not in S]
    for f_values in product(range(1, sig.m + 1), repeat=len(S)):
        f = dict(zip(S, f_values))
        for g_values in product(range(1, sig.n + 1), repeat=len(complement)):
            yield f, dict(zip(complement, g_values))


def assignments_for(
    k: int,
    f: Dict[int, int],
    g: Dict[int, int],
    heat_edges: Sequence[int] = (),
) -> Assignments:
    """Per-edge (split, index) from f on E_d edges, g on E_dbar edges and K_full edges"""
    result = []
    for edge in range(1, k + 1):
        if edge in heat_edges:
            result.append((SplitKind.K_FULL, 0))
        elif edge in f:
            result.append((SplitKind.E_D, f[edge]))
        elif edge in g:
            result.append((SplitKind.E_DBAR, g[edge]))
        else:
            raise ConfigError(f"edge {edge} carries no kernel piece")
    return tuple(result)


# =============================================================================
# Polynomial assembly
# =============================================================================


def y_argument(ring: ScalarRing, edge: int, coord: int) -> PolyElement:
    if edge < ring.k:
        return ring.y(edge, coord)
    return -ring.y_sum(coord)


def wbar_argument(ring: ScalarRing, edge: int, coord: int) -> PolyElement:
    if edge < ring.k:
        return ring.wbar(edge, coord)
    return -ring.wbar_sum(coord)


def _holomorphic_factor(ring: ScalarRing, edge: int, coord: int) -> PolyElement:
    """-wbar_arg / 4T: the factor one d/dz leaves on an edge Gaussian"""
    return -wbar_argument(ring, edge, coord) * ring.inv_T(edge) * ring.const("1/4")


def _topological_factor(ring: ScalarRing, assignments: Assignments) -> PolyElement:
    """Product of the E_d coefficients -y_arg / 2T"""
    factor = ring.one
    for edge, (split, index) in enumerate(assignments, start=1):
        if split == SplitKind.E_D:
            factor = factor * (-y_argument(ring, edge, index) * ring.inv_T(edge) * ring.const("1/2"))
    return factor


def _orientation(sig: SpaceSignature, assignments: Assignments, oriented: bool) -> int:
    return form_sign(sig, assignments) if oriented else 1


def direct_polynomial(
    sig: SpaceSignature,
    p: List[List[int]],
    assignments: Assignments,
    test_input: TestInput,
    oriented: bool = True,
) -> PolyElement:
    """
    Pre-integration-by-parts integrand of one decorated term

    sign * prod(edge coefficients) * prod(-wbar_arg / 4T)^p * phi
    """
    ring = integrand_ring(sig)
    sign = _orientation(sig, assignments, oriented)
    if not sign:
        return ring.zero
    poly = ring.const(sign) * _topological_factor(ring, assignments)
    for edge, (split, index) in enumerate(assignments, start=1):
        if split == SplitKind.E_DBAR:
            poly = poly * (
                -wbar_argument(ring, edge, index) * ring.inv_T(edge) * ring.const("1/2")
            )
        for coord, power in enumerate(p[edge - 1], start=1):
            if power:
                poly = poly * _holomorphic_factor(ring, edge, coord) ** power
    return poly * ring.from_test_input(test_input)


class DampedDerivative:
    """
    d/dw^a_j acting on phi times its damping, expressed on the polynomial part

    D_{a,j} F = dF/dw^a_j + F (-wbar^a_j / 2 sigma^2 - rho/2 sum_b wbar^b_j)
    """

    def __init__(self, ring: ScalarRing, test_input: TestInput):
        """
        Args:
            ring: integrand ring of the wheel
            test_input: supplies the damping widths
        """
        self.ring = ring
        closing = test_input.closing_width
        self.rho = Fraction(0) if closing is None else 1 / Fraction(str(closing)) ** 2
        self.log_derivative: Dict[Tuple[int, int], PolyElement] = {}
        for a in range(1, ring.slots + 1):
            for j in range(1, ring.n + 1):
                sigma2 = Fraction(str(test_input.width(VAR_W, a, j))) ** 2
                self.log_derivative[(a, j)] = (
                    -ring.wbar(a, j) * ring.const(1 / (2 * sigma2))
                    - ring.wbar_sum(j) * ring.const(self.rho / 2)
                )

    def apply(self, vertex: int, coord: int, F: PolyElement) -> PolyElement:
        gen = self.ring.w(vertex, coord)
        return F.diff(gen) + F * self.log_derivative[(vertex, coord)]

    def zeta(self, coord: int, F: PolyElement) -> PolyElement:
        """sum_b r_b D_{b,j} F"""
        total = self.ring.zero
        for b in range(1, self.ring.slots + 1):
            total = total + self.ring.ratio(b) * self.apply(b, coord, F)
        return total

    def edge_operator(self, edge: int, coord: int, F: PolyElement) -> PolyElement:
        """D_{edge,j} - zeta_j for edges below k, -zeta_j on the closing edge"""
        zeta = self.zeta(coord, F)
        if edge < self.ring.k:
            return self.apply(edge, coord, F) - zeta
        return -zeta


def ibp_operators(p: List[List[int]], assignments: Assignments) -> List[Tuple[int, int]]:
    """(edge, coord) per holomorphic factor: one per E_dbar edge, p[e][j] per derivative"""
    ops = []
    for edge, (split, index) in enumerate(assignments, start=1):
        if split == SplitKind.E_DBAR:
            ops.append((edge, index))
        for coord, power in enumerate(p[edge - 1], start=1):
            ops.extend([(edge, coord)] * power)
    return ops


def ibp_polynomial(
    sig: SpaceSignature,
    p: List[List[int]],
    assignments: Assignments,
    test_input: TestInput,
    oriented: bool = True,
) -> PolyElement:
    """
    Integrated-by-parts integrand of one decorated term

    (-1)^#ops 2^#E_dbar sign * prod(E_d coefficients) * (prod O) phi, where
    each -wbar_arg/4T on an edge became the operator O = d/dw - zeta.
    """
    ring = integrand_ring(sig)
    sign = _orientation(sig, assignments, oriented)
    if not sign:
        return ring.zero
    ops = ibp_operators(p, assignments)
    if test_input.smoothness is not None and len(ops) > test_input.smoothness:
        raise ConfigError(
            f"integration by parts needs {len(ops)} derivatives of a "
            f"C^{test_input.smoothness} test input; use the direct route"
        )
    dbar_edges = sum(1 for split, _ in assignments if split == SplitKind.E_DBAR)
    derivative = DampedDerivative(ring, test_input)

    F = ring.from_test_input(test_input)
    for edge, coord in ops:
        F = derivative.edge_operator(edge, coord, F)
        if not F:
            return ring.zero
    scalar = (-1) ** len(ops) * 2 ** dbar_edges * sign
    return ring.const(scalar) * _topological_factor(ring, assignments) * F


def term_polynomial(
    route: str,
    sig: SpaceSignature,
    p: List[List[int]],
    assignments: Assignments,
    test_input: TestInput,
    oriented: bool = True,
) -> PolyElement:
    if route == ROUTE_DIRECT:
        return direct_polynomial(sig, p, assignments, test_input, oriented)
    if route == ROUTE_IBP:
        return ibp_polynomial(sig, p, assignments, test_input, oriented)
    raise ConfigError(f"unknown route '{route}', expected one of {ROUTES}")


# =============================================================================
# Exact Y-integration
# =============================================================================


@dataclass
class _MomentGroup:
    real_terms: List[tuple]
    complex_terms: List[tuple]
    coefficients: np.ndarray  # (U,) weights on the shared T-monomials


class WheelIntegrand:
    """
    A polynomial integrand compiled for vectorized evaluation over scales

    Monomials are grouped by their y/w/wbar exponents; each group is one Wick
    moment times a combination of shared T-monomials iT^a r^b. Groups with an
    odd real block or an unbalanced complex block vanish and are dropped.
    """

    def __init__(self, sig: SpaceSignature, test_input: TestInput, poly: PolyElement):
        """
        Args:
            sig: wheel signature, k >= 2
            test_input: supplies the damping widths
            poly: element of integrand_ring(sig)
        """
        if sig.k < 2:
            raise ConfigError(f"integrands need k >= 2, got {sig}")
        self.sig = sig
        self.ring = integrand_ring(sig)
        slots = sig.k - 1
        self.y_widths = np.asarray(
            [[test_input.width(VAR_Y, a, i) for a in range(1, slots + 1)] for i in range(1, sig.m + 1)],
            dtype=float,
        ).reshape(sig.m, slots)
        self.w_widths = np.asarray(
            [[test_input.width(VAR_W, a, j) for a in range(1, slots + 1)] for j in range(1, sig.n + 1)],
            dtype=float,
        ).reshape(sig.n, slots)
        closing = test_input.closing_width
        self.rho = 0.0 if closing is None else 1.0 / closing ** 2
        self._compile(poly)

    def _indices(self, prefix: str, blocks: int, slots: int) -> List[List[int]]:
        return [
            [self.ring.index(f"{prefix}_{a}_{c}") for a in range(1, slots + 1)]
            for c in range(1, blocks + 1)
        ]

    def _compile(self, poly: PolyElement) -> None:
        sig, ring = self.sig, self.ring
        slots = sig.k - 1
        y_idx = self._indices("y", sig.m, slots)
        w_idx = self._indices("w", sig.n, slots)
        wbar_idx = self._indices("wbar", sig.n, slots)
        it_idx = [ring.index(f"iT_{e}") for e in range(1, sig.k + 1)]
        r_idx = [ring.index(f"r_{a}") for a in range(1, sig.k)]

        t_monomials: Dict[Tuple[int, ...], int] = {}
        grouped: Dict[tuple, Dict[int, float]] = {}
        dropped = 0
        for monom, coeff in poly.items():
            y_key = tuple(tuple(monom[i] for i in block) for block in y_idx)
            w_key = tuple(tuple(monom[i] for i in block) for block in w_idx)
            wbar_key = tuple(tuple(monom[i] for i in block) for block in wbar_idx)
            if any(sum(block) % 2 for block in y_key) or any(
                sum(a) != sum(b) for a, b in zip(w_key, wbar_key)
            ):
                dropped += 1
                continue
            t_key = tuple(monom[i] for i in it_idx) + tuple(monom[i] for i in r_idx)
            column = t_monomials.setdefault(t_key, len(t_monomials))
            bucket = grouped.setdefault((y_key, w_key, wbar_key), {})
            bucket[column] = bucket.get(column, 0.0) + float(coeff)

        self.t_exponents = np.asarray(list(t_monomials), dtype=float).reshape(
            len(t_monomials), sig.k + sig.k - 1
        )
        self.groups: List[_MomentGroup] = []
        for (y_key, w_key, wbar_key), bucket in sorted(grouped.items()):
            coefficients = np.zeros(len(t_monomials))
            for column, value in bucket.items():
                coefficients[column] = value
            self.groups.append(
                _MomentGroup(
                    real_terms=[real_moment_terms(block) for block in y_key],
                    complex_terms=[complex_moment_terms(a, b) for a, b in zip(w_key, wbar_key)],
                    coefficients=coefficients,
                )
            )
        logger.debug(
            f"Compiled integrand for {sig}: {len(self.groups)} moment groups, "
            f"{len(t_monomials)} T-monomials, {dropped} vanishing monomials"
        )

    @property
    def is_zero(self) -> bool:
        return not self.groups

    def _block(self, T: np.ndarray, widths: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Inverse and determinant of one block precision at every node"""
        diag = 1.0 / (2.0 * T[:, :-1]) + 1.0 / widths ** 2
        c = 1.0 / (2.0 * T[:, -1]) + self.rho
        return sherman_morrison_inverse(diag, c), sherman_morrison_det(diag, c)

    def evaluate(self, T: np.ndarray) -> np.ndarray:
        """
        Y-integral of the term at scale nodes

        Args:
            T: array (N, k) of positive scales

        Returns:
            Array (N,) of real values
        """
        T = np.atleast_2d(np.asarray(T, dtype=float))
        sig = self.sig
        N = T.shape[0]
        if self.is_zero:
            return np.zeros(N)
        slots = sig.k - 1

        prefactor = np.prod((4 * np.pi * T) ** (-(sig.m + 2 * sig.n) / 2), axis=1)
        y_cov = []
        for i in range(sig.m):
            inverse, det = self._block(T, self.y_widths[i])
            y_cov.append(inverse)
            prefactor = prefactor * (2 * np.pi) ** (slots / 2) / np.sqrt(det)
        w_cov = []
        for j in range(sig.n):
            inverse, det = self._block(T, self.w_widths[j])
            w_cov.append(2.0 * inverse)
            prefactor = prefactor * (2 * np.pi) ** slots / det

        variables = np.concatenate([1.0 / T, T[:, :-1] / T.sum(axis=1, keepdims=True)], axis=1)
        t_values = np.prod(variables[:, None, :] ** self.t_exponents[None, :, :], axis=2)

        total = np.zeros(N)
        for group in self.groups:
            weight = t_values @ group.coefficients
            moment = np.ones(N)
            for cov, terms in zip(y_cov, group.real_terms):
                moment = moment * contract_terms(terms, lambda a, b, c=cov: c[:, a, b])
            for cov, terms in zip(w_cov, group.complex_terms):
                moment = moment * contract_terms(terms, lambda a, b, c=cov: c[:, a, b])
            total = total + weight * moment
        return prefactor * total

    def scale_function(self, fixed: Optional[Tuple[int, float]] = None):
        """
        Integrand over the free scales for integrate_cube

        Args:
            fixed: (edge, value) holding one edge's scale constant; the
                returned function then takes the other k-1 scales in order
        """
        if fixed is None:
            return self.evaluate
        edge, value = fixed
        if not 1 <= edge <= self.sig.k:
            raise ConfigError(f"fixed edge {edge} outside 1..{self.sig.k}")

        def with_fixed(T_free: np.ndarray) -> np.ndarray:
            T_free = np.atleast_2d(T_free)
            column = np.full((T_free.shape[0], 1), value)
            T = np.concatenate([T_free[:, : edge - 1], column, T_free[:, edge - 1:]], axis=1)
            return self.evaluate(T)

        return with_fixed


def compile_terms(
    sig: SpaceSignature,
    p: List[List[int]],
    terms: Sequence[Assignments],
    test_input: TestInput,
    route: str = ROUTE_IBP,
    oriented: bool = True,
) -> WheelIntegrand:
    """Sum the polynomials of several decorated terms into one compiled integrand"""
    ring = integrand_ring(sig)
    poly = ring.zero
    for assignments in terms:
        poly = poly + term_polynomial(route, sig, p, assignments, test_input, oriented)
    logger.debug(f"Assembled {len(terms)} decorated terms by the {route} route")
    return WheelIntegrand(sig, test_input, poly)
