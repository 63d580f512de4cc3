"""
Exact polynomial rings over the scalar variables of a wheel

Variables are named after their role:
    y_<a>_<i>, w_<a>_<j>, wbar_<a>_<j>   center-of-mass coordinates (a <= slots)
    iT_<a>                             the formal symbol 1/T_a (a <= k)
    r_<a>                              the ratio T_a / (T_1 + ... + T_k) (a < k)
    c_<e>_<d|b><i>                     generic edge coefficients
"""

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, xring

from thftcalc.core.constants import (
    VAR_GENERIC,
    VAR_INV_T,
    VAR_RATIO,
    VAR_W,
    VAR_WBAR,
    VAR_Y,
)
from thftcalc.schemas.wheel import TestInput


def qq(value) -> "QQ.dtype":
    """Exact QQ element from an int, Fraction or 'p/q' string"""
    fraction = Fraction(value)
    return QQ(fraction.numerator, fraction.denominator)


def to_fraction_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class ScalarRing:
    """A sympy polynomial ring over QQ with named lookups"""

    def __init__(self, m: int, n: int, slots: int, k: int, generic: bool = False):
        self.m = m
        self.n = n
        self.slots = slots
        self.k = k
        self.generic_coefficients = generic

        names: List[str] = []
        for a in range(1, slots + 1):
            names += [f"{VAR_Y}_{a}_{i}" for i in range(1, m + 1)]
        for a in range(1, slots + 1):
            names += [f"{VAR_W}_{a}_{j}" for j in range(1, n + 1)]
            names += [f"{VAR_WBAR}_{a}_{j}" for j in range(1, n + 1)]
        names += [f"{VAR_INV_T}_{a}" for a in range(1, k + 1)]
        names += [f"{VAR_RATIO}_{a}" for a in range(1, k)]
        if generic:
            for edge in range(1, k + 1):
                names += [f"{VAR_GENERIC}_{edge}_d{i}" for i in range(1, m + 1)]
                names += [f"{VAR_GENERIC}_{edge}_b{j}" for j in range(1, n + 1)]

        self.names = names
        self.ring, gens = xring(",".join(names), QQ)
        self._gens: Dict[str, PolyElement] = dict(zip(names, gens))
        self._index: Dict[str, int] = {name: i for i, name in enumerate(names)}

    @property
    def zero(self) -> PolyElement:
        return self.ring.zero

    @property
    def one(self) -> PolyElement:
        return self.ring.one

    def const(self, value) -> PolyElement:
        return self.ring.ground_new(qq(value))

    def gen(self, name: str) -> PolyElement:
        try:
            return self._gens[name]
        except KeyError:
            raise ValueError(f"variable {name} is not part of this ring") from None

    def index(self, name: str) -> int:
        return self._index[name]

    def y(self, vertex: int, coord: int) -> PolyElement:
        return self.gen(f"{VAR_Y}_{vertex}_{coord}")

    def w(self, vertex: int, coord: int) -> PolyElement:
        return self.gen(f"{VAR_W}_{vertex}_{coord}")

    def wbar(self, vertex: int, coord: int) -> PolyElement:
        return self.gen(f"{VAR_WBAR}_{vertex}_{coord}")

    def inv_T(self, vertex: int) -> PolyElement:
        return self.gen(f"{VAR_INV_T}_{vertex}")

    def ratio(self, vertex: int) -> PolyElement:
        return self.gen(f"{VAR_RATIO}_{vertex}")

    def generic(self, edge: int, kind: str, index: int) -> PolyElement:
        tag = "d" if kind == VAR_Y else "b"
        return self.gen(f"{VAR_GENERIC}_{edge}_{tag}{index}")

    def y_sum(self, coord: int) -> PolyElement:
        """y^1_i + ... + y^slots_i"""
        return sum((self.y(a, coord) for a in range(1, self.slots + 1)), self.zero)

    def wbar_sum(self, coord: int) -> PolyElement:
        return sum((self.wbar(a, coord) for a in range(1, self.slots + 1)), self.zero)

    def from_test_input(self, test_input: TestInput) -> PolyElement:
        """Polynomial part of a test input as a ring element"""
        poly = self.zero
        for term in test_input.terms:
            monomial = self.const(term.fraction)
            for name, power in term.powers.items():
                monomial = monomial * self.gen(name) ** power
            poly = poly + monomial
        return poly

    def split_monomial(self, monom: Tuple[int, ...]) -> Dict[str, int]:
        """Nonzero exponents of a monomial keyed by variable name"""
        return {self.names[i]: e for i, e in enumerate(monom) if e}


@lru_cache(maxsize=None)
def scalar_ring(m: int, n: int, slots: int, k: int, generic: bool = False) -> ScalarRing:
    """Shared ring instance, so that elements of equal layouts can be combined"""
    return ScalarRing(m, n, slots, k, generic)


def coefficient_sum(polys: Iterable[PolyElement]) -> Fraction:
    total = Fraction(0)
    for poly in polys:
        for coeff in poly.values():
            total += to_fraction_qq(coeff)
    return total


def substitute(poly: PolyElement, mapping: Dict[PolyElement, PolyElement]) -> PolyElement:
    """Simultaneous substitution of generators"""
    if not mapping or not poly:
        return poly
    return poly.compose(list(mapping.items()))
