"""
Graded exterior algebra over the center-of-mass coordinates of (R^m x C^n)^slots

Only dy and dwbar generators are materialized; the holomorphic dz volume is a
flag on the context. Terms are stored for the canonical generator order
(kind, vertex, coord) with dy before dwbar.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Tuple

from sympy.polys.rings import PolyElement

from thftcalc.core.constants import KIND_DWBAR, KIND_DY, KIND_ORDER
from thftcalc.core.exceptions import SignatureMismatchError
from thftcalc.schemas.signature import BiDegree, SpaceSignature
from thftcalc.utils.polynomials import ScalarRing, coefficient_sum, scalar_ring


@dataclass(frozen=True)
class Generator:
    """A one-form generator dy^vertex_coord or dwbar^vertex_coord"""

    kind: str
    vertex: int
    coord: int

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ValueError(f"unknown generator kind '{self.kind}'")

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        return (KIND_ORDER[self.kind], self.vertex, self.coord)

    def __lt__(self, other: "Generator") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"{self.kind}^{self.vertex}_{self.coord}"


Monomial = Tuple[Generator, ...]


@dataclass(frozen=True)
class FormContext:
    """Signature, number of slots and coefficient ring shared by forms"""

    sig: SpaceSignature
    slots: int
    generic: bool = False
    holomorphic_volume: bool = True

    @property
    def ring(self) -> ScalarRing:
        return scalar_ring(self.sig.m, self.sig.n, self.slots, self.sig.k, self.generic)

    def generators(self) -> List[Generator]:
        gens = [
            Generator(KIND_DY, a, i)
            for a in range(1, self.slots + 1)
            for i in range(1, self.sig.m + 1)
        ]
        gens += [
            Generator(KIND_DWBAR, a, j)
            for a in range(1, self.slots + 1)
            for j in range(1, self.sig.n + 1)
        ]
        return sorted(gens)

    def check(self, generator: Generator) -> None:
        limit = self.sig.m if generator.kind == KIND_DY else self.sig.n
        if not (1 <= generator.vertex <= self.slots and 1 <= generator.coord <= limit):
            raise ValueError(f"generator {generator} does not exist for {self.sig}")


def _merge_sign(left: Monomial, right: Monomial) -> int:
    """Sign of sorting left + right; 0 when a generator repeats"""
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if b < a)
    return -1 if inversions % 2 else 1


@dataclass
class MixedForm:
    """Finite sum of polynomial coefficients times sorted generator monomials"""

    context: FormContext
    terms: Dict[Monomial, PolyElement] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for monomial, coeff in self.terms.items():
            ordered = tuple(sorted(monomial))
            if len(set(ordered)) != len(ordered):
                continue
            value = coeff if ordered == monomial else coeff * _sort_sign(monomial)
            if ordered in cleaned:
                value = cleaned[ordered] + value
            if value:
                cleaned[ordered] = value
            else:
                cleaned.pop(ordered, None)
        self.terms = cleaned

    # Construction

    @classmethod
    def zero(cls, context: FormContext) -> "MixedForm":
        return cls(context, {})

    @classmethod
    def scalar(cls, context: FormContext, value) -> "MixedForm":
        if not isinstance(value, PolyElement):
            value = context.ring.const(value)
        return cls(context, {(): value})

    @classmethod
    def generator(cls, context: FormContext, gen: Generator, coeff=None) -> "MixedForm":
        context.check(gen)
        value = context.ring.one if coeff is None else coeff
        return cls(context, {(gen,): value})

    # Algebra

    def _same(self, other: "MixedForm") -> None:
        if self.context != other.context:
            raise SignatureMismatchError(
                f"forms over {self.context.sig} (slots={self.context.slots}) and "
                f"{other.context.sig} (slots={other.context.slots}) cannot be combined"
            )

    def __add__(self, other: "MixedForm") -> "MixedForm":
        self._same(other)
        terms = dict(self.terms)
        for monomial, coeff in other.terms.items():
            terms[monomial] = terms.get(monomial, self.context.ring.zero) + coeff
        return MixedForm(self.context, terms)

    def __neg__(self) -> "MixedForm":
        return MixedForm(self.context, {mon: -c for mon, c in self.terms.items()})

    def __sub__(self, other: "MixedForm") -> "MixedForm":
        return self + (-other)

    def scale(self, factor) -> "MixedForm":
        """Multiply every coefficient by a number or ring element"""
        if not isinstance(factor, PolyElement):
            factor = self.context.ring.const(factor)
        return MixedForm(self.context, {mon: c * factor for mon, c in self.terms.items()})

    def wedge(self, other: "MixedForm") -> "MixedForm":
        return wedge(self, other)

    def __xor__(self, other: "MixedForm") -> "MixedForm":
        return wedge(self, other)

    # Inspection

    def __iter__(self) -> Iterator[Tuple[Monomial, PolyElement]]:
        return iter(sorted(self.terms.items(), key=lambda kv: [g.sort_key for g in kv[0]]))

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedForm):
            return NotImplemented
        return self.context == other.context and (self - other).is_zero

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> List[int]:
        return sorted({len(mon) for mon in self.terms})

    def coefficient(self, monomial: Monomial) -> PolyElement:
        ordered = tuple(sorted(monomial))
        sign = _sort_sign(monomial)
        return self.terms.get(ordered, self.context.ring.zero) * sign

    def coefficient_sum(self) -> Fraction:
        """Sum of all rational coefficients over every term"""
        return coefficient_sum(self.terms.values())

    def __repr__(self) -> str:
        if not self.terms:
            return "MixedForm(0)"
        parts = [
            f"({coeff.as_expr()})*" + "^".join(str(g) for g in mon) if mon else f"({coeff.as_expr()})"
            for mon, coeff in self
        ]
        return "MixedForm(" + " + ".join(parts) + ")"


def _sort_sign(monomial: Monomial) -> int:
    """Permutation sign bringing a monomial to canonical order"""
    keys = [g.sort_key for g in monomial]
    inversions = sum(
        1 for i in range(len(keys)) for j in range(i + 1, len(keys)) if keys[j] < keys[i]
    )
    return -1 if inversions % 2 else 1


def bidegree(monomial: Monomial) -> BiDegree:
    de_rham = sum(1 for g in monomial if g.kind == KIND_DY)
    return BiDegree(de_rham=de_rham, dolbeault=len(monomial) - de_rham)


def wedge(a: MixedForm, b: MixedForm) -> MixedForm:
    """Graded-commutative product; repeated generators annihilate"""
    a._same(b)
    terms: Dict[Monomial, PolyElement] = {}
    zero = a.context.ring.zero
    for left, c_left in a.terms.items():
        for right, c_right in b.terms.items():
            sign = _merge_sign(left, right)
            if not sign:
                continue
            merged = tuple(sorted(left + right))
            product = c_left * c_right
            terms[merged] = terms.get(merged, zero) + (product if sign > 0 else -product)
    return MixedForm(a.context, terms)


def wedge_all(forms: List[MixedForm], context: FormContext) -> MixedForm:
    result = MixedForm.scalar(context, 1)
    for form in forms:
        result = wedge(result, form)
        if result.is_zero:
            break
    return result


@dataclass
class PolyVectorField:
    """Finite sum of polynomial coefficients times vector fields dual to generators"""

    context: FormContext
    components: Dict[Generator, PolyElement] = field(default_factory=dict)

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        if self.context != other.context:
            raise SignatureMismatchError("vector fields over different signatures")
        components = dict(self.components)
        for gen, coeff in other.components.items():
            components[gen] = components.get(gen, self.context.ring.zero) + coeff
        return PolyVectorField(self.context, components)


def contract(X: PolyVectorField, form: MixedForm) -> MixedForm:
    """Interior product: a degree -1 graded derivation"""
    if X.context != form.context:
        raise SignatureMismatchError(
            f"vector field over {X.context.sig} cannot contract a form over {form.context.sig}"
        )
    terms: Dict[Monomial, PolyElement] = {}
    zero = form.context.ring.zero
    for monomial, coeff in form.terms.items():
        for idx, gen in enumerate(monomial):
            component = X.components.get(gen)
            if component is None or not component:
                continue
            rest = monomial[:idx] + monomial[idx + 1:]
            value = component * coeff
            terms[rest] = terms.get(rest, zero) + (value if idx % 2 == 0 else -value)
    return MixedForm(form.context, terms)


def bidegree_partition(form: MixedForm) -> Dict[BiDegree, MixedForm]:
    """Homogeneous components keyed by bidegree; they sum back to the input"""
    buckets: Dict[BiDegree, Dict[Monomial, PolyElement]] = {}
    for monomial, coeff in form.terms.items():
        buckets.setdefault(bidegree(monomial), {})[monomial] = coeff
    return {deg: MixedForm(form.context, terms) for deg, terms in buckets.items()}


def zero_by_degree(form: MixedForm, sig: SpaceSignature) -> bool:
    """Whether every term exceeds the de Rham or Dolbeault dimension of Y^(k-1)"""
    de_rham_max = sig.m * (sig.k - 1)
    dolbeault_max = sig.n * (sig.k - 1)
    for monomial in form.terms:
        deg = bidegree(monomial)
        if deg.de_rham <= de_rham_max and deg.dolbeault <= dolbeault_max:
            return False
    return True
