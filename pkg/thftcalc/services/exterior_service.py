"""
Exterior service - kernel forms pulled back to the center-of-mass slots and
the exact proofs of the algebraic vanishing statements

Edges are oriented r^(a+1) - r^a. Edge a < k has argument q^a and lives on
slot a; the closing edge k has argument -(q^1 + ... + q^(k-1)). The unreduced
layout puts every edge on its own slot of Y^k and is used for degree counting.
"""

import logging
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from sympy.polys.rings import PolyElement

from thftcalc.core.constants import KIND_DWBAR, KIND_DY, VAR_WBAR, VAR_Y
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.kernel import SplitKind
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.utils.forms import (
    FormContext,
    Generator,
    MixedForm,
    PolyVectorField,
    contract,
    wedge,
    wedge_all,
    zero_by_degree,
)

logger = logging.getLogger(__name__)

# (split, dropped index) per edge
EdgeAssignment = Tuple[SplitKind, int]


def reduced_context(sig: SpaceSignature, generic: bool = False) -> FormContext:
    return FormContext(sig=sig, slots=sig.k - 1, generic=generic)


def unreduced_context(sig: SpaceSignature, generic: bool = False) -> FormContext:
    return FormContext(sig=sig, slots=sig.k, generic=generic)


def vertex_euler_field(ctx: FormContext, vertex: int) -> PolyVectorField:
    """X^a = sum_i y^a_i d/dy^a_i + sum_j wbar^a_j d/dwbar^a_j"""
    ring = ctx.ring
    components = {}
    for i in range(1, ctx.sig.m + 1):
        components[Generator(KIND_DY, vertex, i)] = ring.y(vertex, i)
    for j in range(1, ctx.sig.n + 1):
        components[Generator(KIND_DWBAR, vertex, j)] = ring.wbar(vertex, j)
    return PolyVectorField(ctx, components)


def generator_sum(ctx: FormContext, kind: str, coord: int, coefficient=1) -> MixedForm:
    """coefficient * (d^1 + ... + d^slots) for one coordinate"""
    form = MixedForm.zero(ctx)
    for a in range(1, ctx.slots + 1):
        form = form + MixedForm.generator(
            ctx, Generator(kind, a, coord), ctx.ring.const(coefficient)
        )
    return form


def _on_own_slot(ctx: FormContext, edge: int) -> bool:
    return ctx.slots == ctx.sig.k or edge < ctx.sig.k


def argument_differentials(ctx: FormContext, edge: int) -> List[MixedForm]:
    """d(arg_1), ..., d(arg_m), d(argbar_1), ..., d(argbar_n) of one edge"""
    sig = ctx.sig
    coords = [(KIND_DY, i) for i in range(1, sig.m + 1)]
    coords += [(KIND_DWBAR, j) for j in range(1, sig.n + 1)]
    if _on_own_slot(ctx, edge):
        return [MixedForm.generator(ctx, Generator(kind, edge, c)) for kind, c in coords]
    return [generator_sum(ctx, kind, c, -1) for kind, c in coords]


def argument_coordinates(ctx: FormContext, edge: int) -> List[PolyElement]:
    """arg_1, ..., arg_m, argbar_1, ..., argbar_n of one edge as ring elements"""
    sig = ctx.sig
    ring = ctx.ring
    if _on_own_slot(ctx, edge):
        return [ring.y(edge, i) for i in range(1, sig.m + 1)] + [
            ring.wbar(edge, j) for j in range(1, sig.n + 1)
        ]
    return [-ring.y_sum(i) for i in range(1, sig.m + 1)] + [
        -ring.wbar_sum(j) for j in range(1, sig.n + 1)
    ]


def unit_edge_forms(ctx: FormContext, edge: int) -> List[MixedForm]:
    """(-1)^idx times the wedge of all argument differentials but the idx-th"""
    differentials = argument_differentials(ctx, edge)
    units = []
    for idx in range(len(differentials)):
        rest = differentials[:idx] + differentials[idx + 1:]
        unit = wedge_all(rest, ctx)
        units.append(-unit if idx % 2 else unit)
    return units


def _split_indices(sig: SpaceSignature, split: SplitKind) -> List[int]:
    """Positions of the dropped line elements belonging to a split"""
    if split == SplitKind.E_D:
        return list(range(sig.m))
    if split == SplitKind.E_DBAR:
        return list(range(sig.m, sig.m + sig.n))
    raise ConfigError(f"{split.value} has no dropped line element")


def split_exists(sig: SpaceSignature, split: SplitKind) -> bool:
    if split == SplitKind.E_D:
        return sig.m >= 1
    if split == SplitKind.E_DBAR:
        return sig.n >= 1
    return True


def edge_form(
    sig: SpaceSignature,
    edge: int,
    split: SplitKind,
    generic: bool = False,
    reduced: bool = True,
) -> MixedForm:
    """
    Kernel piece of one edge as a form

    E_d and E_dbar carry the coefficients -arg iT_edge / 2 (or independent
    generic symbols); K_full is the volume of the argument; G is the constant 1.
    A split that does not exist for the signature gives the zero form.
    """
    if not 1 <= edge <= sig.k:
        raise ConfigError(f"edge {edge} outside 1..{sig.k}")
    ctx = reduced_context(sig, generic) if reduced else unreduced_context(sig, generic)
    if split == SplitKind.G:
        return MixedForm.scalar(ctx, 1)
    if split == SplitKind.K_FULL:
        return wedge_all(argument_differentials(ctx, edge), ctx)
    if not split_exists(sig, split):
        return MixedForm.zero(ctx)

    ring = ctx.ring
    units = unit_edge_forms(ctx, edge)
    args = argument_coordinates(ctx, edge)
    form = MixedForm.zero(ctx)
    for idx in _split_indices(sig, split):
        if generic:
            kind = VAR_Y if idx < sig.m else VAR_WBAR
            coord = idx + 1 if idx < sig.m else idx - sig.m + 1
            coeff = ring.generic(edge, kind, coord)
        else:
            coeff = -args[idx] * ring.inv_T(edge) * ring.const("1/2")
        form = form + units[idx].scale(coeff)
    return form


def _wheel_splits(sig: SpaceSignature, S: Sequence[int]) -> List[SplitKind]:
    return [SplitKind.E_D if edge in S else SplitKind.E_DBAR for edge in range(1, sig.k + 1)]


def s_term_form(
    sig: SpaceSignature, S: Sequence[int], generic: bool = False, reduced: bool = True
) -> MixedForm:
    """Wedge over edges 1..k of E_d on S and E_dbar elsewhere"""
    forms = [
        edge_form(sig, edge, split, generic, reduced)
        for edge, split in enumerate(_wheel_splits(sig, S), start=1)
    ]
    ctx = reduced_context(sig, generic) if reduced else unreduced_context(sig, generic)
    return wedge_all(forms, ctx)


def anomaly_s_term_form(
    sig: SpaceSignature, S: Sequence[int], generic: bool = False, reduced: bool = True
) -> MixedForm:
    """As s_term_form with K_full on the distinguished edge k"""
    if sig.k in S:
        raise ConfigError("S must exclude the distinguished edge")
    splits = _wheel_splits(sig, S)
    splits[-1] = SplitKind.K_FULL
    forms = [
        edge_form(sig, edge, split, generic, reduced)
        for edge, split in enumerate(splits, start=1)
    ]
    ctx = reduced_context(sig, generic) if reduced else unreduced_context(sig, generic)
    return wedge_all(forms, ctx)


def assemble_edge_case(sig: SpaceSignature) -> MixedForm:
    """
    theta ^ (i_X^1 ... i_X^(k-1) omega) for k = m + n

    omega is the product of the slot volumes, theta the contraction of the
    summed-slot volume by X^1 + ... + X^(k-1). The result is the zero form.
    """
    if sig.k != sig.m + sig.n or sig.k < 2:
        raise ConfigError(f"the edge case needs k = m + n >= 2, got {sig}")
    ctx = reduced_context(sig)
    fields = [vertex_euler_field(ctx, a) for a in range(1, sig.k)]

    omega = wedge_all(
        [wedge_all(argument_differentials(ctx, a), ctx) for a in range(1, sig.k)], ctx
    )
    inner = omega
    for X in reversed(fields):
        inner = contract(X, inner)

    summed = wedge_all(
        [generator_sum(ctx, KIND_DY, i) for i in range(1, sig.m + 1)]
        + [generator_sum(ctx, KIND_DWBAR, j) for j in range(1, sig.n + 1)],
        ctx,
    )
    theta = MixedForm.zero(ctx)
    for X in fields:
        theta = theta + contract(X, summed)
    result = wedge(theta, inner)
    logger.debug(
        f"Edge case {sig}: theta has {len(theta)} terms, inner {len(inner)}, "
        f"result {len(result)}"
    )
    return result


@lru_cache(maxsize=None)
def form_sign(sig: SpaceSignature, assignments: Tuple[EdgeAssignment, ...]) -> int:
    """
    Scalar orientation of one decorated term

    The unit-coefficient edge forms are wedged in edge order on Y^(k-1) and
    their coefficients summed; this pairs the product with the test input's
    form part, the sum of the complementary unit monomials.
    """
    if len(assignments) != sig.k:
        raise ConfigError(f"need one assignment per edge, got {len(assignments)}")
    ctx = reduced_context(sig)
    forms = []
    for edge, (split, index) in enumerate(assignments, start=1):
        if split == SplitKind.K_FULL:
            forms.append(wedge_all(argument_differentials(ctx, edge), ctx))
            continue
        if not split_exists(sig, split):
            return 0
        position = index - 1 if split == SplitKind.E_D else sig.m + index - 1
        forms.append(unit_edge_forms(ctx, edge)[position])
    total = wedge_all(forms, ctx).coefficient_sum()
    if total.denominator != 1:
        raise ConfigError(f"non-integral orientation {total} for {assignments}")
    return int(total)


def prove_vanishing(sig: SpaceSignature) -> Tuple[str, int]:
    """
    Exact proof that the wheel integrand vanishes when k <= m + n

    Returns:
        (mode, number of examined S-terms); mode is "degree" for k < m + n,
        "edge_case" for k = m + n >= 2 and "tadpole" for k = 1 = m + n

    Raises:
        ConfigError: when k > m + n
    """
    k, total = sig.k, sig.m + sig.n
    if k > total:
        raise ConfigError(f"{sig} has k > m + n, its weight must be evaluated")
    if k == total == 1:
        # the closing argument -sum over zero slots is identically 0
        coefficient_forms = [
            edge_form(sig, 1, split) for split in (SplitKind.E_D, SplitKind.E_DBAR)
        ]
        if not all(form.is_zero for form in coefficient_forms):
            raise ConfigError(f"tadpole form of {sig} did not vanish")
        return "tadpole", len(coefficient_forms)
    if k == total:
        result = assemble_edge_case(sig)
        if not result.is_zero:
            raise ConfigError(f"edge-case form of {sig} did not vanish: {result}")
        return "edge_case", 1

    checked = 0
    for size in range(k + 1):
        for S in combinations(range(1, k + 1), size):
            unreduced = s_term_form(sig, S, generic=True, reduced=False)
            reduced = s_term_form(sig, S, generic=True, reduced=True)
            if not zero_by_degree(unreduced, sig) or not reduced.is_zero:
                raise ConfigError(f"S={S} of {sig} survived degree counting")
            checked += 1
    return "degree", checked


def structural_s_term(sig: SpaceSignature, S: Sequence[int], anomaly: bool = False) -> bool:
    """Whether every kernel piece required by S exists for the signature"""
    edges = range(1, sig.k) if anomaly else range(1, sig.k + 1)
    splits = [SplitKind.E_D if e in S else SplitKind.E_DBAR for e in edges]
    return all(split_exists(sig, split) for split in splits)


def term_bidegree_counts(sig: SpaceSignature, S: Sequence[int], anomaly: bool = False) -> Dict[str, int]:
    """Total dy and dwbar degrees of an S-term before reduction"""
    edges = sig.k - 1 if anomaly else sig.k
    de_rham = len(S) * (sig.m - 1) + (edges - len(S)) * sig.m
    dolbeault = len(S) * sig.n + (edges - len(S)) * (sig.n - 1)
    if anomaly:
        de_rham += sig.m
        dolbeault += sig.n
    return {"de_rham": de_rham, "dolbeault": dolbeault}
