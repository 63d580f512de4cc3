import random

import pytest

from thftcalc.core.constants import KIND_DWBAR, KIND_DY
from thftcalc.core.exceptions import SignatureMismatchError
from thftcalc.utils.forms import (
    FormContext,
    Generator,
    MixedForm,
    PolyVectorField,
    bidegree_partition,
    contract,
    wedge,
    wedge_all,
    zero_by_degree,
)

from tests.conftest import sig_of


def dy(vertex, coord=1):
    return Generator(KIND_DY, vertex, coord)


def dwbar(vertex, coord=1):
    return Generator(KIND_DWBAR, vertex, coord)


def one_form(ctx, gen, coeff=None):
    return MixedForm.generator(ctx, gen, coeff)


def random_form(ctx, rng, max_terms=4):
    """Sum of random monomials with small integer coefficients and linear y coefficients"""
    ring = ctx.ring
    gens = ctx.generators()
    form = MixedForm.zero(ctx)
    for _ in range(rng.randint(1, max_terms)):
        size = rng.randint(0, min(3, len(gens)))
        monomial = tuple(rng.sample(gens, size))
        coeff = ring.const(rng.randint(-3, 3)) + rng.randint(-2, 2) * ring.y(1, 1)
        form = form + MixedForm(ctx, {monomial: coeff})
    return form


def random_field(ctx, rng):
    ring = ctx.ring
    return PolyVectorField(
        ctx,
        {gen: ring.const(rng.randint(-2, 2)) + ring.w(1, 1) for gen in ctx.generators()},
    )


@pytest.fixture
def ctx():
    return FormContext(sig_of(2, 1, 3), slots=2)


def test_square_of_one_form_vanishes(ctx):
    a = one_form(ctx, dy(1))
    assert (a ^ a).is_zero


def test_one_forms_anticommute(ctx):
    a = one_form(ctx, dy(1, 2))
    b = one_form(ctx, dwbar(2))
    assert wedge(b, a) == -wedge(a, b)
    assert not wedge(a, b).is_zero


def test_wedge_multiplies_coefficients(ctx):
    ring = ctx.ring
    a = one_form(ctx, dy(1), ring.y(1, 1))
    b = one_form(ctx, dy(2), ring.const(3))
    product = a ^ b
    assert product.coefficient((dy(1), dy(2))) == 3 * ring.y(1, 1)
    assert product.coefficient((dy(2), dy(1))) == -3 * ring.y(1, 1)


def test_unsorted_monomials_are_canonicalized(ctx):
    ring = ctx.ring
    form = MixedForm(ctx, {(dwbar(1), dy(2)): ring.one})
    assert form.coefficient((dy(2), dwbar(1))) == -ring.one
    assert len(MixedForm(ctx, {(dy(1), dy(1)): ring.one})) == 0


def test_contract_dual_generator(ctx):
    ring = ctx.ring
    X = PolyVectorField(ctx, {dy(1): ring.one})
    assert contract(X, one_form(ctx, dy(1))) == MixedForm.scalar(ctx, 1)
    assert contract(X, one_form(ctx, dy(2))).is_zero


def test_contract_carries_field_coefficient(ctx):
    ring = ctx.ring
    X = PolyVectorField(ctx, {dy(1): ring.y(1, 1)})
    form = one_form(ctx, dy(1)) ^ one_form(ctx, dwbar(1))
    assert contract(X, form) == one_form(ctx, dwbar(1), ring.y(1, 1))


@pytest.mark.parametrize("seed", range(10))
def test_contract_is_graded_derivation(ctx, seed):
    rng = random.Random(seed)
    a = random_form(ctx, rng)
    b = random_form(ctx, rng)
    X = random_field(ctx, rng)
    expected = contract(X, a) ^ b
    for monomial, coeff in a.terms.items():
        piece = MixedForm(ctx, {monomial: coeff})
        sign = -1 if len(monomial) % 2 else 1
        expected = expected + (piece ^ contract(X, b)).scale(sign)
    assert contract(X, a ^ b) == expected


@pytest.mark.parametrize("seed", range(5))
def test_double_contraction_vanishes(ctx, seed):
    rng = random.Random(seed)
    X = random_field(ctx, rng)
    form = random_form(ctx, rng)
    assert contract(X, contract(X, form)).is_zero


def test_bidegree_partition_recombines(ctx):
    form = random_form(ctx, random.Random(3), max_terms=6)
    parts = bidegree_partition(form)
    total = MixedForm.zero(ctx)
    for part in parts.values():
        total = total + part
    assert total == form


def test_zero_by_degree_two_dy_on_one_slot():
    sig = sig_of(1, 1, 2)
    ctx = FormContext(sig, slots=sig.k)
    form = one_form(ctx, dy(1)) ^ one_form(ctx, dy(2))
    assert not form.is_zero
    assert zero_by_degree(form, sig)
    assert not zero_by_degree(one_form(ctx, dy(1)), sig)


def test_zero_by_degree_de_rham_excess():
    sig = sig_of(2, 1, 3)
    ctx = FormContext(sig, slots=sig.k)
    gens = [dy(1, 1), dy(1, 2), dy(2, 1), dy(2, 2), dy(3, 1)]
    form = wedge_all([one_form(ctx, g) for g in gens], ctx)
    assert not form.is_zero
    assert zero_by_degree(form, sig)


def test_mixing_contexts_raises():
    a = one_form(FormContext(sig_of(1, 1, 3), slots=2), dy(1))
    b = one_form(FormContext(sig_of(1, 1, 4), slots=3), dy(1))
    with pytest.raises(SignatureMismatchError):
        a + b
    with pytest.raises(SignatureMismatchError):
        a ^ b


def test_unknown_generator_rejected(ctx):
    with pytest.raises(ValueError):
        MixedForm.generator(ctx, dy(3))
    with pytest.raises(ValueError):
        Generator("dz", 1, 1)
