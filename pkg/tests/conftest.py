"""
Shared fixtures
"""

import pytest

from thftcalc.schemas.experiment import LadderSpec
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.schemas.wheel import PolynomialTerm, TestInput


def sig_of(m: int, n: int, k: int) -> SpaceSignature:
    return SpaceSignature(m=m, n=n, k=k)


def polynomial_input(terms, **kwargs) -> TestInput:
    """TestInput from (coefficient, {variable: power}) pairs"""
    return TestInput(
        terms=[PolynomialTerm(coefficient=c, powers=powers) for c, powers in terms],
        **kwargs,
    )


@pytest.fixture
def gaussian_input() -> TestInput:
    """Unit-width centered Gaussian"""
    return TestInput()


@pytest.fixture
def holomorphic_input() -> TestInput:
    """w^1 + w^2 + w^1 w^2 + y^1 w^1 + y^1 w^1 w^2 on two slots"""
    return polynomial_input(
        [
            (1, {"w_1_1": 1}),
            (1, {"w_2_1": 1}),
            (1, {"w_1_1": 1, "w_2_1": 1}),
            (1, {"y_1_1": 1, "w_1_1": 1}),
            (1, {"y_1_1": 1, "w_1_1": 1, "w_2_1": 1}),
        ]
    )


@pytest.fixture
def symmetric_input() -> TestInput:
    """Damping symmetric under cyclic relabeling of the edges"""
    return polynomial_input(
        [(1, {}), ("1/2", {"y_1_1": 1, "y_2_1": 1}), (3, {"y_1_1": 2})],
        default_width=1.0,
        closing_width=1.0,
    )


@pytest.fixture
def ladder() -> LadderSpec:
    return LadderSpec()


@pytest.fixture
def precise_ladder() -> LadderSpec:
    return LadderSpec(quad_rtol=1e-11, quad_atol=1e-15, rungs=12)
