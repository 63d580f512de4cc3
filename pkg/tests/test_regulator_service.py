import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import trapezoid

from thftcalc.core.exceptions import ConfigError, RefusedLimitError
from thftcalc.schemas.regulator import LimitVerdict, RegulatorQuery
from thftcalc.services.regulator_service import (
    I_integral,
    I_integral_quadrature,
    amgm_bound,
    cauchy_ladder,
    irwin_hall_density,
    kth_antiderivative,
    l_decay_ladder,
    limit_verdict,
)


def query(N, k, epsilon, L=1.0):
    return RegulatorQuery(N=N, k=k, epsilon=epsilon, L=L)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_zero_power_is_cube_volume(k):
    assert I_integral(query(0, k, 0.25, 1.5)) == pytest.approx(1.25 ** k)


def test_logarithmic_pair_limit():
    assert I_integral(query(1, 2, 0.0)) == pytest.approx(2 * math.log(2), rel=1e-14)
    assert I_integral(query(1, 2, 0.0, L=3.0)) == pytest.approx(6 * math.log(2), rel=1e-14)


def test_single_scale_logarithm():
    assert I_integral(query(1, 1, 0.01)) == pytest.approx(math.log(100), rel=1e-14)


@pytest.mark.parametrize("N,k", [(1, 1), (2, 2), (3, 2)])
def test_zero_cutoff_refused_without_guarantee(N, k):
    with pytest.raises(RefusedLimitError):
        I_integral(query(N, k, 0.0))
    with pytest.raises(ConfigError):
        amgm_bound(query(N, k, 0.0))


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("epsilon", [0.01, 0.3])
def test_closed_form_matches_quadrature(N, k, epsilon):
    q = query(N, k, epsilon, L=1.5)
    assert I_integral(q) == pytest.approx(I_integral_quadrature(q), rel=1e-8)


@pytest.mark.parametrize("N,k", [(1, 2), (2, 3), (1, 3)])
def test_closed_form_at_zero_cutoff_matches_quadrature(N, k):
    q = query(N, k, 0.0, L=2.0)
    assert I_integral(q) == pytest.approx(I_integral_quadrature(q), rel=1e-8)


def test_antiderivative_is_continuous_at_zero():
    assert kth_antiderivative(0.0, 1, 2) == 0.0
    assert abs(kth_antiderivative(1e-12, 1, 2)) < 1e-10
    with pytest.raises(RefusedLimitError):
        kth_antiderivative(0.0, 2, 2)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_irwin_hall_density_integrates_to_one(k):
    grid = np.linspace(0, k, 20_001)
    values = [irwin_hall_density(u, k) for u in grid]
    assert trapezoid(values, grid) == pytest.approx(1.0, abs=1e-4)


def test_amgm_bound_dominates():
    rng = np.random.default_rng(5)
    for _ in range(200):
        k = int(rng.integers(1, 6))
        N = int(rng.integers(0, k + 2))
        L = float(rng.uniform(0.5, 3.0))
        epsilon = float(rng.uniform(1e-3, 0.4)) if N >= k else float(rng.choice([0.0, 0.1]))
        q = query(N, k, epsilon, L)
        assert I_integral(q) <= amgm_bound(q) * (1 + 1e-9)


def test_limit_verdicts():
    assert limit_verdict(1, 2) == LimitVerdict.FINITE
    assert limit_verdict(0, 1) == LimitVerdict.FINITE
    assert limit_verdict(2, 2) == LimitVerdict.UNKNOWN
    assert limit_verdict(5, 3) == LimitVerdict.UNKNOWN


def test_integral_is_monotone_in_cutoffs():
    values_in_L = [I_integral(query(1, 2, 0.05, L)) for L in (0.5, 1.0, 2.0, 4.0)]
    values_in_eps = [I_integral(query(1, 2, eps, 1.0)) for eps in (0.4, 0.2, 0.1, 0.0)]
    assert all(b > a for a, b in zip(values_in_L, values_in_L[1:]))
    assert all(b > a for a, b in zip(values_in_eps, values_in_eps[1:]))


def test_cauchy_ladder_settles_for_finite_limit():
    ladder = cauchy_ladder(query(1, 2, 0.0), 40)
    assert [point.epsilon for point in ladder][:2] == [0.5, 0.25]
    values = [point.value for point in ladder]
    assert max(abs(b - a) for a, b in zip(values[-5:], values[-4:])) < 1e-8
    assert values[-1] == pytest.approx(2 * math.log(2), abs=1e-9)


def test_cauchy_ladder_grows_without_guarantee():
    values = [point.value for point in cauchy_ladder(query(2, 2, 0.0), 20)]
    assert values[-1] - values[-2] == pytest.approx(math.log(2), rel=1e-3)


def test_l_decay_ladder():
    ladder = l_decay_ladder(1, 2, 1.0, 25)
    assert ladder[0].epsilon == 1.0
    values = [point.value for point in ladder]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-6


def test_l_decay_refused_for_unknown_limit():
    with pytest.raises(RefusedLimitError):
        l_decay_ladder(2, 2, 1.0, 5)


def test_query_window_validation():
    with pytest.raises(ValidationError):
        RegulatorQuery(N=1, k=2, epsilon=2.0, L=1.0)
