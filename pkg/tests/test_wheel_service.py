import math
from itertools import combinations

import numpy as np
import pytest

from thftcalc.core.config import settings
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.kernel import SplitKind
from thftcalc.schemas.report import Verdict
from thftcalc.schemas.wheel import EdgeDecoration, WheelData
from thftcalc.services.integrand_service import compile_terms, direct_polynomial, integrand_ring
from thftcalc.services.wheel_service import (
    WheelService,
    admissible_S,
    cyclic_relabel,
    direct_weight_quadrature,
    in_window,
    pre_ibp_monte_carlo,
    rotate_edges,
    term_integrand_at,
    undecomposed_polynomial,
    vanishes_algebraically,
    wheel_terms,
)

from tests.conftest import polynomial_input, sig_of


def plain(m, n, k):
    return WheelData.plain(sig_of(m, n, k))


@pytest.mark.parametrize("m,n,k,count", [(2, 1, 4, 10), (2, 1, 3, 3), (0, 2, 3, 4), (1, 0, 2, 3)])
def test_admissible_subsets(m, n, k, count):
    subsets = admissible_S(sig_of(m, n, k))
    assert len(subsets) == count
    assert all(in_window(sig_of(m, n, k), S) for S in subsets)


def test_admissible_order():
    assert admissible_S(sig_of(1, 1, 3)) == [[1], [2], [3], [1, 2], [1, 3], [2, 3]]


@pytest.mark.parametrize("m,n", [(m, n) for m in range(4) for n in range(4) if m + n >= 1])
def test_admissible_bounds_sweep(m, n):
    for k in range(1, 6):
        sig = sig_of(m, n, k)
        subsets = admissible_S(sig)
        assert all(m <= len(S) <= k - n for S in subsets)
        assert len(subsets) == sum(math.comb(k, s) for s in range(m, k - n + 1))
        every = [list(S) for size in range(k + 1) for S in combinations(range(1, k + 1), size)]
        assert [S for S in every if in_window(sig, S)] == subsets



@pytest.mark.parametrize("m,n", [(2, 1), (1, 2)])
def test_edge_case_vanishing_report(m, n):
    report = vanishes_algebraically(sig_of(m, n, 3))
    assert report.vanishes and report.proven
    assert report.mode == "edge_case"
    assert report.message == "vanishes: algebraic (edge case)"


def test_degree_vanishing_report():
    report = vanishes_algebraically(sig_of(2, 2, 3))
    assert report.mode == "degree"
    assert report.checked_terms == 8


@pytest.mark.parametrize("m,n", [(1, 0), (0, 1)])
def test_tadpole_vanishing_report(m, n):
    assert vanishes_algebraically(sig_of(m, n, 1)).mode == "tadpole"


def test_evaluation_range_report():
    report = vanishes_algebraically(sig_of(1, 0, 2))
    assert not report.vanishes
    assert report.message == "requires numerical evaluation"
    assert report.admissible == [[1], [2], [1, 2]]


def test_unproven_report_skips_algebra():
    report = vanishes_algebraically(sig_of(2, 1, 3), proof=False)
    assert report.vanishes and not report.proven


def test_weight_term_outside_window_is_exact_zero(gaussian_input):
    service = WheelService()
    wd = plain(1, 1, 3)
    assert service.weight_term(wd, EdgeDecoration(), gaussian_input, 0.1, 1.0) == 0.0
    small = plain(1, 1, 2)
    dec = EdgeDecoration(S=[1], indices={1: 1})
    assert service.weight_term(small, dec, gaussian_input, 0.1, 1.0) == 0.0
    assert service.weight_total(small, gaussian_input, 0.1, 1.0) == 0.0


def test_weight_term_rejects_bad_decoration(gaussian_input):
    service = WheelService()
    with pytest.raises(ConfigError):
        service.weight_term(plain(1, 1, 3), EdgeDecoration(S=[4], indices={4: 1}), gaussian_input, 0.1, 1.0)
    with pytest.raises(ConfigError):
        service.weight_total(plain(1, 1, 3), gaussian_input, 1.0, 0.1)


def test_weight_total_matches_direct_quadrature(gaussian_input):
    total = WheelService().weight_total(plain(1, 0, 2), gaussian_input, 0.05, 1.0)
    assert total == pytest.approx(
        direct_weight_quadrature(plain(1, 0, 2), gaussian_input, 0.05, 1.0), rel=1e-6
    )


@pytest.mark.parametrize("p", [[[0], [0], [0]], [[0], [1], [0]]])
def test_weight_total_matches_undecomposed_quadrature(precise_ladder, holomorphic_input, p):
    wd = WheelData(sig=sig_of(1, 1, 3), p=p)
    total = WheelService(precise_ladder).weight_total(wd, holomorphic_input, 0.25, 1.0)
    assert total != 0.0
    assert direct_weight_quadrature(wd, holomorphic_input, 0.25, 1.0) == pytest.approx(total, rel=1e-6)


def test_undecomposed_polynomial_sums_admissible_terms(holomorphic_input):
    wd = WheelData(sig=sig_of(1, 1, 3), p=[[0], [1], [0]])
    decomposed = sum(
        (direct_polynomial(wd.sig, wd.p, a, holomorphic_input) for a in wheel_terms(wd.sig)),
        integrand_ring(wd.sig).zero,
    )
    assert undecomposed_polynomial(wd, holomorphic_input) == decomposed


def test_direct_quadrature_rejects_bad_window(gaussian_input):
    with pytest.raises(ConfigError):
        direct_weight_quadrature(plain(1, 0, 2), gaussian_input, 0.5, 0.25)
    assert direct_weight_quadrature(plain(2, 1, 3), gaussian_input, 0.25, 1.0) == 0.0



def test_weight_total_sums_terms(gaussian_input):
    service = WheelService()
    wd = plain(1, 0, 2)
    term = service.weight_term(wd, EdgeDecoration(S=[1, 2], indices={1: 1, 2: 1}), gaussian_input, 0.1, 1.0)
    assert service.weight_total(wd, gaussian_input, 0.1, 1.0) == pytest.approx(term, rel=1e-12)


def test_weight_is_linear_in_test_input(precise_ladder):
    service = WheelService(precise_ladder)
    wd = plain(1, 0, 2)
    first = polynomial_input([(1, {})])
    second = polynomial_input([(1, {"y_1_1": 2})])
    combined = first.combine(second, "2", "-1/3")
    w1 = service.weight_total(wd, first, 0.1, 1.0)
    w2 = service.weight_total(wd, second, 0.1, 1.0)
    assert service.weight_total(wd, combined, 0.1, 1.0) == pytest.approx(2 * w1 - w2 / 3, rel=1e-8)


def test_pair_weight_limit_converges(gaussian_input):
    report = WheelService().epsilon_limit(plain(1, 0, 2), gaussian_input, 1.0)
    assert report.verdict == Verdict.CONVERGED
    assert len(report.ladder) == settings.ladder_rungs
    assert report.ladder[0].epsilon == 2.0 ** -settings.ladder_first_rung
    assert report.extrapolated == pytest.approx(
        direct_weight_quadrature(plain(1, 0, 2), gaussian_input, 0.0, 1.0), rel=1e-4
    )


def test_holomorphic_wheel_limit_converges(holomorphic_input):
    report = WheelService().epsilon_limit(plain(1, 1, 3), holomorphic_input, 1.0)
    assert report.verdict == Verdict.CONVERGED
    assert abs(report.extrapolated) > 1e-3


@pytest.mark.slow
def test_holomorphic_wheel_limit_with_derivative_converges(holomorphic_input):
    wd = WheelData(sig=sig_of(1, 1, 3), p=[[0], [1], [0]])
    report = WheelService().epsilon_limit(wd, holomorphic_input, 1.0)
    assert report.verdict == Verdict.CONVERGED
    assert report.extrapolated != 0.0



def test_vanishing_wheel_ladder_is_zero(gaussian_input):
    report = WheelService().epsilon_limit(plain(2, 1, 3), gaussian_input)
    assert report.verdict == Verdict.CONVERGED
    assert report.extrapolated == 0.0
    assert all(point.value == 0.0 for point in report.ladder)


def test_direct_and_ibp_weights_agree():
    phi = polynomial_input([(1, {}), (1, {"w_1_1": 1, "wbar_2_1": 1})])
    wd = WheelData(sig=sig_of(1, 1, 3), p=[[0], [1], [0]])
    ibp = WheelService(route="ibp").weight_total(wd, phi, 0.25, 1.0)
    direct = WheelService(route="direct").weight_total(wd, phi, 0.25, 1.0)
    assert ibp == pytest.approx(direct, rel=1e-7, abs=1e-12)


def test_rotate_edges():
    assert rotate_edges([2, 3], 3, 1) == [1, 2]
    assert rotate_edges([1], 3, 1) == [3]
    assert rotate_edges([1, 2], 4, 0) == [1, 2]


@pytest.mark.parametrize("shift", [1, 2])
def test_cyclic_relabel_invariance(symmetric_input, shift):
    sig = sig_of(1, 0, 3)
    wd = WheelData.plain(sig)
    rotated, relabeled = cyclic_relabel(wd, symmetric_input, shift)
    original = compile_terms(sig, wd.p, wheel_terms(sig), symmetric_input)
    moved = compile_terms(sig, rotated.p, wheel_terms(sig), relabeled)
    T = np.array([[0.4, 1.1, 2.3], [0.9, 0.2, 0.6]])
    assert np.allclose(
        original.evaluate(T), moved.evaluate(np.roll(T, -shift, axis=1)), rtol=1e-9
    )


def test_cyclic_relabel_needs_symmetric_damping(gaussian_input):
    with pytest.raises(ConfigError):
        cyclic_relabel(plain(1, 0, 3), gaussian_input)


def test_pre_ibp_monte_carlo_matches_exact():
    wd = plain(1, 0, 2)
    phi = polynomial_input([(1, {}), (1, {"y_1_1": 2})])
    assignments = ((SplitKind.E_D, 1), (SplitKind.E_D, 1))
    T = [0.8, 1.2]
    mean, stderr = pre_ibp_monte_carlo(wd, assignments, phi, T, samples=200_000, seed=7)
    exact = term_integrand_at(wd, assignments, phi, T)
    assert abs(mean - exact) < 4 * stderr


@pytest.mark.slow
def test_pre_ibp_monte_carlo_holomorphic_term():
    wd = WheelData(sig=sig_of(1, 1, 3), p=[[0], [1], [0]])
    phi = polynomial_input([(1, {}), (1, {"w_1_1": 1, "w_2_1": 1})])
    assignments = ((SplitKind.E_D, 1), (SplitKind.E_DBAR, 1), (SplitKind.E_D, 1))
    T = [0.6, 1.0, 0.8]
    mean, stderr = pre_ibp_monte_carlo(wd, assignments, phi, T, samples=1_000_000, seed=17)
    exact = term_integrand_at(wd, assignments, phi, T)
    assert abs(mean - exact) < 4 * stderr
