import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.moments import MomentRequest, TMatrix
from thftcalc.services.gaussian_service import (
    evaluate_t_dependence,
    gaussian_mass,
    gaussian_moment,
    monte_carlo_moment,
    sherman_morrison_det,
    sherman_morrison_inverse,
    sm_det_inverse,
    sm_inverse,
    t_dependence,
    tau_identity_check,
    zeta_identity_check,
)
from thftcalc.utils.wick import complex_moment_terms, perfect_matchings, real_moment_terms

from tests.conftest import sig_of


def request(exponents, normalized=True):
    return MomentRequest.from_exponents(exponents, normalized=normalized)


def density(T):
    """Unnormalized center-of-mass Gaussian for k = 3, m = 1"""
    T1, T2, T3 = T
    return lambda y1, y2: math.exp(
        -(y1 ** 2) / (4 * T1) - y2 ** 2 / (4 * T2) - (y1 + y2) ** 2 / (4 * T3)
    )


# =============================================================================
# Wick pairing
# =============================================================================


def test_perfect_matching_counts():
    assert len(list(perfect_matchings([0, 1, 2, 3]))) == 3
    assert len(list(perfect_matchings([0, 1, 2, 3, 4, 5]))) == 15
    assert list(perfect_matchings([0, 1, 2])) == []


def test_real_moment_terms_fourth_power():
    assert real_moment_terms((4,)) == ((3, ((0, 0), (0, 0))),)
    assert real_moment_terms((1, 2)) == ()


def test_complex_moment_terms_need_balance():
    assert len(complex_moment_terms((1, 1), (1, 1))) == 2
    assert complex_moment_terms((2,), (1,)) == ()
    assert complex_moment_terms((2,), (2,)) == ((2, ((0, 0), (0, 0))),)


# =============================================================================
# Sherman-Morrison
# =============================================================================


def test_sm_inverse_two_scales():
    assert sm_inverse(TMatrix(T=[2.0, 3.0]))[0, 0] == pytest.approx(6.0 / 5.0)


def test_sm_inverse_three_equal_scales():
    expected = np.array([[2 / 3, -1 / 3], [-1 / 3, 2 / 3]])
    M = TMatrix(T=[1.0, 1.0, 1.0])
    assert np.allclose(sm_inverse(M), expected, atol=1e-15)
    assert sm_det_inverse(M) == pytest.approx(1 / 3)


@pytest.mark.parametrize("seed", range(5))
def test_sm_inverse_against_dense(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        k = int(rng.integers(2, 8))
        M = TMatrix(T=list(rng.uniform(0.01, 10.0, size=k)))
        dense = M.dense()
        assert np.allclose(dense @ sm_inverse(M), np.eye(k - 1), atol=1e-10)
        assert sm_det_inverse(M) == pytest.approx(1 / np.linalg.det(dense), rel=1e-10)


@pytest.mark.slow
def test_sm_inverse_acceptance_grid():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        k = int(rng.integers(2, 10))
        M = TMatrix(T=list(rng.uniform(0.001, 100.0, size=k)))
        dense = M.dense()
        scale = np.linalg.norm(dense, 2) * np.linalg.norm(sm_inverse(M), 2)
        assert np.max(np.abs(dense @ sm_inverse(M) - np.eye(k - 1))) < 1e-12 * scale


def test_batched_sherman_morrison():
    rng = np.random.default_rng(7)
    diag = rng.uniform(0.5, 3.0, size=(4, 5))
    c = rng.uniform(0.1, 2.0, size=4)
    inverse = sherman_morrison_inverse(diag, c)
    dets = sherman_morrison_det(diag, c)
    for b in range(4):
        dense = np.diag(diag[b]) + c[b] * np.ones((5, 5))
        assert np.allclose(inverse[b], np.linalg.inv(dense), atol=1e-12)
        assert dets[b] == pytest.approx(np.linalg.det(dense), rel=1e-12)


# =============================================================================
# Moments
# =============================================================================


def test_moment_values_equal_scales():
    sig = sig_of(1, 0, 3)
    T = [1.0, 1.0, 1.0]
    assert gaussian_moment(request({(1, 1): 1, (2, 1): 1}), T, sig) == pytest.approx(-2 / 3)
    assert gaussian_moment(request({(1, 1): 2}), T, sig) == pytest.approx(4 / 3)


def test_odd_moments_vanish():
    sig = sig_of(2, 0, 4)
    assert gaussian_moment(request({(1, 1): 1, (2, 2): 2}), [1.0, 2.0, 0.5, 1.5], sig) == 0.0
    assert t_dependence(request({(3, 1): 3}), 4, sig) == []


def test_moment_rejects_unknown_slot():
    with pytest.raises(ConfigError):
        gaussian_moment(request({(3, 1): 2}), [1.0, 1.0, 1.0], sig_of(1, 0, 3))


@pytest.mark.parametrize(
    "exponents",
    [{}, {(1, 1): 2}, {(1, 1): 1, (2, 1): 1}, {(1, 1): 2, (2, 1): 2}, {(2, 1): 4}],
)
def test_moment_against_quadrature(exponents):
    sig = sig_of(1, 0, 3)
    T = [0.7, 1.6, 0.4]
    f = density(T)

    def weighted(y2, y1):
        return y1 ** exponents.get((1, 1), 0) * y2 ** exponents.get((2, 1), 0) * f(y1, y2)

    numerator, _ = dblquad(weighted, -30, 30, -30, 30, epsabs=1e-12, epsrel=1e-10)
    norm, _ = dblquad(lambda y2, y1: f(y1, y2), -30, 30, -30, 30, epsabs=1e-12, epsrel=1e-10)
    assert gaussian_moment(request(exponents), T, sig) == pytest.approx(
        numerator / norm, rel=1e-6, abs=1e-9
    )


def test_mass_is_heat_kernel_convolution():
    sig = sig_of(1, 0, 3)
    T = [0.7, 1.6, 0.4]
    f = density(T)
    raw, _ = dblquad(lambda y2, y1: f(y1, y2), -30, 30, -30, 30, epsabs=1e-12, epsrel=1e-10)
    product_norm = np.prod([(4 * np.pi * t) ** -0.5 for t in T])
    assert gaussian_mass(T, sig) == pytest.approx(raw * product_norm, rel=1e-7)
    bare = gaussian_moment(request({(1, 1): 2}, normalized=False), T, sig)
    assert bare == pytest.approx(gaussian_moment(request({(1, 1): 2}), T, sig) * gaussian_mass(T, sig))


def test_t_dependence_cross_term():
    monomials = t_dependence(request({(1, 1): 1, (2, 1): 1}, normalized=False), 3, sig_of(1, 0, 3))
    assert len(monomials) == 1
    assert monomials[0].lam == (1, 1, 0)
    assert monomials[0].coefficient == -2


def test_t_dependence_square():
    monomials = t_dependence(request({(1, 1): 2}, normalized=False), 3, sig_of(1, 0, 3))
    assert {mono.lam for mono in monomials} == {(1, 1, 0), (1, 0, 1)}


@pytest.mark.parametrize(
    "m,n,k,exponents",
    [
        (1, 0, 2, {(1, 1): 2}),
        (1, 0, 3, {(1, 1): 2, (2, 1): 2}),
        (2, 0, 3, {(1, 1): 1, (2, 1): 1, (1, 2): 2}),
        (1, 1, 4, {(1, 1): 2, (3, 1): 2, (2, 1): 2}),
        (2, 1, 4, {(3, 2): 4}),
    ],
)
def test_t_dependence_reassembles_bare_moment(m, n, k, exponents):
    sig = sig_of(m, n, k)
    req = request(exponents, normalized=False)
    monomials = t_dependence(req, k, sig)
    degree = req.degree
    for mono in monomials:
        assert mono.degree == degree
        assert mono.sum_power == degree / 2 + m / 2 + n
        for vertex, _ in exponents:
            assert mono.lam[vertex - 1] >= 1
    rng = np.random.default_rng(k)
    for _ in range(3):
        T = list(rng.uniform(0.2, 3.0, size=k))
        assert evaluate_t_dependence(monomials, T, sig) == pytest.approx(
            gaussian_moment(req, T, sig), rel=1e-12
        )


def test_monte_carlo_agrees_with_exact():
    sig = sig_of(1, 0, 3)
    T = [0.5, 1.0, 2.0]
    req = request({(1, 1): 2, (2, 1): 2})
    mean, stderr = monte_carlo_moment(req, T, sig, samples=200_000, seed=11)
    assert abs(mean - gaussian_moment(req, T, sig)) < 4 * stderr


def test_monte_carlo_is_reproducible():
    sig = sig_of(1, 0, 3)
    req = request({(1, 1): 2})
    first = monte_carlo_moment(req, [1.0, 1.0, 1.0], sig, samples=5_000, seed=3)
    assert monte_carlo_moment(req, [1.0, 1.0, 1.0], sig, samples=5_000, seed=3) == first
    assert monte_carlo_moment(req, [1.0, 1.0, 1.0], sig, samples=5_000, seed=4) != first


# =============================================================================
# zeta / tau identities
# =============================================================================


def _identity_params():
    """(other directions, checked directions, k) up to 3, 3, 6; k >= 5 is slow"""
    params = []
    for k in range(2, 7):
        for count in range(1, 4):
            for other in range(0, 4):
                marks = [pytest.mark.slow] if k >= 5 else []
                params.append(pytest.param(other, count, k, marks=marks))
    return params


@pytest.mark.parametrize("m,n,k", _identity_params())
def test_zeta_identities_exact(m, n, k):
    sig = sig_of(m, n, k)
    for i in range(1, n + 1):
        assert zeta_identity_check(i, sig) == 0


@pytest.mark.parametrize("n,m,k", _identity_params())
def test_tau_identities_exact(m, n, k):
    sig = sig_of(m, n, k)
    for j in range(1, m + 1):
        assert tau_identity_check(j, sig) == 0


def test_identities_at_rational_scales():
    sig = sig_of(1, 1, 3)
    assert zeta_identity_check(1, sig, T=[0.5, 2.0, 1.25]) == 0
    assert tau_identity_check(1, sig, T=[0.5, 2.0, 1.25]) == 0


@pytest.mark.parametrize("m,n,k", [(1, 2, 4), (2, 1, 3), (3, 3, 6), (1, 1, 2)])
def test_identities_numeric(m, n, k):
    sig = sig_of(m, n, k)
    for seed in range(100):
        for i in range(1, n + 1):
            assert zeta_identity_check(i, sig, mode="numeric", seed=seed) < 1e-6
        for j in range(1, m + 1):
            assert tau_identity_check(j, sig, mode="numeric", seed=seed) < 1e-6


def test_identities_need_directions():
    with pytest.raises(ConfigError):
        zeta_identity_check(1, sig_of(1, 0, 3))
    with pytest.raises(ConfigError):
        tau_identity_check(1, sig_of(0, 1, 3))
    with pytest.raises(ConfigError):
        zeta_identity_check(1, sig_of(0, 1, 1))
