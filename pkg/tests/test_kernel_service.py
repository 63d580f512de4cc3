import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.kernel import SplitKind
from thftcalc.schemas.signature import Point
from thftcalc.services.kernel_service import (
    E_coefficients,
    bf_heat_form,
    bf_propagator,
    gaussian_G,
    heat_kernel,
    propagator,
    propagator_derivative,
)

from tests.conftest import sig_of


def point(x=(), z=()):
    return Point.from_arrays(list(x), list(z))


def test_heat_kernel_coincident_real_line():
    sig = sig_of(1, 0, 2)
    p = point([0.3])
    assert heat_kernel(p, p, 1.0, sig) == pytest.approx(0.2820947918, rel=1e-9)


def test_heat_kernel_complex_plane():
    sig = sig_of(0, 1, 2)
    value = heat_kernel(point(z=[1.0]), point(z=[0.0]), 0.25, sig)
    assert value == pytest.approx(math.exp(-1) / math.pi, rel=1e-12)


def test_heat_kernel_symmetric_and_matches_G():
    sig = sig_of(1, 1, 3)
    p1 = point([0.4], [0.2 - 0.7j])
    p2 = point([-1.1], [0.5 + 0.1j])
    T = 0.8
    assert heat_kernel(p1, p2, T, sig) == pytest.approx(heat_kernel(p2, p1, T, sig))
    assert heat_kernel(p1, p2, T, sig) == pytest.approx(gaussian_G(p1 - p2, T, sig))


@pytest.mark.parametrize("T", [0.1, 1.0, 3.0])
def test_G_normalized_on_real_line(T):
    sig = sig_of(1, 0, 2)
    total, _ = quad(lambda x: gaussian_G(point([x]), T, sig), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_G_normalized_on_complex_plane():
    sig = sig_of(0, 1, 2)
    total, _ = dblquad(
        lambda b, a: gaussian_G(point(z=[complex(a, b)]), 0.5, sig),
        -15, 15, -15, 15,
    )
    assert total == pytest.approx(1.0, abs=1e-8)


def test_semigroup_on_real_line():
    sig = sig_of(1, 0, 2)
    s, t, x = 0.3, 0.9, 0.7
    conv, _ = quad(
        lambda y: gaussian_G(point([x - y]), s, sig) * gaussian_G(point([y]), t, sig),
        -np.inf, np.inf,
    )
    assert conv == pytest.approx(gaussian_G(point([x]), s + t, sig), rel=1e-9)


def test_semigroup_on_complex_line():
    sig = sig_of(0, 1, 2)
    s, t, z = 0.4, 1.1, 0.6 - 0.3j

    def integrand(b, a):
        y = complex(a, b)
        return gaussian_G(point(z=[z - y]), s, sig) * gaussian_G(point(z=[y]), t, sig)

    conv, _ = dblquad(integrand, -12, 12, -12, 12, epsabs=1e-13, epsrel=1e-10)
    assert conv == pytest.approx(gaussian_G(point(z=[z]), s + t, sig), rel=1e-8)


def test_nonpositive_scale_rejected():
    sig = sig_of(1, 0, 2)
    with pytest.raises(ConfigError):
        gaussian_G(point([0.0]), 0.0, sig)


def test_E_vanishes_at_origin():
    sig = sig_of(2, 1, 3)
    for component in E_coefficients(point([0.0, 0.0], [0j]), 0.7, sig):
        assert component.value == 0


def test_E_components_are_gradient_of_G():
    sig = sig_of(1, 1, 3)
    x, z, T, h = 0.4, 0.3 - 0.5j, 0.6, 1e-5

    def G(dx=0.0, dz=0j):
        return gaussian_G(point([x + dx], [z + dz]), T, sig)

    dG_dx = (G(dx=h) - G(dx=-h)) / (2 * h)
    dG_da = (G(dz=h) - G(dz=-h)) / (2 * h)
    dG_db = (G(dz=1j * h) - G(dz=-1j * h)) / (2 * h)
    two_dz = dG_da - 1j * dG_db

    components = E_coefficients(point([x], [z]), T, sig)
    assert [c.split for c in components] == [SplitKind.E_D, SplitKind.E_DBAR]
    assert components[0].dropped == "dx_1"
    assert components[0].monomial == ["dzbar_1"]
    assert components[0].value == pytest.approx(dG_dx, rel=1e-7)
    # second line element carries the orientation sign -1
    assert components[1].value == pytest.approx(-two_dz, rel=1e-7)


def test_propagator_derivative_zero_at_origin():
    sig = sig_of(1, 1, 3)
    values = propagator_derivative(point([0.0], [0j]), [1], 0.1, 1.0, sig)
    assert np.all(values == 0)


def test_propagator_derivative_is_holomorphic_derivative():
    sig = sig_of(0, 1, 2)
    z0, h, eps, L = 0.5 + 0.3j, 5e-4, 0.2, 1.0

    def P(z):
        return propagator(point(z=[z]), eps, L, sig, rtol=1e-10)[0]

    d_re = (P(z0 + h) - P(z0 - h)) / (2 * h)
    d_im = (P(z0 + 1j * h) - P(z0 - 1j * h)) / (2 * h)
    finite_difference = (d_re - 1j * d_im) / 2
    exact = propagator_derivative(point(z=[z0]), [1], eps, L, sig, rtol=1e-10)[0]
    assert abs(exact - finite_difference) < 1e-6


@pytest.mark.parametrize("z", [0.5 + 0.3j, -1.2 + 0.1j, 0.05j])
def test_complex_propagator_matches_bf_closed_form(z):
    sig = sig_of(0, 1, 2)
    numeric = propagator(point(z=[z]), 0.05, 2.0, sig, rtol=1e-11)[0]
    assert numeric == pytest.approx(-2 * bf_propagator(z, 0j, 0.05, 2.0), rel=1e-8)


def test_bf_propagator_integrates_heat_form():
    z, w, eps, L = 0.7 - 0.2j, 0.1j, 0.1, 1.5
    re, _ = quad(lambda t: bf_heat_form(z, w, t).real, eps, L, epsabs=0, epsrel=1e-12)
    im, _ = quad(lambda t: bf_heat_form(z, w, t).imag, eps, L, epsabs=0, epsrel=1e-12)
    assert complex(re, im) == pytest.approx(bf_propagator(z, w, eps, L), rel=1e-9)
    assert bf_propagator(z, z, eps, L) == 0


def test_bad_multi_index_rejected():
    sig = sig_of(1, 1, 3)
    with pytest.raises(ConfigError):
        propagator_derivative(point([0.1], [0.2j]), [1, 2], 0.1, 1.0, sig)
    with pytest.raises(ConfigError):
        propagator_derivative(point([0.1], [0.2j]), [1], 1.0, 0.1, sig)
