"""
Kernel service - heat kernel, Gaussian G_T, the split kernel E_T and propagators

E_T is lambda(G_T): the coefficient that drops dx_l is dG/dx_l = -x_l G/(2T),
the coefficient that drops dzbar_j is 2 dG/dz_j = -zbar_j G/(2T). Stored
component values carry the orientation sign (-1)^position of the dropped
line element in the order dx_1..dx_m, dzbar_1..dzbar_n.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from thftcalc.core.config import settings
from thftcalc.core.exceptions import ConfigError, NumericalError
from thftcalc.schemas.kernel import EComponent, SplitKind
from thftcalc.schemas.signature import Point, SpaceSignature

logger = logging.getLogger(__name__)


def _check_scale(T: float) -> None:
    if not T > 0:
        raise ConfigError(f"heat-kernel scale must be positive, got T={T}")


def line_elements(sig: SpaceSignature) -> List[str]:
    """Line elements of Y in canonical order"""
    return [f"dx_{l}" for l in range(1, sig.m + 1)] + [
        f"dzbar_{j}" for j in range(1, sig.n + 1)
    ]


def gaussian_values(x: np.ndarray, z: np.ndarray, T, sig: SpaceSignature) -> np.ndarray:
    """
    Vectorized G_T on arrays x (..., m) and z (..., n)

    T broadcasts against the leading shape.
    """
    T = np.asarray(T, dtype=float)
    r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
    r2 = r2 + np.sum(np.abs(np.asarray(z, dtype=complex)) ** 2, axis=-1)
    return (4 * np.pi * T) ** (-(sig.m + 2 * sig.n) / 2) * np.exp(-r2 / (4 * T))


def e_coefficient_values(
    x: np.ndarray, z: np.ndarray, T, sig: SpaceSignature
) -> np.ndarray:
    """
    Unsigned E_T coefficients, shape (..., m + n), in line-element order

    Column l < m is -x_l G/(2T); column m + j is -zbar_j G/(2T).
    """
    T = np.asarray(T, dtype=float)
    G = gaussian_values(x, z, T, sig)
    factor = (-G / (2 * T))[..., None]
    coords = np.concatenate(
        [np.asarray(x, dtype=complex), np.conj(np.asarray(z, dtype=complex))], axis=-1
    )
    return factor * coords


def heat_kernel(p1: Point, p2: Point, T: float, sig: SpaceSignature) -> float:
    """(4 pi T)^-(2n+m)/2 exp(-|x1-x2|^2/4T) exp(-|z1-z2|^2/4T)"""
    _check_scale(T)
    p1.check(sig)
    p2.check(sig)
    diff = p1 - p2
    return float(gaussian_values(diff.x_array, diff.z, T, sig))


def gaussian_G(q: Point, T: float, sig: SpaceSignature) -> float:
    """G_T(x, z) = exp(-(|z|^2 + |x|^2)/4T) / (4 pi T)^((2n+m)/2)"""
    _check_scale(T)
    q.check(sig)
    return float(gaussian_values(q.x_array, q.z, T, sig))


def E_coefficients(q: Point, T: float, sig: SpaceSignature) -> List[EComponent]:
    """
    The m + n coefficient functions of E_T at q

    Returns:
        One EComponent per dropped line element, flagged E_d or E_dbar, with
        the remaining generators in canonical order
    """
    _check_scale(T)
    q.check(sig)
    values = e_coefficient_values(q.x_array, q.z, T, sig)
    elements = line_elements(sig)
    components = []
    for idx, dropped in enumerate(elements):
        sign = -1 if idx % 2 else 1
        components.append(
            EComponent(
                split=SplitKind.E_D if idx < sig.m else SplitKind.E_DBAR,
                dropped=dropped,
                monomial=elements[:idx] + elements[idx + 1:],
                value=complex(sign * values[idx]),
            )
        )
    return components


def _integrate_log_scale(func, epsilon: float, L: float, rtol: float) -> float:
    """int_eps^L func(T) dT in s = log T, raising on quadrature warnings"""
    result = quad(
        lambda s: func(math.exp(s)) * math.exp(s),
        math.log(epsilon),
        math.log(L),
        epsabs=0.0,
        epsrel=rtol,
        limit=200,
        full_output=1,
    )
    if len(result) > 3:
        logger.error(f"Kernel quadrature failed: {result[3]}")
        raise NumericalError(f"kernel quadrature failed: {result[3]}", residual=result[1])
    return result[0]


def propagator_derivative(
    q: Point,
    multi_index: Sequence[int],
    epsilon: float,
    L: float,
    sig: SpaceSignature,
    rtol: Optional[float] = None,
) -> np.ndarray:
    """
    (-1)^|I| int_eps^L zbar^I / (4T)^|I| E_T(q) dT, one entry per E component

    Args:
        q: evaluation point
        multi_index: holomorphic derivative orders I_1..I_n
        epsilon: lower cutoff
        L: upper cutoff
        rtol: relative tolerance (defaults to settings.kernel_rtol)

    Returns:
        Complex array of length m + n with orientation signs applied
    """
    if not (0 < epsilon <= L):
        raise ConfigError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")
    q.check(sig)
    multi_index = list(multi_index) or [0] * sig.n
    if len(multi_index) != sig.n or any(i < 0 for i in multi_index):
        raise ConfigError(f"multi-index must hold {sig.n} nonnegative orders")
    rtol = rtol or settings.kernel_rtol

    order = sum(multi_index)
    zbar = np.conj(q.z)
    zbar_power = complex(np.prod(zbar ** np.asarray(multi_index))) if sig.n else 1.0
    signs = np.asarray([-1 if idx % 2 else 1 for idx in range(sig.m + sig.n)])

    def component(T: float) -> np.ndarray:
        values = e_coefficient_values(q.x_array, q.z, T, sig) * signs
        return (-1) ** order * zbar_power / (4 * T) ** order * values

    result = np.zeros(sig.m + sig.n, dtype=complex)
    for idx in range(sig.m + sig.n):
        real = _integrate_log_scale(lambda T: component(T)[idx].real, epsilon, L, rtol)
        imag = _integrate_log_scale(lambda T: component(T)[idx].imag, epsilon, L, rtol)
        result[idx] = complex(real, imag)
    return result


def propagator(
    q: Point, epsilon: float, L: float, sig: SpaceSignature, rtol: Optional[float] = None
) -> np.ndarray:
    """Plain propagator int_eps^L E_T(q) dT"""
    return propagator_derivative(q, [], epsilon, L, sig, rtol)


def bf_propagator(z: complex, w: complex, epsilon: float, L: float) -> complex:
    """
    int_eps^L (1/4 pi t) ((zbar - wbar)/4t) exp(-|z-w|^2/4t) dt, in closed form

    Equals (exp(-|z-w|^2/4L) - exp(-|z-w|^2/4eps)) / (4 pi (z - w)).
    """
    if not (0 < epsilon <= L):
        raise ConfigError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")
    d = complex(z) - complex(w)
    if d == 0:
        return 0j
    r2 = abs(d) ** 2
    return (math.exp(-r2 / (4 * L)) - math.exp(-r2 / (4 * epsilon))) / (4 * math.pi * d)


def bf_heat_form(z: complex, w: complex, epsilon: float) -> complex:
    """K_eps coefficient (1/4 pi eps) ((zbar - wbar)/4 eps) exp(-|z-w|^2/4 eps)"""
    _check_scale(epsilon)
    d = complex(z) - complex(w)
    return (d.conjugate() / (4 * epsilon)) * math.exp(-abs(d) ** 2 / (4 * epsilon)) / (
        4 * math.pi * epsilon
    )
