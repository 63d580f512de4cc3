"""
Regulator service - scale integrals I_{N,k}(eps, L), AM-GM bounds and limit verdicts
"""

import logging
import math
from typing import List

from scipy.integrate import quad
from scipy.special import comb

from thftcalc.core.config import settings
from thftcalc.core.exceptions import NumericalError, RefusedLimitError
from thftcalc.schemas.regulator import LimitVerdict, RegulatorQuery
from thftcalc.schemas.report import LadderPoint

logger = logging.getLogger(__name__)

CLOSED_FORM_MAX_K = 3


def _check_limit(q: RegulatorQuery) -> None:
    if q.epsilon == 0 and q.N >= q.k:
        raise RefusedLimitError(
            f"I_{{{q.N},{q.k}}} at epsilon=0 has no guaranteed limit (N >= k)"
        )


def _harmonic(count: int) -> float:
    return sum(1.0 / i for i in range(1, count + 1))


def kth_antiderivative(s: float, N: int, k: int) -> float:
    """
    A k-th antiderivative F_k of s^-N, continuous at s = 0 when k > N

    F_k(s) = s^(k-N) / prod_{i=1..k} (i - N) when N is not in 1..k, and
    (-1)^(N-1) s^(k-N) (ln s - H_{k-N}) / ((N-1)! (k-N)!) otherwise.
    """
    if s == 0:
        if k > N:
            return 0.0
        raise RefusedLimitError(f"F_{k} of s^-{N} is singular at 0")
    if N < 1 or N > k:
        denominator = math.prod(i - N for i in range(1, k + 1))
        return s ** (k - N) / denominator
    sign = -1.0 if (N - 1) % 2 else 1.0
    return (
        sign
        * s ** (k - N)
        * (math.log(s) - _harmonic(k - N))
        / (math.factorial(N - 1) * math.factorial(k - N))
    )


def _closed_form(q: RegulatorQuery) -> float:
    """k-fold finite difference of F_k over the corners of [eps, L]^k"""
    total = 0.0
    for j in range(q.k + 1):
        corner = (q.k - j) * q.L + j * q.epsilon
        total += (-1) ** j * comb(q.k, j, exact=True) * kth_antiderivative(corner, q.N, q.k)
    return total


def irwin_hall_density(u: float, k: int) -> float:
    """Density of a sum of k independent uniforms on [0, 1]"""
    if u < 0 or u > k:
        return 0.0
    total = 0.0
    for j in range(int(math.floor(u)) + 1):
        total += (-1) ** j * comb(k, j, exact=True) * (u - j) ** (k - 1)
    return total / math.factorial(k - 1)


def _reduced_quadrature(q: RegulatorQuery) -> float:
    """(L - eps)^k int_0^k f_k(u) (k eps + (L - eps) u)^-N du, piecewise on [j, j+1]"""
    width = q.L - q.epsilon
    if width == 0:
        return 0.0

    def integrand(u: float) -> float:
        return irwin_hall_density(u, q.k) * (q.k * q.epsilon + width * u) ** (-q.N)

    total = 0.0
    for j in range(q.k):
        result = quad(
            integrand,
            j,
            j + 1,
            epsabs=0.0,
            epsrel=settings.kernel_rtol,
            limit=200,
            full_output=1,
        )
        if len(result) > 3:
            logger.error(f"Regulator quadrature failed on [{j}, {j + 1}]: {result[3]}")
            raise NumericalError(
                f"quadrature of I_{{{q.N},{q.k}}} failed: {result[3]}", residual=result[1]
            )
        total += result[0]
    return width ** q.k * total


def I_integral(q: RegulatorQuery) -> float:
    """
    I_{N,k}(eps, L) = int_[eps,L]^k dT / (T_1 + ... + T_k)^N

    Args:
        q: regulator query; epsilon = 0 is accepted only when N < k

    Returns:
        The integral, in closed form for k <= 3 and by one-dimensional
        quadrature over the density of the scale sum otherwise

    Raises:
        RefusedLimitError: epsilon = 0 with N >= k
        NumericalError: quadrature failure for k > 3
    """
    _check_limit(q)
    if q.N == 0:
        return (q.L - q.epsilon) ** q.k
    if q.epsilon == q.L:
        return 0.0
    if q.k <= CLOSED_FORM_MAX_K:
        value = _closed_form(q)
    else:
        value = _reduced_quadrature(q)
    logger.debug(f"I_{{{q.N},{q.k}}}({q.epsilon:.3e}, {q.L:.3e}) = {value:.12g}")
    return value


def I_integral_quadrature(q: RegulatorQuery) -> float:
    """Reduced-quadrature value for any k, used to cross-check the closed forms"""
    _check_limit(q)
    return _reduced_quadrature(q)


def amgm_bound(q: RegulatorQuery) -> float:
    """
    k^-N (int_eps^L T^(-N/k) dT)^k, which dominates I_{N,k}(eps, L)

    Raises:
        RefusedLimitError: epsilon = 0 with N >= k
    """
    _check_limit(q)
    if q.N == q.k:
        factor = math.log(q.L / q.epsilon)
    else:
        exponent = 1.0 - q.N / q.k
        factor = (q.L ** exponent - q.epsilon ** exponent) / exponent
    return q.k ** (-q.N) * factor ** q.k


def limit_verdict(N: int, k: int) -> LimitVerdict:
    """Finite iff N < k; no claim is made otherwise"""
    return LimitVerdict.FINITE if N < k else LimitVerdict.UNKNOWN


def cauchy_ladder(q: RegulatorQuery, rungs: int) -> List[LadderPoint]:
    """I_{N,k}(L 2^-j, L) for j = 1..rungs; q.epsilon is ignored"""
    ladder = []
    for j in range(1, rungs + 1):
        epsilon = q.L * 2.0 ** (-j)
        rung = RegulatorQuery(N=q.N, k=q.k, epsilon=epsilon, L=q.L)
        ladder.append(LadderPoint(epsilon=epsilon, value=I_integral(rung)))
    return ladder


def l_decay_ladder(N: int, k: int, L0: float, rungs: int) -> List[LadderPoint]:
    """
    eps -> 0 values I_{N,k}(0, L_i) along L_i = L0 2^-i

    Ladder points carry L_i in their epsilon field.
    """
    if N >= k:
        raise RefusedLimitError(f"L-decay needs a finite eps -> 0 limit, N={N} >= k={k}")
    ladder = []
    for i in range(rungs):
        L = L0 * 2.0 ** (-i)
        value = I_integral(RegulatorQuery(N=N, k=k, epsilon=0.0, L=L))
        ladder.append(LadderPoint(epsilon=L, value=value))
    logger.info(f"L-decay of I_{{{N},{k}}}: last value {ladder[-1].value:.3e}")
    return ladder
