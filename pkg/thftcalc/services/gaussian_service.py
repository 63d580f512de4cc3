"""
Gaussian service - Sherman-Morrison algebra of M_T, Wick moments, the
T-dependence of moments and the zeta/tau operator identities

The center-of-mass Gaussian prod_a G_Ta(q^a) G_Tk(-sum q) is
exp(-q^T M q / 4) up to normalization, so real directions have covariance
2 M^-1 and complex directions <w_a wbar_b> = 4 (M^-1)_ab.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.rings import xring

from thftcalc.core.config import settings
from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.moments import MomentRequest, TMatrix
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.utils.polynomials import to_fraction_qq
from thftcalc.utils.wick import contract_terms, real_moment_terms

logger = logging.getLogger(__name__)


# =============================================================================
# Sherman-Morrison
# =============================================================================


def sherman_morrison_inverse(diag: np.ndarray, c) -> np.ndarray:
    """
    Inverse of diag(d) + c 11^T, vectorized over leading axes

    Args:
        diag: array (..., n) of positive diagonal entries
        c: array broadcastable to (...) of rank-one coefficients

    Returns:
        Array (..., n, n)
    """
    diag = np.asarray(diag, dtype=float)
    c = np.asarray(c, dtype=float)
    inv = 1.0 / diag
    denom = 1.0 + c * np.sum(inv, axis=-1)
    outer = inv[..., :, None] * inv[..., None, :]
    result = -(c / denom)[..., None, None] * outer
    idx = np.arange(diag.shape[-1])
    result[..., idx, idx] += inv
    return result


def sherman_morrison_det(diag: np.ndarray, c) -> np.ndarray:
    """det(diag(d) + c 11^T) by the matrix determinant lemma"""
    diag = np.asarray(diag, dtype=float)
    c = np.asarray(c, dtype=float)
    return np.prod(diag, axis=-1) * (1.0 + c * np.sum(1.0 / diag, axis=-1))


def sm_inverse(M: TMatrix) -> np.ndarray:
    """M_T^-1 with entries c_a delta_ab + d_ab, c_a = T_a, d_ab = -T_a T_b / sum T"""
    T = np.asarray(M.T, dtype=float)
    head = T[:-1]
    inverse = -np.outer(head, head) / T.sum()
    inverse[np.diag_indices(len(head))] += head
    return inverse


def sm_det_inverse(M: TMatrix) -> float:
    """1/det M_T = T_1 ... T_k / (T_1 + ... + T_k)"""
    T = np.asarray(M.T, dtype=float)
    return float(np.prod(T) / T.sum())


def gaussian_mass(T: Sequence[float], sig: SpaceSignature) -> float:
    """Bare mass of the center-of-mass Gaussian: (4 pi sum T)^-(m+2n)/2"""
    total = float(np.sum(T))
    return (4 * np.pi * total) ** (-(sig.m + 2 * sig.n) / 2)


# =============================================================================
# Moments
# =============================================================================


def _check_request(req: MomentRequest, k: int, sig: SpaceSignature) -> None:
    for vertex, coord in req.exponents:
        if not (1 <= vertex <= k - 1 and 1 <= coord <= sig.m):
            raise ConfigError(
                f"moment factor y^{vertex}_{coord} does not exist for {sig.with_k(k)}"
            )


def _block_exponents(req: MomentRequest, k: int, coord: int) -> Tuple[int, ...]:
    exps = req.exponents
    return tuple(exps.get((vertex, coord), 0) for vertex in range(1, k))


def gaussian_moment(req: MomentRequest, T: Sequence[float], sig: SpaceSignature) -> float:
    """
    Wick-pairing moment of y^nu under the center-of-mass Gaussian

    Pairs within one coordinate direction i use Cov = 2 M^-1; different
    directions are independent. The bare moment multiplies by gaussian_mass.
    """
    M = TMatrix(T=list(T))
    _check_request(req, M.k, sig)
    if req.degree % 2:
        return 0.0
    cov = 2.0 * sm_inverse(M)
    value = 1.0
    for coord in range(1, sig.m + 1):
        terms = real_moment_terms(_block_exponents(req, M.k, coord))
        if not terms:
            return 0.0
        value *= float(contract_terms(terms, lambda a, b: cov[a, b]))
    if not req.normalized:
        value *= gaussian_mass(T, sig)
    return value


@dataclass(frozen=True)
class TMonomial:
    """coefficient * T^lam / (sum T)^sum_power"""

    lam: Tuple[int, ...]
    coefficient: Fraction
    sum_power: Fraction

    @property
    def degree(self) -> int:
        return sum(self.lam)

    def evaluate(self, T: Sequence[float]) -> float:
        T = np.asarray(T, dtype=float)
        return float(self.coefficient) * float(np.prod(T ** np.asarray(self.lam))) / float(
            T.sum()
        ) ** float(self.sum_power)


def t_dependence(req: MomentRequest, k: int, sig: SpaceSignature) -> List[TMonomial]:
    """
    Exact T-dependence of a bare moment

    The bare moment equals (4 pi)^-(m/2+n) sum coefficient T^lam / (sum T)^p
    with p = |nu|/2 + m/2 + n; every y^a_i dividing y^nu forces T_a | T^lam and
    |lam| = |nu|.
    """
    _check_request(req, k, sig)
    if req.degree % 2:
        return []
    names = ",".join(f"T_{a}" for a in range(1, k + 1))
    ring, gens = xring(names, QQ)

    def pair(a: int, b: int):
        # numerators of 2 M^-1 over sum T, slots are 0-based
        if a == b:
            return 2 * sum((gens[a] * gens[c] for c in range(k) if c != a), ring.zero)
        return -2 * gens[a] * gens[b]

    numerator = ring.one
    for coord in range(1, sig.m + 1):
        terms = real_moment_terms(_block_exponents(req, k, coord))
        block = ring.zero
        for count, pairs in terms:
            product = ring(count)
            for a, b in pairs:
                product = product * pair(a, b)
            block = block + product
        numerator = numerator * block

    sum_power = Fraction(req.degree, 2) + Fraction(sig.m, 2) + sig.n
    monomials = [
        TMonomial(lam=tuple(monom), coefficient=to_fraction_qq(coeff), sum_power=sum_power)
        for monom, coeff in sorted(numerator.items())
    ]
    logger.debug(f"T-dependence of degree {req.degree} moment: {len(monomials)} terms")
    return monomials


def evaluate_t_dependence(
    monomials: Sequence[TMonomial], T: Sequence[float], sig: SpaceSignature
) -> float:
    """Reassemble the bare moment from its T-monomials"""
    prefactor = (4 * np.pi) ** (-(sig.m / 2 + sig.n))
    return prefactor * sum(mono.evaluate(T) for mono in monomials)


def monte_carlo_moment(
    req: MomentRequest,
    T: Sequence[float],
    sig: SpaceSignature,
    samples: Optional[int] = None,
    seed: int = 0,
) -> Tuple[float, float]:
    """
    Monte-Carlo estimate of the normalized moment and its standard error

    Streams are spawned from one SeedSequence per chunk, so the estimate is
    reproducible for a given (samples, seed, chunk size).
    """
    samples = samples or settings.mc_samples
    M = TMatrix(T=list(T))
    _check_request(req, M.k, sig)
    cov = 2.0 * np.linalg.inv(M.dense())
    chol = np.linalg.cholesky(cov)
    exps = req.exponents
    chunk = max(1, settings.chunk_size)
    n_chunks = -(-samples // chunk)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)

    total = 0.0
    total_sq = 0.0
    for idx, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        size = min(chunk, samples - idx * chunk)
        values = np.ones(size)
        for coord in range(1, sig.m + 1):
            y = rng.standard_normal((size, M.k - 1)) @ chol.T
            for vertex in range(1, M.k):
                power = exps.get((vertex, coord), 0)
                if power:
                    values = values * y[:, vertex - 1] ** power
        total += values.sum()
        total_sq += (values ** 2).sum()
    mean = total / samples
    variance = max(total_sq / samples - mean ** 2, 0.0)
    return float(mean), float(np.sqrt(variance / samples))


# =============================================================================
# zeta / tau identities
# =============================================================================


def _scale_symbols(k: int, T: Optional[Sequence[float]]) -> List[sp.Expr]:
    if T is None:
        return list(sp.symbols(f"T1:{k + 1}", positive=True))
    if len(T) != k:
        raise ConfigError(f"expected {k} scales, got {len(T)}")
    return [sp.Rational(str(t)) for t in T]


def _log_gaussian(sig: SpaceSignature, Ts: List[sp.Expr]):
    """log of prod_a G_Ta(q^a) G_Tk(-sum q) without normalization, w and wbar independent"""
    k = sig.k
    ys = {(a, i): sp.Symbol(f"y_{a}_{i}") for a in range(1, k) for i in range(1, sig.m + 1)}
    ws = {(a, j): sp.Symbol(f"w_{a}_{j}") for a in range(1, k) for j in range(1, sig.n + 1)}
    wbars = {
        (a, j): sp.Symbol(f"wbar_{a}_{j}") for a in range(1, k) for j in range(1, sig.n + 1)
    }
    expr = sp.Integer(0)
    for a in range(1, k):
        expr -= sum(ys[(a, i)] ** 2 for i in range(1, sig.m + 1)) / (4 * Ts[a - 1])
        expr -= sum(ws[(a, j)] * wbars[(a, j)] for j in range(1, sig.n + 1)) / (4 * Ts[a - 1])
    for i in range(1, sig.m + 1):
        expr -= sum(ys[(a, i)] for a in range(1, k)) ** 2 / (4 * Ts[-1])
    for j in range(1, sig.n + 1):
        expr -= (
            sum(ws[(a, j)] for a in range(1, k))
            * sum(wbars[(a, j)] for a in range(1, k))
            / (4 * Ts[-1])
        )
    return expr, ys, ws, wbars


def _first_nonzero(residuals: List[sp.Expr]) -> sp.Expr:
    for residual in residuals:
        simplified = sp.cancel(sp.together(residual))
        if simplified != 0:
            return simplified
    return sp.Integer(0)


def zeta_identity_check(
    i: int,
    sig: SpaceSignature,
    T: Optional[Sequence[float]] = None,
    mode: str = "exact",
    point: Optional[Dict[str, complex]] = None,
    step: float = 1e-4,
    seed: int = 0,
):
    """
    zeta^i G = -(sum wbar_i)/(4 T_k) G and (d/dw^a_i - zeta^i) G = -(wbar^a_i/4T_a) G

    zeta^i = sum_{b<k} (T_b / sum T) d/dw^b_i. In exact mode both sides are
    compared as polynomial-times-Gaussian ratios and the exact residual is
    returned (sympy zero when every identity holds). In numeric mode the
    derivatives are central finite differences at a random point and the
    largest absolute ratio residual is returned.
    """
    if sig.n < 1 or sig.k < 2:
        raise ConfigError("the zeta identities need n >= 1 and k >= 2")
    if not 1 <= i <= sig.n:
        raise ConfigError(f"holomorphic index {i} outside 1..{sig.n}")
    if mode == "numeric":
        return _numeric_identity(sig, i, T, holomorphic=True, step=step, seed=seed, point=point)

    Ts = _scale_symbols(sig.k, T)
    total = sum(Ts)
    log_g, _, ws, wbars = _log_gaussian(sig, Ts)
    k = sig.k
    d_log = {a: sp.diff(log_g, ws[(a, i)]) for a in range(1, k)}
    zeta = sum(Ts[b - 1] / total * d_log[b] for b in range(1, k))
    sum_wbar = sum(wbars[(a, i)] for a in range(1, k))
    residuals = [zeta + sum_wbar / (4 * Ts[-1])]
    residuals += [d_log[a] - zeta + wbars[(a, i)] / (4 * Ts[a - 1]) for a in range(1, k)]
    return _first_nonzero(residuals)


def tau_identity_check(
    j: int,
    sig: SpaceSignature,
    T: Optional[Sequence[float]] = None,
    mode: str = "exact",
    point: Optional[Dict[str, float]] = None,
    step: float = 1e-4,
    seed: int = 0,
):
    """
    tau^j G = -(sum y_j)/(2 T_k) G and (d/dy^a_j - tau^j) G = -(y^a_j/2T_a) G

    Same contract as zeta_identity_check for the real directions.
    """
    if sig.m < 1 or sig.k < 2:
        raise ConfigError("the tau identities need m >= 1 and k >= 2")
    if not 1 <= j <= sig.m:
        raise ConfigError(f"topological index {j} outside 1..{sig.m}")
    if mode == "numeric":
        return _numeric_identity(sig, j, T, holomorphic=False, step=step, seed=seed, point=point)

    Ts = _scale_symbols(sig.k, T)
    total = sum(Ts)
    log_g, ys, _, _ = _log_gaussian(sig, Ts)
    k = sig.k
    d_log = {a: sp.diff(log_g, ys[(a, j)]) for a in range(1, k)}
    tau = sum(Ts[b - 1] / total * d_log[b] for b in range(1, k))
    sum_y = sum(ys[(a, j)] for a in range(1, k))
    residuals = [tau + sum_y / (2 * Ts[-1])]
    residuals += [d_log[a] - tau + ys[(a, j)] / (2 * Ts[a - 1]) for a in range(1, k)]
    return _first_nonzero(residuals)


def _gaussian_value(sig: SpaceSignature, T: np.ndarray, y: np.ndarray, w: np.ndarray) -> complex:
    """Unnormalized center-of-mass Gaussian at real y (k-1, m) and complex w (k-1, n)"""
    exponent = -np.sum(y ** 2 / (4 * T[:-1, None])) - np.sum(np.abs(w) ** 2 / (4 * T[:-1, None]))
    exponent -= np.sum(np.sum(y, axis=0) ** 2) / (4 * T[-1])
    exponent -= np.sum(np.abs(np.sum(w, axis=0)) ** 2) / (4 * T[-1])
    return np.exp(exponent)


def _numeric_identity(
    sig: SpaceSignature,
    index: int,
    T: Optional[Sequence[float]],
    holomorphic: bool,
    step: float,
    seed: int,
    point: Optional[Dict[str, complex]] = None,
) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    k = sig.k
    T = np.asarray(T if T is not None else rng.uniform(0.5, 2.0, size=k), dtype=float)
    y = rng.normal(scale=0.5, size=(k - 1, sig.m))
    w = rng.normal(scale=0.5, size=(k - 1, sig.n)) + 1j * rng.normal(scale=0.5, size=(k - 1, sig.n))
    for name, value in (point or {}).items():
        kind, vertex, coord = name.split("_")
        target = y if kind == "y" else w
        target[int(vertex) - 1, int(coord) - 1] = value

    col = index - 1
    G0 = _gaussian_value(sig, T, y, w)
    ratios = T[:-1] / T.sum()

    def derivative(a: int) -> complex:
        if holomorphic:
            # d/dw = (d/da - i d/db) / 2
            parts = []
            for shift in (step, 1j * step):
                plus, minus = w.copy(), w.copy()
                plus[a, col] += shift
                minus[a, col] -= shift
                parts.append(
                    (_gaussian_value(sig, T, y, plus) - _gaussian_value(sig, T, y, minus))
                    / (2 * step)
                )
            return 0.5 * (parts[0] - 1j * parts[1])
        plus, minus = y.copy(), y.copy()
        plus[a, col] += step
        minus[a, col] -= step
        return (_gaussian_value(sig, T, plus, w) - _gaussian_value(sig, T, minus, w)) / (2 * step)

    derivs = [derivative(a) / G0 for a in range(k - 1)]
    operator = sum(r * d for r, d in zip(ratios, derivs))
    if holomorphic:
        coords = np.conj(w[:, col])
        expected = -coords.sum() / (4 * T[-1])
        corollary = [-coords[a] / (4 * T[a]) for a in range(k - 1)]
    else:
        coords = y[:, col]
        expected = -coords.sum() / (2 * T[-1])
        corollary = [-coords[a] / (2 * T[a]) for a in range(k - 1)]
    residuals = [abs(operator - expected)]
    residuals += [abs(derivs[a] - operator - corollary[a]) for a in range(k - 1)]
    return float(max(residuals))
