"""
Generalized Richardson extrapolation and ladder verdicts
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from thftcalc.core.constants import (
    CONVERGED_TAIL,
    RICHARDSON_LOG_POWERS,
    RICHARDSON_POWERS,
)
from thftcalc.schemas.report import ConvergenceReport, LadderPoint, Verdict

logger = logging.getLogger(__name__)


def basis_functions(count: int):
    """First `count` correction terms: eps^1/2, eps, eps log eps, eps^3/2"""
    terms = [("pow", RICHARDSON_POWERS[0]), ("pow", RICHARDSON_POWERS[1])]
    terms += [("log", p) for p in RICHARDSON_LOG_POWERS]
    terms += [("pow", p) for p in RICHARDSON_POWERS[2:]]
    chosen = terms[:count]

    def columns(eps: np.ndarray) -> np.ndarray:
        cols = [np.ones_like(eps)]
        for kind, power in chosen:
            if kind == "pow":
                cols.append(eps ** power)
            else:
                cols.append(eps ** power * np.log(eps))
        return np.stack(cols, axis=-1)

    return columns


def richardson_corrected(
    epsilons: Sequence[float], values: Sequence[float], basis_size: Optional[int] = None
) -> List[float]:
    """
    Sliding-window fits of A + corrections, one per window of consecutive rungs

    Returns the fitted constants A; the list is shorter than the ladder by the
    number of correction terms used.
    """
    eps = np.asarray(epsilons, dtype=float)
    vals = np.asarray(values, dtype=float)
    available = len(RICHARDSON_POWERS) + len(RICHARDSON_LOG_POWERS)
    if basis_size is None:
        basis_size = max(0, min(available, len(vals) - CONVERGED_TAIL - 1))
    if basis_size == 0:
        return vals.tolist()

    columns = basis_functions(basis_size)
    window = basis_size + 1
    corrected = []
    for end in range(window, len(vals) + 1):
        design = columns(eps[end - window:end])
        scale = np.linalg.norm(design, axis=0)
        scale[scale == 0] = 1.0
        coeffs, *_ = np.linalg.lstsq(design / scale, vals[end - window:end], rcond=None)
        corrected.append(float(coeffs[0] / scale[0]))
    return corrected


def assess_ladder(
    epsilons: Sequence[float],
    values: Sequence[float],
    tolerance: float,
    abs_floor: float = 0.0,
) -> ConvergenceReport:
    """
    Extrapolate an eps-ladder and decide Converged or Inconclusive

    Converged requires the last CONVERGED_TAIL corrected differences to lie
    below tolerance * max(|limit|, abs_floor) and the raw differences to
    shrink over the same tail. Divergence is never claimed.
    """
    ladder = [LadderPoint(epsilon=e, value=v) for e, v in zip(epsilons, values)]
    if all(v == 0 for v in values):
        return ConvergenceReport(
            ladder=ladder,
            corrected=[0.0] * len(ladder),
            differences=[0.0] * max(0, len(ladder) - 1),
            extrapolated=0.0,
            error_estimate=0.0,
            tolerance=tolerance,
            threshold=tolerance * abs_floor,
            abs_floor=abs_floor,
            monotone=True,
            verdict=Verdict.CONVERGED,
        )

    corrected = richardson_corrected(epsilons, values)
    differences = [abs(b - a) for a, b in zip(corrected, corrected[1:])]
    extrapolated = corrected[-1]
    threshold = tolerance * max(abs(extrapolated), abs_floor)
    error_estimate = differences[-1] if differences else abs(extrapolated)

    raw = [abs(b - a) for a, b in zip(values, values[1:])]
    tail_raw = raw[-(CONVERGED_TAIL + 1):]
    monotone = all(b <= a + threshold for a, b in zip(tail_raw, tail_raw[1:]))

    tail = differences[-CONVERGED_TAIL:]
    converged = len(tail) == CONVERGED_TAIL and all(d <= threshold for d in tail) and monotone
    verdict = Verdict.CONVERGED if converged else Verdict.INCONCLUSIVE
    logger.info(
        f"Ladder of {len(values)} rungs: limit={extrapolated:.10g}, "
        f"error={error_estimate:.3e}, verdict={verdict.value}"
    )
    return ConvergenceReport(
        ladder=ladder,
        corrected=corrected,
        differences=differences,
        extrapolated=extrapolated,
        error_estimate=error_estimate,
        tolerance=tolerance,
        threshold=threshold,
        abs_floor=abs_floor,
        monotone=monotone,
        verdict=verdict,
    )
