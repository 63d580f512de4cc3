"""
Tensor Gauss-Kronrod quadrature over scale cubes [eps, L]^d

Integration runs in s = log T on octave boxes [L 2^-(a+1), L 2^-a]. Each box
carries the octave index tuple it came from, so a ladder eps_j = L 2^-j can
be read off a single pass over the largest cube.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from thftcalc.core.config import settings
from thftcalc.core.constants import G7_WEIGHTS, GK15_NODES, GK15_WEIGHTS
from thftcalc.core.exceptions import NumericalError

logger = logging.getLogger(__name__)

ScaleIntegrand = Callable[[np.ndarray], np.ndarray]


@dataclass
class Box:
    """A box in log-scale coordinates"""

    lower: np.ndarray
    upper: np.ndarray
    octaves: Tuple[int, ...]
    depth: int = 0
    value: float = 0.0
    error: float = 0.0

    def split(self) -> List["Box"]:
        mid = 0.5 * (self.lower + self.upper)
        children = []
        for choice in product((0, 1), repeat=len(self.lower)):
            pick = np.asarray(choice, dtype=bool)
            lower = np.where(pick, mid, self.lower)
            upper = np.where(pick, self.upper, mid)
            children.append(Box(lower, upper, self.octaves, self.depth + 1))
        return children


@dataclass
class CubeResult:
    value: float
    error: float
    boxes: List[Box]

    def rung_values(self, rungs: int, first: int = 1) -> List[float]:
        """Sum over boxes whose octave indices all lie below j, for j = first..first+rungs-1"""
        values = []
        for j in range(first, first + rungs):
            values.append(
                float(
                    sum(box.value for box in self.boxes if max(box.octaves, default=-1) < j)
                )
            )
        return values

    def rung_errors(self, rungs: int, first: int = 1) -> List[float]:
        return [
            float(sum(box.error for box in self.boxes if max(box.octaves, default=-1) < j))
            for j in range(first, first + rungs)
        ]



@lru_cache(maxsize=None)
def tensor_rule(dim: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes on [-1, 1]^dim and the Kronrod and embedded Gauss tensor weights"""
    nodes_1d = np.asarray(GK15_NODES)
    kronrod_1d = np.asarray(GK15_WEIGHTS)
    gauss_1d = np.zeros(15)
    gauss_1d[1::2] = G7_WEIGHTS
    grids = np.meshgrid(*([nodes_1d] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    kronrod = np.ones(nodes.shape[0])
    gauss = np.ones(nodes.shape[0])
    for axis_grid in np.meshgrid(*([np.arange(15)] * dim), indexing="ij"):
        idx = axis_grid.ravel()
        kronrod = kronrod * kronrod_1d[idx]
        gauss = gauss * gauss_1d[idx]
    return nodes, kronrod, gauss


def octave_panels(epsilon: float, L: float) -> List[Tuple[float, float, int]]:
    """Log-scale panels (log lower, log upper, octave index) covering [eps, L]"""
    if not (0 < epsilon <= L):
        raise ValueError(f"need 0 < epsilon <= L, got ({epsilon}, {L})")
    panels = []
    a = 0
    upper = L
    while upper > epsilon * (1 + 1e-12):
        lower = max(L * 2.0 ** (-(a + 1)), epsilon)
        if lower > epsilon and lower / epsilon < 1 + 1e-12:
            lower = epsilon
        panels.append((float(np.log(lower)), float(np.log(upper)), a))
        upper = lower
        a += 1
    return panels


def _evaluate_chunk(
    integrand: ScaleIntegrand, boxes: Sequence[Box], dim: int
) -> List[Tuple[float, float]]:
    nodes, kronrod, gauss = tensor_rule(dim)
    lowers = np.stack([box.lower for box in boxes])
    uppers = np.stack([box.upper for box in boxes])
    half = 0.5 * (uppers - lowers)
    center = 0.5 * (uppers + lowers)
    s = center[:, None, :] + half[:, None, :] * nodes[None, :, :]
    T = np.exp(s).reshape(-1, dim)
    jacobian = np.prod(T, axis=1)
    values = np.asarray(integrand(T), dtype=float) * jacobian
    values = values.reshape(len(boxes), -1)
    volume = np.prod(half, axis=1)
    k_est = volume * (values @ kronrod)
    g_est = volume * (values @ gauss)
    return [(float(k), float(abs(k - g))) for k, g in zip(k_est, g_est)]


def evaluate_boxes(
    integrand: ScaleIntegrand,
    boxes: List[Box],
    dim: int,
    jobs: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> None:
    """Fill value and error of every box; the reduction order is fixed"""
    jobs = jobs or settings.jobs
    chunk_size = chunk_size or settings.chunk_size
    per_box = 15 ** dim
    boxes_per_chunk = max(1, chunk_size // per_box)
    chunks = [boxes[i:i + boxes_per_chunk] for i in range(0, len(boxes), boxes_per_chunk)]
    logger.debug(f"Evaluating {len(boxes)} boxes in {len(chunks)} chunks, jobs={jobs}")

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: _evaluate_chunk(integrand, c, dim), chunks))
    else:
        results = [_evaluate_chunk(integrand, chunk, dim) for chunk in chunks]

    for chunk, chunk_results in zip(chunks, results):
        for box, (value, error) in zip(chunk, chunk_results):
            box.value = value
            box.error = error


def integrate_cube(
    integrand: ScaleIntegrand,
    epsilon: float,
    L: float,
    dim: int,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
    max_depth: Optional[int] = None,
    jobs: Optional[int] = None,
) -> CubeResult:
    """
    Adaptive integral of integrand(T) dT over [eps, L]^dim

    Args:
        integrand: vectorized function of an (N, dim) array of scales
        epsilon: lower cutoff
        L: upper cutoff
        dim: number of integrated scales (0 evaluates the integrand once)

    Returns:
        CubeResult with the total, the error estimate and the final boxes

    Raises:
        NumericalError: when the tolerance is not met at the maximal depth
    """
    rtol = rtol if rtol is not None else settings.quad_rtol
    atol = atol if atol is not None else settings.quad_atol
    max_depth = max_depth if max_depth is not None else settings.quad_max_depth

    if dim == 0:
        value = float(np.asarray(integrand(np.zeros((1, 0))), dtype=float)[0])
        return CubeResult(value, 0.0, [Box(np.zeros(0), np.zeros(0), (), 0, value, 0.0)])

    panels = octave_panels(epsilon, L)
    boxes = [
        Box(
            np.asarray([p[0] for p in combo]),
            np.asarray([p[1] for p in combo]),
            tuple(p[2] for p in combo),
        )
        for combo in product(panels, repeat=dim)
    ]
    evaluate_boxes(integrand, boxes, dim, jobs)

    while True:
        total = sum(box.value for box in boxes)
        error = sum(box.error for box in boxes)
        target = max(rtol * abs(total), atol)
        if error <= target:
            break
        share = target / len(boxes)
        refine = [box for box in boxes if box.error > share]
        if any(box.depth >= max_depth for box in refine):
            logger.error(
                f"Scale quadrature stalled at depth {max_depth}: "
                f"value={total:.6e}, error={error:.3e}"
            )
            raise NumericalError(
                f"scale quadrature over [{epsilon:.3e}, {L:.3e}]^{dim} did not reach "
                f"rtol={rtol:.1e}",
                residual=error,
            )
        keep = [box for box in boxes if box.error <= share]
        children = [child for box in refine for child in box.split()]
        evaluate_boxes(integrand, children, dim, jobs)
        logger.debug(f"Refined {len(refine)} boxes, error {error:.3e} -> target {target:.3e}")
        boxes = keep + children

    boxes.sort(key=lambda box: (box.octaves, tuple(box.lower)))
    return CubeResult(float(sum(box.value for box in boxes)), float(error), boxes)
