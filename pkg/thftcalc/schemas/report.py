"""
Convergence and report Pydantic schemas
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class Verdict(str, Enum):
    """Outcome of a ladder diagnostic; divergence is never claimed"""

    CONVERGED = "Converged"
    INCONCLUSIVE = "Inconclusive"


class LadderPoint(BaseModel):
    """One rung of a regulator ladder"""

    epsilon: float = Field(..., description="Cutoff of this rung")
    value: float = Field(..., description="Value at this cutoff")


class ConvergenceReport(BaseModel):
    """Sampled ladder, extrapolated limit and verdict"""

    ladder: List[LadderPoint] = Field(..., description="Raw ladder values")
    corrected: List[float] = Field(
        default_factory=list, description="Richardson-corrected values"
    )
    differences: List[float] = Field(
        default_factory=list, description="Successive corrected differences"
    )
    extrapolated: float = Field(..., description="Extrapolated limit")
    error_estimate: float = Field(..., ge=0, description="Error estimate")
    tolerance: float = Field(..., gt=0, description="Relative tolerance used")
    abs_floor: float = Field(0.0, ge=0, description="Absolute floor of the threshold")
    threshold: float = Field(..., ge=0, description="Absolute threshold applied")
    monotone: bool = Field(..., description="Differences decrease monotonically")
    verdict: Verdict = Field(..., description="Converged or Inconclusive")
    inconclusive: bool = Field(False, description="Flag mirror of the verdict")

    @model_validator(mode="after")
    def check_ladder(self):
        epsilons = [point.epsilon for point in self.ladder]
        if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
            raise ValueError("ladder must be strictly decreasing in epsilon")
        self.inconclusive = self.verdict == Verdict.INCONCLUSIVE
        return self


class OuterPoint(BaseModel):
    """Inner eps-extrapolation at one value of L"""

    L: float = Field(..., gt=0)
    inner: ConvergenceReport


class DoubleLimitReport(BaseModel):
    """Outer L-ladder of inner eps-limits"""

    outer: List[OuterPoint] = Field(..., description="One entry per L")
    values: List[float] = Field(..., description="|extrapolated| per L")
    tolerance: float = Field(..., gt=0)
    monotone: bool = Field(..., description="|values| nonincreasing along L")
    verdict: Verdict
    limit_is_zero: bool = Field(..., description="Outer sequence fell below tolerance")


class VanishingReport(BaseModel):
    """Algebraic vanishing verdict for one signature"""

    m: int
    n: int
    k: int
    vanishes: bool
    mode: Optional[str] = Field(
        None, description="'degree', 'edge_case', 'tadpole' or None"
    )
    proven: bool = Field(..., description="Proof mode confirmed the verdict")
    checked_terms: int = Field(0, description="S-terms examined")
    admissible: List[List[int]] = Field(default_factory=list)
    message: str


class ReportEnvelope(BaseModel):
    """Deterministic container written by every subcommand"""

    tool: str
    version: str
    command: str
    config_hash: str
    tolerances: Dict[str, float]
    payload: Dict[str, Any]
