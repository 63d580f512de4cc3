"""
Gaussian moment related Pydantic schemas
"""

from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from thftcalc.core.constants import VAR_Y


class TMatrix(BaseModel):
    """M_T: diagonal 1/T_alpha + 1/T_k, off-diagonal 1/T_k, size (k-1)x(k-1)"""

    T: List[float] = Field(..., min_length=1, description="Scales T_1..T_k")

    @field_validator("T")
    @classmethod
    def positive(cls, value: List[float]) -> List[float]:
        if any(t <= 0 for t in value):
            raise ValueError(f"all scales must be positive, got {value}")
        return value

    @property
    def k(self) -> int:
        return len(self.T)

    def dense(self) -> np.ndarray:
        T = np.asarray(self.T, dtype=float)
        inv_last = 1.0 / T[-1]
        matrix = np.full((self.k - 1, self.k - 1), inv_last)
        matrix[np.diag_indices(self.k - 1)] += 1.0 / T[:-1]
        return matrix


class MomentFactor(BaseModel):
    """A power of one real center-of-mass coordinate y^alpha_i"""

    kind: str = Field(VAR_Y, description="Variable kind; only 'y' is accepted")
    vertex: int = Field(..., ge=1, description="Slot alpha <= k-1")
    coord: int = Field(..., ge=1, description="Coordinate i <= m")
    power: int = Field(..., ge=0, description="Exponent")

    @field_validator("kind")
    @classmethod
    def real_only(cls, value: str) -> str:
        if value != VAR_Y:
            raise ValueError(
                f"moment requests take y-variables only, got '{value}'"
            )
        return value


class MomentRequest(BaseModel):
    """A monomial y^nu and the normalization of the measure"""

    factors: List[MomentFactor] = Field(default_factory=list)
    normalized: bool = Field(
        True, description="Probability moment (True) or bare Gaussian integral"
    )

    class Config:
        json_schema_extra = {
            "example": {
                "factors": [
                    {"kind": "y", "vertex": 1, "coord": 1, "power": 1},
                    {"kind": "y", "vertex": 2, "coord": 1, "power": 1},
                ],
                "normalized": True,
            }
        }

    @property
    def exponents(self) -> Dict[Tuple[int, int], int]:
        """Merged exponent map (vertex, coord) -> power"""
        merged: Dict[Tuple[int, int], int] = {}
        for factor in self.factors:
            if factor.power:
                key = (factor.vertex, factor.coord)
                merged[key] = merged.get(key, 0) + factor.power
        return merged

    @property
    def degree(self) -> int:
        return sum(self.exponents.values())

    @classmethod
    def from_exponents(
        cls, exponents: Dict[Tuple[int, int], int], normalized: bool = True
    ) -> "MomentRequest":
        factors = [
            MomentFactor(vertex=vertex, coord=coord, power=power)
            for (vertex, coord), power in sorted(exponents.items())
        ]
        return cls(factors=factors, normalized=normalized)
