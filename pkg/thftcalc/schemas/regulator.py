"""
Regulator integral related Pydantic schemas
"""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


class LimitVerdict(str, Enum):
    """Whether the eps -> 0 limit of I_{N,k} is guaranteed"""

    FINITE = "Finite"
    UNKNOWN = "Unknown"


class RegulatorQuery(BaseModel):
    """I_{N,k}(eps, L) = integral over [eps, L]^k of dT / (T_1 + ... + T_k)^N"""

    N: int = Field(..., ge=0, description="Power of the scale sum")
    k: int = Field(..., ge=1, description="Cube dimension")
    epsilon: float = Field(..., ge=0, description="Lower cutoff (0 allowed)")
    L: float = Field(..., gt=0, description="Upper cutoff")

    class Config:
        frozen = True
        json_schema_extra = {"example": {"N": 1, "k": 2, "epsilon": 0.0, "L": 1.0}}

    @model_validator(mode="after")
    def check_window(self):
        if self.epsilon > self.L:
            raise ValueError(f"epsilon={self.epsilon} exceeds L={self.L}")
        return self
