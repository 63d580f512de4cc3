"""
Experiment configuration Pydantic schemas
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from thftcalc.core.config import settings
from thftcalc.core.constants import DEFAULT_BASE_L, PRESETS
from thftcalc.schemas.moments import MomentFactor, MomentRequest
from thftcalc.schemas.signature import SpaceSignature
from thftcalc.schemas.wheel import TestInput, WheelData, check_p_matrix


class Preset(BaseModel):
    """A named theory fixing (m, n)"""

    name: str = Field(..., description="Preset name")
    m: Optional[int] = Field(None, ge=0)
    n: Optional[int] = Field(None, ge=0)
    description: str = ""

    @model_validator(mode="after")
    def known(self):
        if self.name not in PRESETS:
            raise ValueError(
                f"unknown preset '{self.name}', expected one of {sorted(PRESETS)}"
            )
        return self

    @classmethod
    def lookup(cls, name: str) -> "Preset":
        if name not in PRESETS:
            raise ValueError(
                f"unknown preset '{name}', expected one of {sorted(PRESETS)}"
            )
        m, n, description = PRESETS[name]
        return cls(name=name, m=m, n=n, description=description)


class Selection(str, Enum):
    """Which weight family an experiment evaluates"""

    WHEEL = "wheel"
    ANOMALY = "anomaly"


class LadderSpec(BaseModel):
    """Regulator ladder: eps_j = L * 2^-j, and the outer L ladder for anomalies"""

    rungs: int = Field(default_factory=lambda: settings.ladder_rungs, ge=2)
    first_rung: int = Field(
        default_factory=lambda: settings.ladder_first_rung,
        ge=1,
        description="Exponent j of the first eps_j = L 2^-j on the ladder",
    )
    base_L: float = Field(DEFAULT_BASE_L, gt=0)
    tolerance: float = Field(default_factory=lambda: settings.ladder_tolerance, gt=0)
    outer_rungs: int = Field(default_factory=lambda: settings.outer_rungs, ge=2)
    outer_ratio: float = Field(4.0, gt=1)
    outer_tolerance: float = Field(
        default_factory=lambda: settings.outer_tolerance, gt=0
    )
    quad_rtol: float = Field(default_factory=lambda: settings.quad_rtol, gt=0)
    quad_atol: float = Field(default_factory=lambda: settings.quad_atol, gt=0)

    def epsilons(self, L: float) -> List[float]:
        return [
            L * 2.0 ** (-j) for j in range(self.first_rung, self.first_rung + self.rungs)
        ]



class RegulatorSpec(BaseModel):
    """Parameters of a regulator-integral query"""

    N: int = Field(..., ge=0)
    epsilon: float = Field(0.0, ge=0)
    L: float = Field(1.0, gt=0)


class MomentSpec(BaseModel):
    """A moment request evaluated at given scales"""

    factors: List[MomentFactor] = Field(default_factory=list)
    T: List[float] = Field(..., min_length=2)
    normalized: bool = True
    monte_carlo: bool = Field(False, description="Also run the Monte-Carlo oracle")
    samples: int = Field(default_factory=lambda: settings.mc_samples, ge=100)

    def request(self) -> MomentRequest:
        return MomentRequest(factors=self.factors, normalized=self.normalized)


class ExperimentConfig(BaseModel):
    """One experiment: a signature, a weight family and numerical settings"""

    preset: Optional[str] = Field(None, description="Theory preset name")
    m: Optional[int] = Field(None, ge=0)
    n: Optional[int] = Field(None, ge=0)
    k: int = Field(2, ge=1, description="Vertex count")
    selection: Optional[Selection] = Field(
        None, description="Weight family; when set, only the matching subcommand runs the config"
    )
    p: Optional[List[List[int]]] = Field(None, description="k x n derivative orders")
    test_input: TestInput = Field(default_factory=TestInput)
    ladder: LadderSpec = Field(default_factory=LadderSpec)
    regulator: Optional[RegulatorSpec] = None
    moment: Optional[MomentSpec] = None
    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    output_dir: Optional[str] = None

    class Config:
        json_schema_extra = {
            "example": {
                "preset": "bf",
                "m": 1,
                "n": 0,
                "k": 2,
                "selection": "wheel",
                "test_input": {"terms": [{"coefficient": 1, "powers": {}}]},
                "ladder": {"rungs": 12, "base_L": 1.0},
            }
        }

    @model_validator(mode="after")
    def resolve_signature(self):
        if self.preset is not None:
            preset = Preset.lookup(self.preset)
            if preset.m is not None:
                if self.m is not None and self.m != preset.m:
                    raise ValueError(f"preset {preset.name} fixes m={preset.m}")
                if self.n is not None and self.n != preset.n:
                    raise ValueError(f"preset {preset.name} fixes n={preset.n}")
                self.m, self.n = preset.m, preset.n
        if self.m is None or self.n is None:
            raise ValueError("give a fixed-signature preset or explicit m and n")
        sig = self.signature
        if self.p is not None:
            check_p_matrix(self.p, sig)
        self.test_input.check(sig)
        if self.moment is not None and self.moment.monte_carlo and self.seed is None:
            raise ValueError("a seed is mandatory for Monte-Carlo paths")
        return self

    @property
    def signature(self) -> SpaceSignature:
        return SpaceSignature(m=self.m, n=self.n, k=self.k)

    def wheel_data(self) -> WheelData:
        if self.p is None:
            return WheelData.plain(self.signature)
        return WheelData(sig=self.signature, p=self.p)
