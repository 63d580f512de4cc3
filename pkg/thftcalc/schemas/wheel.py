"""
Wheel, decoration, test-input and anomaly-wheel Pydantic schemas
"""

import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from thftcalc.core.config import settings
from thftcalc.core.constants import VAR_W, VAR_WBAR, VAR_Y
from thftcalc.schemas.signature import SpaceSignature

VARIABLE_PATTERN = re.compile(r"^(y|w|wbar)_(\d+)_(\d+)$")


def parse_variable(name: str) -> Tuple[str, int, int]:
    """
    Split a test-input variable name into (kind, vertex, coord)

    Names look like "y_1_2" (y^1_2), "w_2_1" or "wbar_2_1".
    """
    match = VARIABLE_PATTERN.match(name)
    if not match:
        raise ValueError(
            f"invalid variable '{name}', expected y_<vertex>_<coord>, "
            "w_<vertex>_<coord> or wbar_<vertex>_<coord>"
        )
    return match.group(1), int(match.group(2)), int(match.group(3))


def to_fraction(value: Union[int, float, str]) -> Fraction:
    """Exact rational from an int, a decimal float or a 'p/q' string"""
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def check_p_matrix(p: List[List[int]], sig: SpaceSignature) -> None:
    if len(p) != sig.k or any(len(row) != sig.n for row in p):
        raise ValueError(f"p must be a {sig.k}x{sig.n} matrix, got {p}")
    if any(entry < 0 for row in p for entry in row):
        raise ValueError("holomorphic derivative orders must be nonnegative")


class WheelData(BaseModel):
    """A wheel's analytic content: signature and derivative orders p^alpha_i"""

    sig: SpaceSignature = Field(..., description="Signature (m, n, k)")
    p: List[List[int]] = Field(
        ..., description="k x n matrix of holomorphic derivative orders"
    )

    class Config:
        json_schema_extra = {
            "example": {"sig": {"m": 1, "n": 1, "k": 3}, "p": [[0], [1], [0]]}
        }

    @model_validator(mode="after")
    def check_shape(self):
        check_p_matrix(self.p, self.sig)
        return self

    @classmethod
    def plain(cls, sig: SpaceSignature) -> "WheelData":
        """Wheel without holomorphic derivatives"""
        return cls(sig=sig, p=[[0] * sig.n for _ in range(sig.k)])

    @property
    def total_order(self) -> int:
        return sum(sum(row) for row in self.p)


class EdgeDecoration(BaseModel):
    """Edges S carrying E_d and the coordinate each of them drops"""

    S: List[int] = Field(default_factory=list, description="Edges carrying E_d")
    indices: Dict[int, int] = Field(
        default_factory=dict, description="Edge in S -> dropped coordinate i_j"
    )

    @model_validator(mode="after")
    def check_consistency(self):
        if sorted(set(self.S)) != list(self.S):
            raise ValueError(f"S must be sorted without repeats, got {self.S}")
        if set(self.indices) != set(self.S):
            raise ValueError("every edge of S needs exactly one coordinate index")
        return self

    def ell(self, k: int) -> List[int]:
        """Selector vector in {0,1}^k"""
        return [1 if edge in self.S else 0 for edge in range(1, k + 1)]

    def check(self, wd: WheelData) -> None:
        sig = wd.sig
        if any(edge < 1 or edge > sig.k for edge in self.S):
            raise ValueError(f"S={self.S} is not a subset of 1..{sig.k}")
        if any(coord < 1 or coord > sig.m for coord in self.indices.values()):
            raise ValueError(f"coordinate indices must lie in 1..{sig.m}")


class PolynomialTerm(BaseModel):
    """coefficient * product of variables**powers"""

    coefficient: Union[int, float, str] = Field(
        1, description="Exact coefficient, e.g. 1, 0.5 or '1/3'"
    )
    powers: Dict[str, int] = Field(
        default_factory=dict, description="Variable name -> exponent"
    )

    @field_validator("coefficient")
    @classmethod
    def rational(cls, value):
        to_fraction(value)
        return value

    @field_validator("powers")
    @classmethod
    def valid_names(cls, value: Dict[str, int]) -> Dict[str, int]:
        for name, power in value.items():
            parse_variable(name)
            if power < 0:
                raise ValueError(f"negative power for {name}")
        return value

    @property
    def fraction(self) -> Fraction:
        return to_fraction(self.coefficient)

    @property
    def degree(self) -> int:
        return sum(self.powers.values())


class TestInput(BaseModel):
    """Polynomial times centered Gaussian on the center-of-mass slots"""

    terms: List[PolynomialTerm] = Field(
        default_factory=lambda: [PolynomialTerm()],
        description="Polynomial part in y, w, wbar",
    )
    default_width: float = Field(1.0, gt=0, description="Damping width sigma")
    widths: Dict[str, float] = Field(
        default_factory=dict,
        description="Per-coordinate widths keyed y_<a>_<i> or w_<a>_<j>",
    )
    closing_width: Optional[float] = Field(
        None,
        gt=0,
        description="Width of an extra damping factor on the sum of all slots",
    )
    smoothness: Optional[int] = Field(
        None,
        ge=0,
        description="Declared C^M bound, None for a smooth input",
    )

    __test__ = False

    class Config:
        json_schema_extra = {
            "example": {
                "terms": [
                    {"coefficient": 1, "powers": {}},
                    {"coefficient": "1/2", "powers": {"y_1_1": 1, "w_2_1": 1}},
                ],
                "default_width": 1.0,
            }
        }

    @field_validator("widths")
    @classmethod
    def positive_widths(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, width in value.items():
            kind, _, _ = parse_variable(name)
            if kind == VAR_WBAR:
                raise ValueError(f"use w_<a>_<j> for complex widths, got {name}")
            if width <= 0:
                raise ValueError(f"damping width for {name} must be positive")
        return value

    @model_validator(mode="after")
    def degree_cap(self):
        if self.degree > settings.poly_degree_cap:
            raise ValueError(
                f"polynomial degree {self.degree} exceeds cap "
                f"{settings.poly_degree_cap}"
            )
        return self

    @property
    def degree(self) -> int:
        return max((term.degree for term in self.terms), default=0)

    def width(self, kind: str, vertex: int, coord: int) -> float:
        key_kind = VAR_Y if kind == VAR_Y else VAR_W
        return self.widths.get(f"{key_kind}_{vertex}_{coord}", self.default_width)

    def check(self, sig: SpaceSignature) -> None:
        names = [name for term in self.terms for name in term.powers]
        names += list(self.widths)
        for name in names:
            kind, vertex, coord = parse_variable(name)
            limit = sig.m if kind == VAR_Y else sig.n
            if not (1 <= vertex <= sig.slots and 1 <= coord <= limit):
                raise ValueError(f"variable {name} does not exist for {sig}")

    def combine(self, other: "TestInput", a, b) -> "TestInput":
        """a*self + b*other; both inputs must share their damping"""
        if (
            self.default_width != other.default_width
            or self.widths != other.widths
            or self.closing_width != other.closing_width
        ):
            raise ValueError("linear combinations need identical damping")
        terms = [
            PolynomialTerm(coefficient=str(to_fraction(a) * t.fraction), powers=t.powers)
            for t in self.terms
        ] + [
            PolynomialTerm(coefficient=str(to_fraction(b) * t.fraction), powers=t.powers)
            for t in other.terms
        ]
        return self.model_copy(update={"terms": terms})


class AnomalyWheel(BaseModel):
    """A decorated anomaly wheel; the distinguished edge is always edge k"""

    sig: SpaceSignature = Field(..., description="Signature (m, n, k)")
    p: List[List[int]] = Field(..., description="k x n derivative orders")
    S: List[int] = Field(default_factory=list, description="E_d edges, subset of 1..k-1")
    f: Dict[int, int] = Field(default_factory=dict, description="S -> 1..m")
    g: Dict[int, int] = Field(default_factory=dict, description="S^c -> 1..n")

    @model_validator(mode="after")
    def check_maps(self):
        sig = self.sig
        check_p_matrix(self.p, sig)
        if sig.k < 2:
            raise ValueError("anomaly wheels need k >= 2")
        if sorted(set(self.S)) != list(self.S):
            raise ValueError(f"S must be sorted without repeats, got {self.S}")
        if any(edge < 1 or edge >= sig.k for edge in self.S):
            raise ValueError(f"S={self.S} must exclude the distinguished edge")
        complement = [edge for edge in range(1, sig.k) if edge not in self.S]
        if set(self.f) != set(self.S) or set(self.g) != set(complement):
            raise ValueError("f must be total on S and g total on S^c")
        if any(not 1 <= value <= sig.m for value in self.f.values()):
            raise ValueError(f"f values must lie in 1..{sig.m}")
        if any(not 1 <= value <= sig.n for value in self.g.values()):
            raise ValueError(f"g values must lie in 1..{sig.n}")
        return self

    @property
    def distinguished_edge(self) -> int:
        return self.sig.k
