"""
Signature, degree and scale related Pydantic schemas
"""

from typing import List

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class SpaceSignature(BaseModel):
    """Shape of the problem: Y = R^m x C^n and a wheel with k vertices"""

    m: int = Field(..., ge=0, description="Topological (real) directions")
    n: int = Field(..., ge=0, description="Holomorphic (complex) directions")
    k: int = Field(..., ge=1, description="Vertex count of the wheel")

    class Config:
        frozen = True
        json_schema_extra = {"example": {"m": 1, "n": 1, "k": 3}}

    @property
    def slots(self) -> int:
        """Number of center-of-mass slots q^1..q^(k-1)"""
        return self.k - 1

    @property
    def real_dim(self) -> int:
        """Real dimension of Y"""
        return self.m + 2 * self.n

    @property
    def form_degree(self) -> int:
        """Degree m + n - 1 of the kernel form E_T"""
        return self.m + self.n - 1

    def with_k(self, k: int) -> "SpaceSignature":
        return SpaceSignature(m=self.m, n=self.n, k=k)

    def __str__(self) -> str:
        return f"(m={self.m}, n={self.n}, k={self.k})"


class BiDegree(BaseModel):
    """Counts of dy generators (de Rham) and dwbar generators (Dolbeault)"""

    de_rham: int = Field(..., ge=0, description="Number of dy generators")
    dolbeault: int = Field(..., ge=0, description="Number of dwbar generators")

    class Config:
        frozen = True

    def fits(self, sig: SpaceSignature) -> bool:
        """Whether a form of this bidegree can be nonzero on Y^(k-1)"""
        return (
            self.de_rham <= sig.m * sig.slots
            and self.dolbeault <= sig.n * sig.slots
        )


class ScaleVector(BaseModel):
    """Heat-kernel scales T_1..T_k inside a regulator window (eps, L)"""

    T: List[float] = Field(..., min_length=1, description="Scales T_alpha")
    epsilon: float = Field(..., gt=0, description="Lower cutoff")
    L: float = Field(..., gt=0, description="Upper cutoff")

    @model_validator(mode="after")
    def check_window(self):
        if self.epsilon > self.L:
            raise ValueError(f"epsilon={self.epsilon} exceeds L={self.L}")
        for t in self.T:
            if not (self.epsilon <= t <= self.L):
                raise ValueError(
                    f"scale {t} outside the window [{self.epsilon}, {self.L}]"
                )
        return self

    @property
    def k(self) -> int:
        return len(self.T)


class Point(BaseModel):
    """A point of Y: m real coordinates and n complex ones stored as 2n reals"""

    x: List[float] = Field(default_factory=list, description="Real coordinates")
    z_parts: List[float] = Field(
        default_factory=list,
        description="Complex coordinates as (re_1, im_1, re_2, im_2, ...)",
    )

    @field_validator("z_parts")
    @classmethod
    def even_length(cls, value: List[float]) -> List[float]:
        if len(value) % 2:
            raise ValueError("z_parts must hold real/imaginary pairs")
        return value

    @classmethod
    def from_arrays(cls, x, z) -> "Point":
        z = np.asarray(z, dtype=complex).ravel()
        parts = np.column_stack([z.real, z.imag]).ravel().tolist()
        return cls(x=[float(v) for v in np.ravel(x)], z_parts=parts)

    @property
    def x_array(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)

    @property
    def z(self) -> np.ndarray:
        parts = np.asarray(self.z_parts, dtype=float).reshape(-1, 2)
        return parts[:, 0] + 1j * parts[:, 1]

    def check(self, sig: SpaceSignature) -> None:
        if len(self.x) != sig.m or len(self.z_parts) != 2 * sig.n:
            raise ValueError(
                f"point dimension ({len(self.x)}, {len(self.z_parts) // 2}) "
                f"does not match signature (m={sig.m}, n={sig.n})"
            )

    def __sub__(self, other: "Point") -> "Point":
        return Point.from_arrays(self.x_array - other.x_array, self.z - other.z)
