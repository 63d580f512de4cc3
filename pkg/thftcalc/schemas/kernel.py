"""
Kernel related Pydantic schemas
"""

from enum import Enum
from typing import List

from pydantic import BaseModel, Field

from thftcalc.core.constants import SPLIT_E_D, SPLIT_E_DBAR, SPLIT_G, SPLIT_K_FULL
from thftcalc.schemas.signature import BiDegree, SpaceSignature


class SplitKind(str, Enum):
    """Pieces of the kernel forms attached to an edge"""

    E_D = SPLIT_E_D
    E_DBAR = SPLIT_E_DBAR
    K_FULL = SPLIT_K_FULL
    G = SPLIT_G


class KernelSplit(BaseModel):
    """A kernel piece placed on a center-of-mass slot"""

    which: SplitKind = Field(..., description="Kernel piece")
    vertex_slot: int = Field(..., ge=1, description="Slot alpha it lives on")

    class Config:
        frozen = True

    def bidegree(self, sig: SpaceSignature) -> BiDegree:
        return split_bidegree(self.which, sig)


def split_bidegree(which: SplitKind, sig: SpaceSignature) -> BiDegree:
    """Bidegree of a kernel piece; E pieces need m >= 1 (E_d) or n >= 1 (E_dbar)"""
    if which == SplitKind.E_D:
        if sig.m < 1:
            raise ValueError("E_d does not exist when m = 0")
        return BiDegree(de_rham=sig.m - 1, dolbeault=sig.n)
    if which == SplitKind.E_DBAR:
        if sig.n < 1:
            raise ValueError("E_dbar does not exist when n = 0")
        return BiDegree(de_rham=sig.m, dolbeault=sig.n - 1)
    if which == SplitKind.K_FULL:
        return BiDegree(de_rham=sig.m, dolbeault=sig.n)
    return BiDegree(de_rham=0, dolbeault=0)


class EComponent(BaseModel):
    """One coefficient of E_T together with the generators it multiplies"""

    split: SplitKind = Field(..., description="E_d or E_dbar membership")
    dropped: str = Field(..., description="Removed line element, e.g. dx_1")
    monomial: List[str] = Field(
        ..., description="Remaining (m+n-1) generators in canonical order"
    )
    value: complex = Field(..., description="Coefficient value at the point")
