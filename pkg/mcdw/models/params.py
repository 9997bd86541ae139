"""Parameter models for the group families."""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Family(str, Enum):
    """Group families handled by the workbench."""

    J1 = "J1"
    J2 = "J2"
    J3 = "J3"
    H1 = "H1"
    H2 = "H2"
    H3 = "H3"
    K1 = "K1"
    K2 = "K2"
    K3 = "K3"
    G = "G"

    @property
    def kind(self) -> str:
        """Leading letter: J, H, K or G."""
        return self.value[0]

    @property
    def index(self) -> Optional[int]:
        """Case number encoded in the family name (None for G)."""
        return int(self.value[1]) if len(self.value) > 1 else None


class CaseTag(str, Enum):
    """Which of the three parameter regimes applies."""

    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


class Case2Constants(BaseModel):
    """Powers of two used throughout the p=2 computations."""

    m: int
    s: int
    u: int
    r: Optional[int] = None
    rbar: Optional[int] = None

    model_config = ConfigDict(frozen=True)

    @classmethod
    def for_m(cls, m: int) -> "Case2Constants":
        s = 2 ** (m - 1)
        return cls(
            m=m,
            s=s,
            u=s * s,
            r=s // 2 if m >= 2 else None,
            rbar=s // 4 if m >= 3 else None,
        )


class FamilyParams(BaseModel):
    """A point in parameter space: (family, p, m, ell) or (G, beta).

    ``alpha`` and ``case`` are derived; building an instance through
    :func:`mcdw.core.params.make_params` runs the full validation.
    """

    family: Family
    p: Optional[int] = None
    m: Optional[int] = None
    ell: Optional[int] = None
    beta: Optional[int] = None
    alpha: Optional[int] = None
    case: Optional[CaseTag] = None

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "family": "J2",
                "p": 2,
                "m": 2,
                "ell": 1,
                "alpha": 5,
                "case": "Case2",
            }
        },
    )

    @model_validator(mode="before")
    @classmethod
    def _derive_alpha(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("alpha") is not None:
            return data
        p, m, ell = data.get("p"), data.get("m"), data.get("ell")
        if Family(data.get("family")) is not Family.G and None not in (p, m, ell):
            data = {**data, "alpha": 1 + p ** m * ell}
        return data

    @model_validator(mode="after")
    def _check_fields(self) -> "FamilyParams":
        if self.family is Family.G:
            if self.beta is None:
                raise ValueError("family G requires beta")
            return self
        if self.p is None or self.m is None or self.ell is None:
            raise ValueError(f"family {self.family.value} requires p, m and ell")
        expected = 1 + self.p ** self.m * self.ell
        if self.alpha != expected:
            raise ValueError(f"alpha={self.alpha} does not equal 1 + p^m*ell = {expected}")
        return self

    @property
    def constants(self) -> Case2Constants:
        if self.p != 2:
            raise ValueError("Case-2 constants only exist for p=2")
        return Case2Constants.for_m(self.m)

    def label(self) -> str:
        if self.family is Family.G:
            return f"G({self.beta})"
        return f"{self.family.value}({self.alpha})"


class CongruenceReport(BaseModel):
    """Outcome of one congruence check: left ≡ right (mod modulus)."""

    condition: str
    modulus: int
    left: int
    right: int
    holds: bool
    variants: List["CongruenceReport"] = Field(default_factory=list)
    detail: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def evaluate(cls, condition: str, modulus: int, left: int, right: int, **detail: Any) -> "CongruenceReport":
        return cls(
            condition=condition,
            modulus=modulus,
            left=left,
            right=right,
            holds=(left - right) % modulus == 0,
            detail=detail,
        )

    @property
    def agree(self) -> bool:
        """True when every variant reaches the same verdict as this report."""
        return all(v.holds == self.holds for v in self.variants)
