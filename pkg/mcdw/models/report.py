"""Report models: certificates, search outcomes, series and checks."""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class IsoCertificate(BaseModel):
    """Generator images plus the proof obligations they passed."""

    source: str
    target: str
    images: List[int]
    images_nf: Optional[List[List[int]]] = None
    relations_hold: bool
    generates: bool
    orders_match: bool
    bijective: bool
    elapsed: float = 0.0

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "source": "J1(31)",
                "target": "J1(6)",
                "images": [1, 4021],
                "relations_hold": True,
                "generates": True,
                "orders_match": True,
                "bijective": True,
                "elapsed": 0.42,
            }
        }
    )

    @property
    def valid(self) -> bool:
        return self.relations_hold and self.generates and self.orders_match and self.bijective

    def to_dict(self) -> Dict[str, Any]:
        """Certificate JSON with the documented field order."""
        images = self.images_nf if self.images_nf is not None else self.images
        data: Dict[str, Any] = {"source": self.source, "target": self.target}
        for index, image in enumerate(images):
            data[f"img_{'xyz'[index] if index < 3 else index}"] = image
        data["checks"] = {
            "relations_hold": self.relations_hold,
            "generates": self.generates,
            "orders_match": self.orders_match,
            "bijective": self.bijective,
        }
        data["elapsed"] = round(self.elapsed, 3)
        return data


class SearchBudget(BaseModel):
    """Limits for an isomorphism search."""

    timeout: float = 1200.0
    candidate_cap: int = 10 ** 9
    workers: int = 1

    @field_validator("timeout", "candidate_cap", "workers")
    @classmethod
    def _positive(cls, value):
        if value <= 0:
            raise ValueError("search budget values must be positive")
        return value


class SearchOutcome(str, Enum):
    """How a search ended."""

    FOUND = "found"
    EXHAUSTED = "exhausted"
    TIMEOUT = "timeout"


class SearchResult(BaseModel):
    """Result of :func:`mcdw.core.iso.search_epimorphism` and relatives."""

    outcome: SearchOutcome
    certificate: Optional[IsoCertificate] = None
    candidates: int = 0
    elapsed: float = 0.0
    reason: Optional[str] = None
    notes: List[str] = Field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"outcome": self.outcome.value}
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        data["candidates"] = self.candidates
        if self.reason:
            data["reason"] = self.reason
        if self.notes:
            data["notes"] = list(self.notes)
        data["elapsed"] = round(self.elapsed, 3)
        return data


class SeriesTerm(BaseModel):
    """One term Z_i of the upper central series."""

    index: int
    order: int
    generators: List[int] = Field(default_factory=list)
    factor_invariants: List[int] = Field(default_factory=list)
    abelian: bool = False


class SeriesReport(BaseModel):
    """Upper central series of a group, from Z_1 up to the whole group."""

    terms: List[SeriesTerm]
    nilpotency_class: int = Field(alias="class")

    model_config = ConfigDict(populate_by_name=True)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "terms": [
                {"order": t.order, "factor_invariants": list(t.factor_invariants)}
                for t in self.terms
            ],
            "class": self.nilpotency_class,
        }


class CheckStatus(str, Enum):
    """Outcome of one named verification."""

    PASS = "pass"
    FAIL = "fail"
    TIMEOUT = "timeout"
    SKIPPED = "skipped"


class CheckReport(BaseModel):
    """A named, reproducible check with the evidence it gathered."""

    check_id: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    status: CheckStatus
    evidence: Dict[str, Any] = Field(default_factory=dict)
    elapsed: float = 0.0

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "check_id": "structure",
                "parameters": {"family": "J2", "p": 2, "m": 2, "ell": 1},
                "status": "pass",
                "evidence": {"order": 2048, "class": 5},
                "elapsed": 1.7,
            }
        }
    )

    def model_post_init(self, __context: Any) -> None:  # pylint: disable=arguments-differ
        if self.status is CheckStatus.FAIL and "witness" not in self.evidence:
            raise ValueError(f"failed check {self.check_id} must carry a witness")

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check_id": self.check_id,
            "parameters": self.parameters,
            "status": self.status.value,
            "evidence": self.evidence,
            "elapsed": round(self.elapsed, 3),
        }
