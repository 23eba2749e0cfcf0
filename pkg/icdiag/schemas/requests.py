from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from icdiag.schemas.reports import EntropyKind, ScenarioParams

_SCENARIO_FIELDS = {"family", "d", "M", "n", "kappa", "theta", "c", "S", "purity"}


class EntropyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    probs: List[float] = Field(..., min_length=1)
    alpha: float = 1.0
    kind: Literal["tsallis", "renyi", "min", "shannon", "coincidence"] = "tsallis"


class EntropyResponse(BaseModel):
    kind: str
    alpha: Optional[float] = None
    value: float


class QuantumBoundRequest(ScenarioParams):
    alpha: Optional[float] = Field(None, ge=0.0, le=2.0)
    kind: EntropyKind = "tsallis"

    def to_params(self) -> ScenarioParams:
        return ScenarioParams(**self.model_dump(include=_SCENARIO_FIELDS, exclude_none=True))


class MaxpBoundResponse(BaseModel):
    ic: float
    n: int
    lower: float
    upper: float
