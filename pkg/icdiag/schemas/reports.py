from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ALPHA_GRID = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
PURITY_TOL = 1e-12
PARAM_TOL = 1e-9

FamilyName = Literal["mub", "mum", "etf", "sic", "gsic"]
EntropyKind = Literal["tsallis", "renyi", "min"]

# Paramètres requis / interdits par famille
_REQUIRED = {
    "mub": {"M"},
    "mum": {"M", "kappa"},
    "etf": {"n"},
    "sic": set(),
    "gsic": {"theta"},
}
_ALLOWED = {
    "mub": {"M"},
    "mum": {"M", "kappa"},
    "etf": {"n", "c", "S"},
    "sic": {"n", "theta"},
    "gsic": {"n", "theta"},
}
_OPTIONAL_FIELDS = ("M", "n", "kappa", "theta", "c", "S")


class ScenarioParams(BaseModel):
    """Paramètres d'un scénario de mesure : exactement ceux que la famille requiert."""
    model_config = ConfigDict(extra="forbid")

    family: FamilyName
    d: int = Field(..., ge=2)
    M: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=1)
    kappa: Optional[float] = None
    theta: Optional[float] = None
    c: Optional[float] = None
    S: Optional[float] = None
    purity: float = 1.0

    @model_validator(mode="after")
    def _check_family(self):
        d = self.d
        present = {f for f in _OPTIONAL_FIELDS if getattr(self, f) is not None}
        missing = _REQUIRED[self.family] - present
        if missing:
            raise ValueError(f"family '{self.family}' requires {sorted(missing)}")
        extra = present - _ALLOWED[self.family]
        if extra:
            raise ValueError(f"family '{self.family}' does not take {sorted(extra)}")

        if not (1.0 / d - PURITY_TOL <= self.purity <= 1.0 + PURITY_TOL):
            raise ValueError(f"purity must lie in [1/d, 1] = [{1.0 / d:.12g}, 1], got {self.purity!r}")
        self.purity = min(max(self.purity, 1.0 / d), 1.0)

        if self.family in ("mub", "mum") and not 1 <= self.M <= d + 1:
            raise ValueError(f"M must lie in [1, d+1] = [1, {d + 1}], got {self.M}")
        if self.family == "mum" and not (1.0 / d <= self.kappa <= 1.0):
            raise ValueError(f"kappa must lie in [1/d, 1], got {self.kappa!r}")
        if self.family == "etf":
            n = self.n
            if not d <= n <= d * d:
                raise ValueError(f"an ETF needs d <= n <= d^2, got n={n}, d={d}")
            c = (n - d) / (d * (n - 1.0)) if n > 1 else 0.0
            S = n / d
            if self.c is not None and abs(self.c - c) > PARAM_TOL:
                raise ValueError(f"c must equal (n-d)/(d(n-1)) = {c:.12g}")
            if self.S is not None and abs(self.S - S) > PARAM_TOL:
                raise ValueError(f"S must equal n/d = {S:.12g}")
            self.c, self.S = c, S
        if self.family in ("sic", "gsic"):
            if self.n is not None and self.n != d * d:
                raise ValueError(f"a (general) SIC has n = d^2 = {d * d} elements")
            self.n = d * d
        if self.family == "sic":
            if self.theta is not None and abs(self.theta - 1.0 / d**2) > PARAM_TOL:
                raise ValueError("a rank-one SIC has theta = 1/d^2")
            self.theta = 1.0 / d**2
        if self.family == "gsic" and not (1.0 / d**3 < self.theta <= 1.0 / d**2 + PARAM_TOL):
            raise ValueError(f"theta must lie in (1/d^3, 1/d^2] = ({1.0 / d**3:.12g}, {1.0 / d**2:.12g}]")
        return self


class BoundReport(BaseModel):
    family: str
    d: Optional[int] = None
    M: Optional[int] = None
    n: Optional[int] = None
    kappa: Optional[float] = None
    theta: Optional[float] = None
    alpha: Optional[float] = None
    kind: EntropyKind
    purity: Optional[float] = None
    bound: float
    achieving_k: Optional[int] = None
    measured: Optional[float] = None
    slack: Optional[float] = None
    upper: Optional[float] = None
    note: Optional[str] = None

    def with_measurement(self, measured: float) -> "BoundReport":
        slack = measured - self.bound
        if self.upper is not None:
            slack = min(slack, self.upper - measured)
        return self.model_copy(update={"measured": measured, "slack": slack})


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(8, ge=2)
    alphas: List[float] = Field(default_factory=lambda: list(ALPHA_GRID))
    samples: int = Field(100_000, ge=1)
    seed: int = 42
    grid: int = Field(400, ge=2)

    @field_validator("alphas")
    @classmethod
    def _alphas_in_range(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one alpha is required")
        if any(not 0.0 <= a <= 2.0 for a in v):
            raise ValueError("alphas must lie in [0, 2]")
        return v


class QuantumSweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dims: List[int] = Field(default_factory=lambda: [2, 3])
    alphas: List[float] = Field(default_factory=lambda: list(ALPHA_GRID))
    states: int = Field(1_000, ge=1)
    seed: int = 42

    @field_validator("dims")
    @classmethod
    def _dims_supported(cls, v: List[int]) -> List[int]:
        if not v or any(d not in (2, 3) for d in v):
            raise ValueError("the built-in catalogue covers d in {2, 3}")
        return v

    @field_validator("alphas")
    @classmethod
    def _alphas_in_range(cls, v: List[float]) -> List[float]:
        if not v or any(not 0.0 <= a <= 2.0 for a in v):
            raise ValueError("alphas must be a non-empty subset of [0, 2]")
        return v


class DiagramPoint(BaseModel):
    ic: float
    value: float
    tag: Literal["sample", "boundary-lower", "boundary-upper", "breakpoint"]
    alpha: Optional[float] = None
    smooth_bound: Optional[float] = None
    polygonal_bound: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None


class GapStat(BaseModel):
    alpha: Optional[float] = None
    decile: int
    ic_low: float
    ic_high: float
    count: int
    min_slack: Optional[float] = None
    mean_slack: Optional[float] = None


class WorstCase(BaseModel):
    check: str
    slack: float
    alpha: Optional[float] = None
    probs: Optional[List[float]] = None
    ic: Optional[float] = None


class SweepVerdict(BaseModel):
    kind: Literal["polygonal", "thm1", "quantum"]
    status: Literal["PASS", "FAIL"]
    n: Optional[int] = None
    alphas: List[float] = Field(default_factory=list)
    samples: int = 0
    seed: int = 0
    checks: int = 0
    min_slack: Optional[float] = None
    worst: Optional[WorstCase] = None
    failures: List[str] = Field(default_factory=list)
    gaps: List[GapStat] = Field(default_factory=list)
    reports: List[BoundReport] = Field(default_factory=list)


class PairDiagnostic(BaseModel):
    i: int
    j: int
    overlap: float
    deviation: float


class EtfReport(BaseModel):
    d: int
    n: int
    S: float
    c: float
    c_expected: float
    unit_norm_deviation: float
    S_deviation: float
    c_deviation: float
    n_within_d2: bool
    is_unit: bool
    is_tight: bool
    is_equiangular: bool
    is_etf: bool
    pairs: List[PairDiagnostic] = Field(default_factory=list)
    naimark_note: Optional[str] = None
