from __future__ import annotations

import logging

from fastapi import APIRouter, HTTPException, Query, status

from icdiag.models.distribution import Distribution
from icdiag.schemas.files import FrameFile
from icdiag.schemas.reports import BoundReport, EtfReport
from icdiag.schemas.requests import EntropyRequest, EntropyResponse, MaxpBoundResponse, QuantumBoundRequest
from icdiag.services import bounds, entropy, quantum, relations
from icdiag.services.errors import DomainError

router = APIRouter(prefix="/api", tags=["Diagrams"])
logger = logging.getLogger(__name__)


def _unprocessable(e: DomainError) -> HTTPException:
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))


@router.post("/entropy", response_model=EntropyResponse)
def compute_entropy(req: EntropyRequest):
    """Entropie (ou coïncidence) d'une distribution."""
    try:
        p = Distribution(req.probs)
        if req.kind == "tsallis":
            value = entropy.tsallis(p, req.alpha)
        elif req.kind == "renyi":
            value = entropy.renyi(p, req.alpha)
        elif req.kind == "shannon":
            value = entropy.shannon(p)
        elif req.kind == "coincidence":
            value = entropy.coincidence(p)
        else:
            value = entropy.min_entropy(p)
    except DomainError as e:
        raise _unprocessable(e)
    alpha = req.alpha if req.kind in ("tsallis", "renyi") else None
    return EntropyResponse(kind=req.kind, alpha=alpha, value=value)


@router.get("/bounds/polygonal", response_model=BoundReport)
def polygonal_bound(
    ic: float = Query(..., gt=0.0, le=1.0),
    alpha: float = Query(..., ge=0.0, le=2.0),
    n: int = Query(..., ge=1),
    kind: str = Query("tsallis", pattern="^(tsallis|renyi)$"),
):
    """Borne polygonale L_α(I) (ou sa version Rényi) pour n issues."""
    try:
        b = bounds.polygonal_tsallis_bound(ic, alpha, n) if kind == "tsallis" else bounds.polygonal_renyi_bound(ic, alpha, n)
    except DomainError as e:
        raise _unprocessable(e)
    logger.debug("polygonal bound", extra={"alpha": alpha, "n": n})
    return BoundReport(family="distribution", n=n, alpha=alpha, kind=kind, bound=b.value, achieving_k=b.k)


@router.get("/bounds/maxp", response_model=MaxpBoundResponse)
def maxp_bound(ic: float = Query(..., gt=0.0, le=1.0), n: int = Query(..., ge=1)):
    try:
        return MaxpBoundResponse(ic=ic, n=n, lower=bounds.maxp_lower(ic), upper=bounds.maxp_upper(ic, n))
    except DomainError as e:
        raise _unprocessable(e)


@router.post("/quantum/bound", response_model=BoundReport)
def quantum_bound(req: QuantumBoundRequest):
    """Borne d'incertitude d'une famille de mesures à pureté donnée."""
    try:
        report = relations.scenario_bound(req.to_params(), req.alpha, req.kind)
    except DomainError as e:
        raise _unprocessable(e)
    logger.info("quantum bound", extra={"family": req.family, "d": req.d, "alpha": req.alpha})
    return report


@router.post("/frames/validate", response_model=EtfReport)
def validate_frame(frame: FrameFile):
    try:
        return quantum.etf_validate(frame.to_array())
    except DomainError as e:
        raise _unprocessable(e)
