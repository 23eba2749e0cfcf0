"""
Relations d'incertitude entropiques : bornes dépendantes de l'état (via la pureté) et
indépendantes de l'état pour les ensembles de MUBs/MUMs, les POVM d'ETF, SIC et SIC
généralisées, encadrement de la min-entropie, et certification sur données de Born.

Chaque borne de Tsallis est la borne polygonale évaluée en une abscisse de coïncidence
propre à la famille ; la borne de Rényi s'en déduit par la transformation logarithmique.
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from icdiag.models.quantum import DensityMatrix, Family, MeasurementSet, Povm, SetKind
from icdiag.schemas.reports import BoundReport, EntropyKind, ScenarioParams
from icdiag.services import bounds, entropy
from icdiag.services.entropy import EntropyOrder, check_order
from icdiag.services.errors import DomainError
from icdiag.services.quantum import born_rows, validate_povm_family

logger = logging.getLogger(__name__)

Measurement = Union[Povm, MeasurementSet]

SLACK_TOL = 1e-9
SANDWICH_TOL = 1e-10
GENERIC_NOTE = "custom POVM without family parameters: generic single-measurement bound from measured coincidence"


# ---------- abscisses de coïncidence ----------

def mub_abscissa(d: int, M: int, purity: float) -> float:
    return (purity * d + M - 1.0) / (M * d)


def mum_abscissa(d: int, M: int, kappa: float, purity: float) -> float:
    return (M - 1.0) / (M * d) + (1.0 - kappa + (kappa * d - 1.0) * purity) / (M * (d - 1.0))


def etf_abscissa(d: int, n: int, purity: float) -> float:
    S = n / d
    c = (n - d) / (d * (n - 1.0)) if n > 1 else 0.0
    return (S * c + (1.0 - c) * purity) / (S * S)


def sic_abscissa(d: int, purity: float) -> float:
    return (1.0 + purity) / (d * (d + 1.0))


def gsic_abscissa(d: int, theta: float, purity: float) -> float:
    return (d * (1.0 - theta * d) + (theta * d**3 - 1.0) * purity) / (d * (d * d - 1.0))


def _abscissa(params: ScenarioParams, purity: float) -> float:
    f, d = params.family, params.d
    if f == "mub":
        return mub_abscissa(d, params.M, purity)
    if f == "mum":
        return mum_abscissa(d, params.M, params.kappa, purity)
    if f == "etf":
        return etf_abscissa(d, params.n, purity)
    if f == "sic":
        return sic_abscissa(d, purity)
    return gsic_abscissa(d, params.theta, purity)


def _state_independent_abscissa(params: ScenarioParams) -> float:
    """Formes closes à pureté 1."""
    f, d = params.family, params.d
    if f == "mub":
        return (d + params.M - 1.0) / (params.M * d)
    if f == "mum":
        return (params.M + params.kappa * d - 1.0) / (params.M * d)
    if f == "etf":
        n = params.n
        return (d * d - 2.0 * d + n) / (n * n - n)
    if f == "sic":
        return 2.0 / (d * (d + 1.0))
    return (params.theta * d * d + 1.0) / (d * (d + 1.0))


def _kmax(params: ScenarioParams) -> int:
    if params.family in ("mub", "mum"):
        return params.d - 1
    return params.n - 1


def _averaged(params: ScenarioParams) -> bool:
    return params.family in ("mub", "mum") and params.M > 1


def _expect(params: ScenarioParams, *families: str) -> None:
    if params.family not in families:
        raise DomainError(f"expected a scenario of family {' or '.join(families)}, got '{params.family}'")


# ---------- rapports ----------

def _report(params: ScenarioParams, alpha: Optional[float], kind: EntropyKind, value: float, k: Optional[int], **extra) -> BoundReport:
    return BoundReport(
        family=params.family,
        d=params.d,
        M=params.M,
        n=params.n,
        kappa=params.kappa,
        theta=params.theta,
        alpha=alpha,
        kind=kind,
        purity=params.purity,
        bound=value,
        achieving_k=k,
        **extra,
    )


def _tsallis_at(params: ScenarioParams, x: float, alpha: float) -> BoundReport:
    best = bounds.max_affine(x, alpha, _kmax(params))
    return _report(params, alpha, "tsallis", best.value, best.k)


def _renyi_from(tsallis_report: BoundReport, params: ScenarioParams) -> BoundReport:
    alpha = tsallis_report.alpha
    if _averaged(params) and alpha < 1.0:
        raise DomainError(
            f"Renyi bounds for averaged {params.family.upper()} sets are proven only for alpha in [1, 2], got {alpha:g}"
        )
    value = entropy.renyi_from_tsallis(tsallis_report.bound, alpha)
    return _report(params, alpha, "renyi", value, tsallis_report.achieving_k)


def _pair(params: ScenarioParams, x: float, alpha: float) -> tuple[BoundReport, BoundReport]:
    t = _tsallis_at(params, x, alpha)
    return t, _renyi_from(t, params)


def mub_avg_bound(params: ScenarioParams, alpha: EntropyOrder) -> BoundReport:
    """Borne de Tsallis sur l'entropie moyenne de M MUBs."""
    _expect(params, "mub")
    alpha = check_order(alpha, 0.0, 2.0)
    return _tsallis_at(params, _abscissa(params, params.purity), alpha)


def mub_avg_renyi_bound(params: ScenarioParams, alpha: EntropyOrder) -> BoundReport:
    """Borne de Rényi moyenne : α dans [1, 2] dès que M > 1."""
    return _renyi_from(mub_avg_bound(params, alpha), params)


def mum_avg_bound(params: ScenarioParams, alpha: EntropyOrder) -> BoundReport:
    """Borne de Tsallis sur l'entropie moyenne de M MUMs de paramètre κ."""
    _expect(params, "mum")
    alpha = check_order(alpha, 0.0, 2.0)
    return _tsallis_at(params, _abscissa(params, params.purity), alpha)


def mum_avg_renyi_bound(params: ScenarioParams, alpha: EntropyOrder) -> BoundReport:
    return _renyi_from(mum_avg_bound(params, alpha), params)


def mum_bounds(params: ScenarioParams, alpha: EntropyOrder) -> tuple[BoundReport, BoundReport]:
    """(Tsallis, Rényi) ; DomainError pour α < 1 dès que M > 1."""
    t = mum_avg_bound(params, alpha)
    return t, _renyi_from(t, params)


def etf_bounds(params: ScenarioParams, alpha: EntropyOrder) -> tuple[BoundReport, BoundReport]:
    _expect(params, "etf")
    alpha = check_order(alpha, 0.0, 2.0)
    return _pair(params, _abscissa(params, params.purity), alpha)


def sic_bounds(params: ScenarioParams, alpha: EntropyOrder) -> tuple[BoundReport, BoundReport]:
    _expect(params, "sic")
    alpha = check_order(alpha, 0.0, 2.0)
    return _pair(params, _abscissa(params, params.purity), alpha)


def gsic_bounds(params: ScenarioParams, alpha: EntropyOrder) -> tuple[BoundReport, BoundReport]:
    _expect(params, "gsic")
    alpha = check_order(alpha, 0.0, 2.0)
    return _pair(params, _abscissa(params, params.purity), alpha)


def _sandwich_values(d: int, theta: float, purity: npt.ArrayLike) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    purity = np.asarray(purity, dtype=float)
    rad = d * purity - 1.0
    if np.any(rad < -SANDWICH_TOL):
        raise DomainError(f"purity must be at least 1/d = {1.0 / d:.12g} for the min-entropy estimate")
    rad = np.clip(rad, 0.0, None)
    lower = 2.0 * math.log(d) - np.log1p(math.sqrt(max(theta * d**3 - 1.0, 0.0)) * np.sqrt(rad))
    x = gsic_abscissa(d, theta, purity)
    upper = -np.log(bounds.maxp_lower_values(np.atleast_1d(x))).reshape(np.shape(x))
    return lower, upper


def min_entropy_sandwich(params: ScenarioParams) -> tuple[float, float]:
    """
    Encadrement de la min-entropie d'une SIC (générale) :
    2 ln d - ln(1 + √(θd³-1)√(d·tr ρ² - 1))  <=  R_∞  <=  -ln Λ_p(I).
    """
    _expect(params, "sic", "gsic")
    lower, upper = _sandwich_values(params.d, params.theta, params.purity)
    return float(lower), float(upper)


def min_entropy_report(params: ScenarioParams) -> BoundReport:
    lower, upper = min_entropy_sandwich(params)
    return _report(params, None, "min", lower, None, upper=upper)


def state_independent_bound(params: ScenarioParams, alpha: EntropyOrder, kind: EntropyKind = "tsallis") -> BoundReport:
    """Borne valable pour tout état, obtenue en pureté 1."""
    alpha = check_order(alpha, 0.0, 2.0)
    pure = params.model_copy(update={"purity": 1.0})
    t = _tsallis_at(pure, _state_independent_abscissa(pure), alpha)
    if kind == "tsallis":
        return t
    if kind == "renyi":
        return _renyi_from(t, pure)
    raise DomainError(f"state-independent bounds exist for kinds tsallis and renyi, got {kind!r}")


def scenario_bound(params: ScenarioParams, alpha: Optional[EntropyOrder], kind: EntropyKind = "tsallis") -> BoundReport:
    """Point d'entrée unique : famille + pureté + (α, kind) → BoundReport."""
    if kind == "min":
        return min_entropy_report(params)
    if alpha is None:
        raise DomainError(f"alpha is required for {kind} bounds")
    if params.family == "mub":
        return mub_avg_bound(params, alpha) if kind == "tsallis" else mub_avg_renyi_bound(params, alpha)
    if params.family == "mum":
        return mum_avg_bound(params, alpha) if kind == "tsallis" else mum_avg_renyi_bound(params, alpha)
    family_bounds = {"etf": etf_bounds, "sic": sic_bounds, "gsic": gsic_bounds}[params.family]
    t, r = family_bounds(params, alpha)
    return t if kind == "tsallis" else r


# ---------- certification ----------

def params_for(target: Measurement) -> Optional[ScenarioParams]:
    """Paramètres de scénario déduits des métadonnées ; None pour une POVM custom."""
    if isinstance(target, MeasurementSet):
        if target.kind is SetKind.MUB:
            return ScenarioParams(family="mub", d=target.d, M=target.M)
        kappa = target.meta.get("kappa", target.measurements[0].meta.get("kappa"))
        return ScenarioParams(family="mum", d=target.d, M=target.M, kappa=float(kappa))
    fam, d, meta = target.family, target.d, target.meta
    if fam is Family.MUB_BASIS:
        return ScenarioParams(family="mub", d=d, M=1)
    if fam is Family.MUM:
        return ScenarioParams(family="mum", d=d, M=1, kappa=float(meta["kappa"]))
    if fam is Family.ETF:
        return ScenarioParams(family="etf", d=d, n=target.size)
    if fam is Family.SIC:
        return ScenarioParams(family="sic", d=d)
    if fam is Family.GSIC:
        return ScenarioParams(family="gsic", d=d, theta=float(meta["theta"]))
    return None


def _measured_rows(povms: Sequence[Povm], states: np.ndarray, alpha: Optional[float], kind: EntropyKind) -> npt.NDArray[np.float64]:
    vals = []
    for povm in povms:
        p = born_rows(povm, states)
        if kind == "tsallis":
            vals.append(entropy.tsallis_rows(p, alpha))
        elif kind == "renyi":
            vals.append(entropy.renyi_rows(p, alpha))
        else:
            vals.append(-np.log(entropy.max_probability_rows(p)))
    return np.mean(vals, axis=0)


def _tsallis_bound_rows(xs: npt.NDArray[np.float64], alpha: float, kmax: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    a, b = bounds.coefficient_arrays(alpha, kmax)
    vals = a[None, :] - np.multiply.outer(xs, b)
    return vals.max(axis=1), bounds.tie_index(vals, xs) + 1


def certify(
    target: Measurement,
    states: Sequence[DensityMatrix],
    alphas: Iterable[float],
    kinds: Sequence[EntropyKind] = ("tsallis", "renyi", "min"),
) -> list[BoundReport]:
    """
    Confronte les entropies mesurées (moyennes sur l'ensemble) aux bornes applicables.

    Un rapport par (α, kind), plus un rapport de min-entropie pour les SIC :
    le pire état, son entropie mesurée, la borne et le jeu minimal.
    Les combinaisons hors du domaine prouvé (Rényi moyen avec α < 1, min-entropie hors SIC)
    sont omises.
    """
    if not states:
        raise DomainError("certification needs at least one state")
    povms = list(target) if isinstance(target, MeasurementSet) else [target]
    d = povms[0].d
    if any(s.d != d for s in states):
        raise DomainError(f"all states must have dimension d={d}")
    for p in povms:
        validate_povm_family(p)

    params = params_for(target)
    stack = np.stack([s.mat for s in states])
    purities = np.einsum("kab,kba->k", stack, stack).real
    m = len(states)
    reports: list[BoundReport] = []

    for alpha in alphas:
        alpha = check_order(alpha, 0.0, 2.0)
        for kind in kinds:
            if kind == "min":
                continue
            if params is not None and _averaged(params) and kind == "renyi" and alpha < 1.0:
                continue
            measured = _measured_rows(povms, stack, alpha, kind)
            if params is None:
                n = povms[0].size
                xs = entropy.coincidence_rows(born_rows(povms[0], stack))
                kmax = max(n - 1, 1)
                note = GENERIC_NOTE
            else:
                xs = np.asarray(_abscissa(params, np.clip(purities, 1.0 / d, 1.0)), dtype=float)
                kmax = _kmax(params)
                note = f"worst case over {m} states"
            tb, ks = _tsallis_bound_rows(xs, alpha, kmax)
            bound_vals = tb if kind == "tsallis" else entropy.renyi_from_tsallis_array(tb, alpha)
            slack = measured - bound_vals
            w = int(slack.argmin())
            rep = BoundReport(
                family=params.family if params else Family.CUSTOM.value,
                d=d,
                M=params.M if params else None,
                n=params.n if params else povms[0].size,
                kappa=params.kappa if params else None,
                theta=params.theta if params else None,
                alpha=alpha,
                kind=kind,
                purity=float(purities[w]),
                bound=float(bound_vals[w]),
                achieving_k=int(ks[w]),
                measured=float(measured[w]),
                slack=float(slack[w]),
                note=note,
            )
            reports.append(rep)

    if "min" in kinds and params is not None and params.family in ("sic", "gsic"):
        measured = _measured_rows(povms, stack, None, "min")
        lower, upper = _sandwich_values(d, params.theta, purities)
        slack = np.minimum(measured - lower, upper - measured)
        w = int(slack.argmin())
        base = params.model_copy(update={"purity": float(np.clip(purities[w], 1.0 / d, 1.0))})
        rep = _report(base, None, "min", float(lower[w]), None, upper=float(upper[w]))
        reports.append(rep.model_copy(update={
            "measured": float(measured[w]),
            "slack": float(slack[w]),
            "note": f"worst case over {m} states",
        }))

    worst = min((r.slack for r in reports), default=None)
    logger.info(
        "certification done",
        extra={"family": reports[0].family if reports else None, "states": m, "min_slack": worst},
    )
    return reports
