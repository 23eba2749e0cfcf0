"""
Échantillonnage du simplexe, distributions extrémales et balayages de vérification.

Les balayages combinent des tirages uniformes et des familles injectées (mélanges de
U_k/U_{k+1}, configurations extrémales, perturbations près des points de rupture), car
l'échantillonnage uniforme n'approche presque jamais les courbes frontières.
Chaque lot de tirages possède sa propre graine (SeedSequence.spawn) : le résultat ne
dépend pas du nombre de threads.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Literal, Optional, Sequence

import numpy as np
import numpy.typing as npt

from icdiag.core.config import settings
from icdiag.models.distribution import Distribution
from icdiag.models.quantum import DensityMatrix, MeasurementSet, Povm
from icdiag.schemas.reports import (
    BoundReport,
    DiagramPoint,
    GapStat,
    QuantumSweepConfig,
    ScenarioParams,
    SweepConfig,
    SweepVerdict,
    WorstCase,
)
from icdiag.services import bounds, entropy, quantum, relations
from icdiag.services.entropy import check_order
from icdiag.services.errors import DomainError

logger = logging.getLogger(__name__)

DiagramKind = Literal["entropy", "maxp"]

CHUNK_SIZE = 25_000
DECILES = 10
PERTURBATIONS = (1e-5, 1e-3, 1e-1)
PERTURBATION_DRAWS = 8
EXTREMAL_POINTS = 21
# Marge aux extrémités des familles extrémales : la racine carrée y est mal conditionnée
EXTREMAL_MARGIN = 0.05
PROBS_TOL = 1e-12

POLYGONAL_TOLERANCES = {"tsallis": 1e-10, "renyi": 1e-10, "dominance": 1e-12}
THM1_TOLERANCES = {
    "lower": 1e-10,
    "upper": 1e-10,
    "saturation-lower": 1e-12,
    "saturation-upper": 1e-12,
    "collapse": 1e-12,
}
QUANTUM_TOLERANCES = {
    "sic-identity": 1e-11,
    "gsic-identity": 1e-11,
    "mub-coincidence-sum": 1e-10,
    "mum-coincidence-sum": 1e-10,
    "etf-coincidence": 1e-10,
    "certification": relations.SLACK_TOL,
    "collapse": 1e-12,
}


# ---------- échantillons et distributions extrémales ----------

def sample_simplex_array(n: int, count: int, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """count points uniformes du simplexe (variables exponentielles normalisées), forme (count, n)."""
    if n < 2:
        raise DomainError(f"support size n must be >= 2, got {n}")
    e = rng.exponential(size=(count, n))
    return e / e.sum(axis=1, keepdims=True)


def sample_simplex(n: int, count: int, seed: int) -> list[Distribution]:
    rng = np.random.default_rng(seed)
    return [Distribution(row) for row in sample_simplex_array(n, count, rng)]


def _mixture_rows(k: int, xs: npt.NDArray[np.float64], n: int) -> npt.NDArray[np.float64]:
    rows = np.zeros((xs.size, n))
    rows[:, :k] = ((k + xs) / (k * (k + 1.0)))[:, None]
    rows[:, k] = (1.0 - xs) / (k + 1.0)
    return rows


def mixture_uk(k: int, x: float, n: Optional[int] = None) -> Distribution:
    """x U_k + (1-x) U_{k+1} : k entrées (k+x)/(k(k+1)) et une entrée (1-x)/(k+1)."""
    if int(k) != k or k < 1:
        raise DomainError(f"mixture_uk requires an integer k >= 1, got {k!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"mixture_uk requires x in [0, 1], got {x!r}")
    size = k + 1 if n is None else n
    if size < k + 1:
        raise DomainError(f"mixture of U_{k} and U_{k + 1} needs n >= {k + 1}, got {size}")
    return Distribution(_mixture_rows(int(k), np.array([float(x)]), size)[0])


def extremal_maxp(k: int, p1: float, n: Optional[int] = None) -> Distribution:
    """k-1 probabilités égales à p1, une à 1-(k-1)p1, zéros ensuite : sature Λ_p(I) = p1."""
    if int(k) != k or k < 1:
        raise DomainError(f"extremal_maxp requires an integer k >= 1, got {k!r}")
    k = int(k)
    size = k if n is None else n
    if size < k:
        raise DomainError(f"extremal_maxp requires k <= n, got k={k}, n={size}")
    lo = 1.0 / k
    hi = 1.0 / (k - 1) if k > 1 else 1.0
    if not (lo - PROBS_TOL <= p1 <= hi + PROBS_TOL):
        raise DomainError(f"extremal_maxp requires 1/k <= p1 <= 1/(k-1) = [{lo:.12g}, {hi:.12g}], got {p1!r}")
    rest = 1.0 - (k - 1) * p1
    probs = np.zeros(size)
    probs[: k - 1] = p1
    probs[k - 1] = max(rest, 0.0)
    return Distribution(probs)


def extremal_maxp_upper(p1: float, n: int) -> Distribution:
    """p1 puis n-1 entrées égales à (1-p1)/(n-1) : sature la borne supérieure."""
    if int(n) != n or n < 2:
        raise DomainError(f"support size n must be an integer >= 2, got {n!r}")
    if not (1.0 / n - PROBS_TOL <= p1 <= 1.0 + PROBS_TOL):
        raise DomainError(f"extremal_maxp_upper requires 1/n <= p1 <= 1, got {p1!r}")
    p1 = min(max(p1, 1.0 / n), 1.0)
    probs = np.full(int(n), (1.0 - p1) / (n - 1.0))
    probs[0] = p1
    return Distribution(probs)


def _interior(lo: float, hi: float) -> npt.NDArray[np.float64]:
    w = hi - lo
    return np.linspace(lo + EXTREMAL_MARGIN * w, hi - EXTREMAL_MARGIN * w, EXTREMAL_POINTS)


def extremal_lower_rows(n: int) -> npt.NDArray[np.float64]:
    rows = []
    for k in range(2, n + 1):
        for p1 in _interior(1.0 / k, 1.0 / (k - 1)):
            r = np.zeros(n)
            r[: k - 1] = p1
            r[k - 1] = 1.0 - (k - 1) * p1
            rows.append(r)
    return np.array(rows)


def extremal_upper_rows(n: int) -> npt.NDArray[np.float64]:
    p1 = _interior(1.0 / n, 1.0)
    rows = np.repeat(((1.0 - p1) / (n - 1.0))[:, None], n, axis=1)
    rows[:, 0] = p1
    return rows


def injection_rows(n: int, rng: np.random.Generator, step: Optional[float] = None) -> npt.NDArray[np.float64]:
    """Familles difficiles : mélanges U_k/U_{k+1} sur une grille en x, uniformes, extrémales, perturbations."""
    step = settings.INJECTION_STEP if step is None else step
    xs = np.linspace(0.0, 1.0, max(2, int(round(1.0 / step)) + 1))
    blocks = [_mixture_rows(k, xs, n) for k in range(1, n)]
    uniforms = np.zeros((n, n))
    for k in range(1, n + 1):
        uniforms[k - 1, :k] = 1.0 / k
    blocks += [uniforms, extremal_lower_rows(n), extremal_upper_rows(n)]
    for eps in PERTURBATIONS:
        noise = sample_simplex_array(n, n * PERTURBATION_DRAWS, rng)
        base = np.repeat(uniforms, PERTURBATION_DRAWS, axis=0)
        blocks.append((1.0 - eps) * base + eps * noise)
    return np.concatenate(blocks)


# ---------- agrégation ----------

def _decile(ic: npt.NDArray[np.float64], n: int) -> npt.NDArray[np.int64]:
    lo = 1.0 / n
    pos = (ic - lo) / (1.0 - lo) * DECILES
    return np.clip(np.floor(pos).astype(int), 0, DECILES - 1)


@dataclass
class _Tally:
    """Agrégat associatif : minimum par contrôle, compte/min/somme des écarts par (α, décile)."""
    n_alpha: int
    checks: int = 0
    worst: dict[str, WorstCase] = field(default_factory=dict)
    gap_count: npt.NDArray[np.int64] = None
    gap_min: npt.NDArray[np.float64] = None
    gap_sum: npt.NDArray[np.float64] = None

    def __post_init__(self) -> None:
        shape = (max(self.n_alpha, 1), DECILES)
        self.gap_count = np.zeros(shape, dtype=np.int64)
        self.gap_min = np.full(shape, np.inf)
        self.gap_sum = np.zeros(shape)

    def observe(
        self,
        check: str,
        slack: npt.ArrayLike,
        rows: Optional[npt.NDArray[np.float64]] = None,
        ic: Optional[npt.NDArray[np.float64]] = None,
        alpha: Optional[float] = None,
    ) -> None:
        slack = np.atleast_1d(np.asarray(slack, dtype=float))
        if slack.size == 0:
            return
        self.checks += int(slack.size)
        j = int(slack.argmin())
        s = float(slack[j])
        cur = self.worst.get(check)
        if cur is None or s < cur.slack:
            self.worst[check] = WorstCase(
                check=check,
                slack=s,
                alpha=alpha,
                probs=None if rows is None else rows[j].tolist(),
                ic=None if ic is None else float(ic[j]),
            )

    def gaps(self, ai: int, ic: npt.NDArray[np.float64], slack: npt.NDArray[np.float64], n: int) -> None:
        dec = _decile(ic, n)
        np.add.at(self.gap_count[ai], dec, 1)
        np.minimum.at(self.gap_min[ai], dec, slack)
        np.add.at(self.gap_sum[ai], dec, slack)

    def merge(self, other: "_Tally") -> "_Tally":
        self.checks += other.checks
        for name, w in other.worst.items():
            cur = self.worst.get(name)
            if cur is None or w.slack < cur.slack:
                self.worst[name] = w
        self.gap_count += other.gap_count
        self.gap_min = np.minimum(self.gap_min, other.gap_min)
        self.gap_sum += other.gap_sum
        return self

    def gap_stats(self, alphas: Sequence[Optional[float]], n: int) -> list[GapStat]:
        lo = 1.0 / n
        width = (1.0 - lo) / DECILES
        out = []
        for ai, alpha in enumerate(alphas):
            for dec in range(DECILES):
                count = int(self.gap_count[ai, dec])
                out.append(GapStat(
                    alpha=alpha,
                    decile=dec,
                    ic_low=lo + dec * width,
                    ic_high=lo + (dec + 1) * width,
                    count=count,
                    min_slack=float(self.gap_min[ai, dec]) if count else None,
                    mean_slack=float(self.gap_sum[ai, dec] / count) if count else None,
                ))
        return out


def _verdict(
    kind: str,
    tally: _Tally,
    tolerances: dict[str, float],
    primary: str,
    **fields,
) -> SweepVerdict:
    failing = sorted(
        (w for name, w in tally.worst.items() if w.slack < -tolerances[name]),
        key=lambda w: w.slack,
    )
    failures = [f"{w.check}: min slack {w.slack:.3e} below -{tolerances[w.check]:g}" for w in failing]
    primary_worst = tally.worst.get(primary)
    verdict = SweepVerdict(
        kind=kind,
        status="FAIL" if failing else "PASS",
        checks=tally.checks,
        min_slack=None if primary_worst is None else primary_worst.slack,
        worst=failing[0] if failing else primary_worst,
        failures=failures,
        **fields,
    )
    log = logger.warning if failing else logger.info
    log(
        "sweep finished",
        extra={"sweep": kind, "status": verdict.status, "min_slack": verdict.min_slack, "checks": verdict.checks},
    )
    return verdict


def _chunks(samples: int, seed: int) -> tuple[list[int], list[np.random.SeedSequence]]:
    """Tailles des lots et graines ; la dernière graine sert aux injections."""
    n_chunks = max(1, math.ceil(samples / CHUNK_SIZE))
    sizes = [min(CHUNK_SIZE, samples - i * CHUNK_SIZE) for i in range(n_chunks)]
    return sizes, np.random.SeedSequence(seed).spawn(n_chunks + 1)


def _run_chunks(work, count: int, threads: Optional[int]) -> list:
    workers = max(1, threads or settings.ICDIAG_THREADS)
    if workers == 1:
        return [work(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, range(count)))


# ---------- balayage de la borne polygonale ----------

def _polygonal_tally(rows: npt.NDArray[np.float64], alphas: Sequence[float], n: int) -> _Tally:
    t = _Tally(len(alphas))
    ic = np.clip(entropy.coincidence_rows(rows), 1.0 / n, 1.0)
    for ai, alpha in enumerate(alphas):
        lower = bounds.polygonal_tsallis_values(ic, alpha, n)
        slack = entropy.tsallis_rows(rows, alpha) - lower
        t.observe("tsallis", slack, rows, ic, alpha)
        renyi_slack = entropy.renyi_rows(rows, alpha) - entropy.renyi_from_tsallis_array(lower, alpha)
        t.observe("renyi", renyi_slack, rows, ic, alpha)
        t.observe("dominance", lower - bounds.smooth_values(ic, alpha), rows, ic, alpha)
        t.gaps(ai, ic, slack, n)
    return t


def gap_statistics(probs: npt.ArrayLike, alphas: Iterable[float], n: int) -> list[GapStat]:
    """Écart min/moyen H_α(P) - L_α(I(P)) par (α, décile de coïncidence sur [1/n, 1])."""
    rows = np.atleast_2d(np.asarray(probs, dtype=float))
    alphas = [check_order(a, 0.0, 2.0) for a in alphas]
    return _polygonal_tally(rows, alphas, n).gap_stats(alphas, n)


def run_polygonal_sweep(config: SweepConfig, threads: Optional[int] = None) -> SweepVerdict:
    """H_α(P) >= L_α(I(P)), version Rényi, et L_α >= ln_α(1/I) sur échantillons et injections."""
    n, alphas = config.n, list(config.alphas)
    logger.info("polygonal sweep started", extra={"n": n, "samples": config.samples, "seed": config.seed})
    sizes, seeds = _chunks(config.samples, config.seed)

    def work(i: int) -> _Tally:
        rows = sample_simplex_array(n, sizes[i], np.random.default_rng(seeds[i]))
        return _polygonal_tally(rows, alphas, n)

    parts = _run_chunks(work, len(sizes), threads)
    parts.append(_polygonal_tally(injection_rows(n, np.random.default_rng(seeds[-1])), alphas, n))
    tally = reduce(_Tally.merge, parts)
    return _verdict(
        "polygonal",
        tally,
        POLYGONAL_TOLERANCES,
        "tsallis",
        n=n,
        alphas=alphas,
        samples=config.samples,
        seed=config.seed,
        gaps=tally.gap_stats(alphas, n),
    )


# ---------- balayage de l'enveloppe de probabilité maximale ----------

def _thm1_tally(rows: npt.NDArray[np.float64], n: int) -> _Tally:
    """Encadrement contrôlé sous forme réciproque (I en fonction de max p), sans racine carrée."""
    t = _Tally(1)
    ic = np.clip(entropy.coincidence_rows(rows), 1.0 / n, 1.0)
    pmax = entropy.max_probability_rows(rows)
    t.observe("lower", bounds.maxp_lower_inverse_values(pmax) - ic, rows, ic)
    t.observe("upper", ic - bounds.maxp_upper_inverse_values(pmax, n), rows, ic)
    t.gaps(0, ic, pmax - bounds.maxp_lower_values(ic), n)
    if n == 2:
        # hors du voisinage de 1/2 où Λ_p est ramené sur le point de rupture
        live = 2.0 * ic - 1.0 > 2.0 * bounds.BREAKPOINT_SNAP
        x = ic[live]
        closed = (1.0 + np.sqrt(2.0 * x - 1.0)) / 2.0
        dev = np.maximum(np.abs(bounds.maxp_lower_values(x) - closed), np.abs(bounds.maxp_upper_values(x, 2) - closed))
        t.observe("collapse", -dev, rows[live], x)
    return t


def _saturation_tally(n: int) -> _Tally:
    t = _Tally(1)
    low = extremal_lower_rows(n)
    ic = entropy.coincidence_rows(low)
    t.observe("saturation-lower", -np.abs(low.max(axis=1) - bounds.maxp_lower_values(ic)), low, ic)
    up = extremal_upper_rows(n)
    ic = np.clip(entropy.coincidence_rows(up), 1.0 / n, 1.0)
    t.observe("saturation-upper", -np.abs(up.max(axis=1) - bounds.maxp_upper_values(ic, n)), up, ic)
    return t


def run_thm1_sweep(config: SweepConfig, threads: Optional[int] = None) -> SweepVerdict:
    """
    Λ_p(I) <= max p <= (1 + √(n-1)√(nI-1))/n, saturation des familles extrémales, cas n = 2.

    L'encadrement est contrôlé sous forme réciproque, en indice de coïncidence :
    les marges (min_slack) sont donc des écarts en I.
    """
    n = config.n
    logger.info("max-probability sweep started", extra={"n": n, "samples": config.samples, "seed": config.seed})
    sizes, seeds = _chunks(config.samples, config.seed)

    def work(i: int) -> _Tally:
        return _thm1_tally(sample_simplex_array(n, sizes[i], np.random.default_rng(seeds[i])), n)

    parts = _run_chunks(work, len(sizes), threads)
    parts.append(_thm1_tally(injection_rows(n, np.random.default_rng(seeds[-1])), n))
    parts.append(_saturation_tally(n))
    tally = reduce(_Tally.merge, parts)
    return _verdict(
        "thm1",
        tally,
        THM1_TOLERANCES,
        "lower",
        n=n,
        samples=config.samples,
        seed=config.seed,
        gaps=tally.gap_stats([None], n),
    )


# ---------- balayage quantique ----------

def _theta_grid(d: int, points: int = 5) -> list[float]:
    return np.linspace(1.0 / d**3, 1.0 / d**2, points + 1)[1:].tolist()


def _kappa_grid(d: int) -> list[float]:
    kmax = quantum.kappa_max(d)
    return [0.5 * (1.0 / d + kmax), kmax]


def builtin_catalogue(d: int) -> list[tuple[str, Povm | MeasurementSet]]:
    """Mesures intégrées en dimension d : MUBs (M = 1..d+1), MUMs, ETF simplexe et SIC, SIC, SIC généralisées."""
    items: list[tuple[str, Povm | MeasurementSet]] = [
        (f"mub-M{M}", quantum.mub_set(d, M)) for M in range(1, d + 2)
    ]
    items += [(f"mum-kappa{k:.6g}", quantum.mum_set(d, k)) for k in _kappa_grid(d)]
    items += [
        ("etf-simplex", quantum.etf_simplex(d)),
        ("etf-sic-frame", quantum.etf_povm(quantum.sic_frame(d))),
        ("sic", quantum.sic_povm(d)),
    ]
    items += [(f"gsic-theta{t:.6g}", quantum.general_sic(d, t)) for t in _theta_grid(d)]
    return items


def _coincidences(povms: Iterable[Povm], stack: np.ndarray) -> npt.NDArray[np.float64]:
    return sum(entropy.coincidence_rows(quantum.born_rows(p, stack)) for p in povms)


def _collapse_deviation(d: int, alphas: Sequence[float]) -> float:
    """Écart maximal des cas limites κ = 1 (MUB), θ = 1/d² (SIC), n = d² (SIC)."""
    dev = 0.0
    for q in np.linspace(1.0 / d, 1.0, 5):
        q = float(q)
        mub = ScenarioParams(family="mub", d=d, M=d + 1, purity=q)
        mum = ScenarioParams(family="mum", d=d, M=d + 1, kappa=1.0, purity=q)
        sic = ScenarioParams(family="sic", d=d, purity=q)
        gsic = ScenarioParams(family="gsic", d=d, theta=1.0 / d**2, purity=q)
        etf = ScenarioParams(family="etf", d=d, n=d * d, purity=q)
        for alpha in alphas:
            kinds = ("tsallis", "renyi") if alpha >= 1.0 else ("tsallis",)
            for kind in kinds:
                ref = relations.scenario_bound(mub, alpha, kind).bound
                dev = max(dev, abs(relations.scenario_bound(mum, alpha, kind).bound - ref))
            for kind in ("tsallis", "renyi"):
                ref = relations.scenario_bound(sic, alpha, kind).bound
                dev = max(dev, abs(relations.scenario_bound(gsic, alpha, kind).bound - ref))
                dev = max(dev, abs(relations.scenario_bound(etf, alpha, kind).bound - ref))
    return dev


def _quantum_tally(d: int, alphas: Sequence[float], count: int, seed: np.random.SeedSequence) -> tuple[_Tally, list[BoundReport]]:
    rng = np.random.default_rng(seed)
    stack = np.concatenate([
        quantum.random_state_stack(d, count, "mixed", rng),
        quantum.random_state_stack(d, count, "pure", rng),
    ])
    states = [DensityMatrix(m) for m in stack]
    pur = np.einsum("kab,kba->k", stack, stack).real
    t = _Tally(0)

    sic = quantum.sic_povm(d)
    t.observe("sic-identity", -np.abs(_coincidences([sic], stack) - relations.sic_abscissa(d, pur)), alpha=None)
    for theta in _theta_grid(d):
        g = quantum.general_sic(d, theta)
        t.observe("gsic-identity", -np.abs(_coincidences([g], stack) - relations.gsic_abscissa(d, theta, pur)))

    for M in range(1, d + 2):
        total = _coincidences(quantum.mub_set(d, M), stack)
        t.observe("mub-coincidence-sum", pur + (M - 1.0) / d - total)
    for kappa in _kappa_grid(d):
        mset = quantum.mum_set(d, kappa)
        for M in range(1, d + 2):
            total = _coincidences(mset.measurements[:M], stack)
            limit = (M - 1.0) / d + (1.0 - kappa + (kappa * d - 1.0) * pur) / (d - 1.0)
            t.observe("mum-coincidence-sum", limit - total)
    for frame in (quantum.simplex_frame(d), quantum.sic_frame(d)):
        f = quantum.etf_povm(frame)
        t.observe("etf-coincidence", relations.etf_abscissa(d, f.size, pur) - _coincidences([f], stack))

    reports: list[BoundReport] = []
    for _, target in builtin_catalogue(d):
        reports += relations.certify(target, states, alphas)
    t.observe("certification", [r.slack for r in reports])
    t.observe("collapse", -_collapse_deviation(d, alphas))
    return t, reports


def run_quantum_sweep(config: QuantumSweepConfig, threads: Optional[int] = None) -> SweepVerdict:
    """Identités de coïncidence, inégalités de somme et certification du catalogue intégré."""
    alphas = list(config.alphas)
    logger.info("quantum sweep started", extra={"states": config.states, "seed": config.seed})
    seeds = np.random.SeedSequence(config.seed).spawn(len(config.dims))

    def work(i: int) -> tuple[_Tally, list[BoundReport]]:
        return _quantum_tally(config.dims[i], alphas, config.states, seeds[i])

    parts = _run_chunks(work, len(config.dims), threads)
    tally = reduce(_Tally.merge, [p[0] for p in parts])
    reports = [r for p in parts for r in p[1]]
    return _verdict(
        "quantum",
        tally,
        QUANTUM_TOLERANCES,
        "certification",
        alphas=alphas,
        samples=2 * config.states,
        seed=config.seed,
        reports=reports,
    )


# ---------- diagrammes ----------

def emit_diagram(kind: DiagramKind, config: SweepConfig, alpha: Optional[float] = None) -> list[DiagramPoint]:
    """
    Nuage d'échantillons et courbes frontières sur une grille de [1/n, 1].

    entropy : valeur = H_α, colonnes smooth_bound = ln_α(1/I) et polygonal_bound = L_α(I).
    maxp : valeur = max p, colonnes lower = Λ_p(I) et upper = (1 + √(n-1)√(nI-1))/n.
    """
    n = config.n
    rows = sample_simplex_array(n, config.samples, np.random.default_rng(config.seed))
    ic = np.clip(entropy.coincidence_rows(rows), 1.0 / n, 1.0)
    grid = np.linspace(1.0 / n, 1.0, config.grid)
    breaks = 1.0 / np.arange(n, 0, -1, dtype=float)
    points: list[DiagramPoint] = []

    if kind == "entropy":
        a = check_order(config.alphas[0] if alpha is None else alpha, 0.0, 2.0)

        def curve(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return bounds.smooth_values(xs, a), bounds.polygonal_tsallis_values(xs, a, n)

        h = entropy.tsallis_rows(rows, a)
        smooth, poly = curve(ic)
        points += [
            DiagramPoint(ic=x, value=v, tag="sample", alpha=a, smooth_bound=s, polygonal_bound=p)
            for x, v, s, p in zip(ic.tolist(), h.tolist(), smooth.tolist(), poly.tolist())
        ]
        smooth, poly = curve(grid)
        points += [
            DiagramPoint(ic=x, value=p, tag="boundary-lower", alpha=a, smooth_bound=s, polygonal_bound=p)
            for x, s, p in zip(grid.tolist(), smooth.tolist(), poly.tolist())
        ]
        smooth, poly = curve(breaks)
        points += [
            DiagramPoint(ic=x, value=p, tag="breakpoint", alpha=a, smooth_bound=s, polygonal_bound=p)
            for x, s, p in zip(breaks.tolist(), smooth.tolist(), poly.tolist())
        ]
    elif kind == "maxp":

        def envelope(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return bounds.maxp_lower_values(xs), bounds.maxp_upper_values(xs, n)

        lo, up = envelope(ic)
        pmax = entropy.max_probability_rows(rows)
        points += [
            DiagramPoint(ic=x, value=v, tag="sample", lower=l, upper=u)
            for x, v, l, u in zip(ic.tolist(), pmax.tolist(), lo.tolist(), up.tolist())
        ]
        lo, up = envelope(grid)
        for tag, values in (("boundary-lower", lo), ("boundary-upper", up)):
            points += [
                DiagramPoint(ic=x, value=v, tag=tag, lower=l, upper=u)
                for x, v, l, u in zip(grid.tolist(), values.tolist(), lo.tolist(), up.tolist())
            ]
        lo, up = envelope(breaks)
        points += [
            DiagramPoint(ic=x, value=l, tag="breakpoint", lower=l, upper=u)
            for x, l, u in zip(breaks.tolist(), lo.tolist(), up.tolist())
        ]
    else:
        raise DomainError(f"diagram kind must be 'entropy' or 'maxp', got {kind!r}")
    logger.info("diagram emitted", extra={"diagram": kind, "n": n, "points": len(points)})
    return points
