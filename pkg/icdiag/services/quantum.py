"""
États quantiques et constructions des familles de mesures : bases mutuellement
non biaisées, mesures non biaisées (MUM) d'efficacité κ, POVM issues de frames
équiangulaires tendues (ETF), SIC et SIC généralisées, avec leurs validateurs.
"""
from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy.linalg import null_space

from icdiag.models.distribution import Distribution
from icdiag.models.quantum import (
    GRAM_TOL,
    ComplexMatrix,
    DensityMatrix,
    Family,
    MeasurementSet,
    Povm,
    SetKind,
)
from icdiag.schemas.reports import EtfReport, PairDiagnostic
from icdiag.services import entropy
from icdiag.services.errors import (
    DimensionMismatchError,
    DomainError,
    InvalidMeasurementError,
    KappaOutOfRangeError,
    UnsupportedDimensionError,
)

logger = logging.getLogger(__name__)

StateKind = Literal["pure", "mixed"]

FRAME_TOL = 1e-9
THETA_TOL = 1e-12
MAX_PAIR_DIAGNOSTICS = 50

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _is_prime(d: int) -> bool:
    if d < 2:
        return False
    return all(d % p for p in range(2, int(math.isqrt(d)) + 1))


def _projectors(vectors: npt.ArrayLike) -> ComplexMatrix:
    v = np.asarray(vectors, dtype=complex)
    return np.einsum("ja,jb->jab", v, v.conj())


# ---------- états ----------

def purity(rho: DensityMatrix) -> float:
    m = rho.mat
    return float(np.einsum("ab,ba->", m, m).real)


def maximally_mixed(d: int) -> DensityMatrix:
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def pure_state(ket: npt.ArrayLike) -> DensityMatrix:
    v = np.asarray(ket, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if not norm > 0:
        raise DomainError("a pure state needs a non-zero ket")
    v = v / norm
    return DensityMatrix(np.outer(v, v.conj()))


def random_state_stack(d: int, count: int, kind: StateKind, rng: np.random.Generator) -> ComplexMatrix:
    """Pile (count, d, d) : projecteurs de kets gaussiens (pure) ou GG†/tr (mixed, mesure de Hilbert-Schmidt)."""
    if d < 2:
        raise DomainError(f"random states require d >= 2, got {d}")
    if kind == "pure":
        kets = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
        kets /= np.linalg.norm(kets, axis=1, keepdims=True)
        return _projectors(kets)
    if kind == "mixed":
        g = rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))
        rho = g @ np.conj(np.swapaxes(g, 1, 2))
        rho = 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
        tr = np.einsum("kaa->k", rho).real
        return rho / tr[:, None, None]
    raise DomainError(f"state kind must be 'pure' or 'mixed', got {kind!r}")


def random_states(d: int, count: int, kind: StateKind = "mixed", seed: int = 0) -> list[DensityMatrix]:
    rng = np.random.default_rng(seed)
    return [DensityMatrix(m) for m in random_state_stack(d, count, kind, rng)]


def random_state(d: int, kind: StateKind = "mixed", seed: int = 0) -> DensityMatrix:
    """État aléatoire reproductible : même graine, même matrice bit à bit."""
    return random_states(d, 1, kind, seed)[0]


# ---------- règle de Born ----------

def born_rows(povm: Povm, states: ComplexMatrix) -> npt.NDArray[np.float64]:
    """Probabilités tr(M_j ρ) pour une pile d'états (m, d, d) → (m, n), écrêtées et renormalisées."""
    states = np.asarray(states, dtype=complex)
    if states.shape[-1] != povm.d:
        raise DimensionMismatchError(f"state dimension {states.shape[-1]} does not match POVM dimension {povm.d}")
    p = np.einsum("jab,kba->kj", povm.elements, states).real
    p = np.clip(p, 0.0, None)
    return p / p.sum(axis=1, keepdims=True)


def born_probabilities(povm: Povm, rho: DensityMatrix) -> Distribution:
    if rho.d != povm.d:
        raise DimensionMismatchError(f"state dimension {rho.d} does not match POVM dimension {povm.d}")
    p = np.einsum("jab,ba->j", povm.elements, rho.mat).real
    return Distribution(p)


def coincidence_sum(mset: MeasurementSet, rho: DensityMatrix) -> float:
    """Σ_m I(E^(m); ρ) sur les mesures de l'ensemble."""
    return float(sum(entropy.coincidence(born_probabilities(m, rho)) for m in mset))


# ---------- MUBs ----------

def _mub_bases(d: int) -> list[ComplexMatrix]:
    if d == 2:
        bases = []
        for name in ("z", "x", "y"):
            _, vecs = np.linalg.eigh(_PAULI[name])
            bases.append(vecs[:, ::-1].T.copy())
        return bases
    if not _is_prime(d):
        raise UnsupportedDimensionError(
            f"built-in MUBs require a prime dimension, got d={d}; supply the bases as a custom POVM file"
        )
    omega = np.exp(2j * np.pi / d)
    j = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        bases.append(np.stack([omega ** ((a * j * j + m * j) % d) for m in range(d)]) / math.sqrt(d))
    return bases


def mub_set(d: int, M: int) -> MeasurementSet:
    """M bases mutuellement non biaisées en dimension première d (Pauli pour d = 2, Weyl-Heisenberg sinon)."""
    if d < 2:
        raise UnsupportedDimensionError(f"MUBs require d >= 2, got d={d}")
    if not 1 <= M <= d + 1:
        raise DomainError(f"M must lie in [1, d+1] = [1, {d + 1}], got {M}")
    bases = _mub_bases(d)[:M]
    povms = tuple(Povm(_projectors(b), family=Family.MUB_BASIS, meta={"d": d}) for b in bases)
    return MeasurementSet(povms, kind=SetKind.MUB, meta={"d": d, "M": M})


# ---------- MUMs ----------

def gell_mann(d: int) -> ComplexMatrix:
    """Matrices de Gell-Mann généralisées normalisées (tr F_m F_n = δ_mn) : symétriques, antisymétriques, diagonales."""
    if d < 2:
        raise DomainError(f"Gell-Mann matrices require d >= 2, got d={d}")
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            mats.append(s / math.sqrt(2.0))
            mats.append(a / math.sqrt(2.0))
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -float(l)
        mats.append(np.diag(diag).astype(complex) / math.sqrt(l * (l + 1.0)))
    return np.stack(mats)


def _mum_directions(d: int) -> list[ComplexMatrix]:
    """
    Pour chaque groupe b de d-1 matrices de Gell-Mann : d opérateurs de trace nulle
    F_k = F - (d + √d) F_{b,k} (k < d) et F_d = (1 + √d) F, avec F = Σ_k F_{b,k}.
    """
    gm = gell_mann(d)
    sq = math.sqrt(d)
    out = []
    for b in range(d + 1):
        group = gm[b * (d - 1):(b + 1) * (d - 1)]
        total = group.sum(axis=0)
        ops = [total - (d + sq) * g for g in group] + [(1.0 + sq) * total]
        out.append(np.stack(ops))
    return out


def _kappa_of_t(d: int, t: float) -> float:
    return 1.0 / d + t * t * (1.0 + math.sqrt(d)) ** 2 * (d - 1)


def _t_max(d: int) -> float:
    lowest = min(float(np.linalg.eigvalsh(f).min()) for f in _mum_directions(d))
    return 1.0 / (d * abs(lowest))


def kappa_max(d: int) -> float:
    """Plus grande efficacité atteinte par la construction avec des éléments PSD."""
    if d < 2:
        raise DomainError(f"MUMs require d >= 2, got d={d}")
    return _kappa_of_t(d, _t_max(d))


def mum_set(d: int, kappa: float, M: int | None = None) -> MeasurementSet:
    """
    d+1 mesures E_j = 𝟙/d + t F_j, t fixé par tr(E_j²) = κ.
    `M` restreint l'ensemble aux M premières mesures.
    """
    if d < 2:
        raise DomainError(f"MUMs require d >= 2, got d={d}")
    M = d + 1 if M is None else M
    if not 1 <= M <= d + 1:
        raise DomainError(f"M must lie in [1, d+1] = [1, {d + 1}], got {M}")
    kmax = kappa_max(d)
    if not math.isfinite(kappa) or kappa <= 1.0 / d:
        raise KappaOutOfRangeError(f"kappa must satisfy 1/d < kappa <= kappa_max = {kmax:.12g}, got {kappa!r}", kmax)
    if kappa > kmax + 1e-12:
        raise KappaOutOfRangeError(
            f"kappa {kappa!r} is not reachable in d={d}: the construction stays PSD up to kappa_max = {kmax:.12g}",
            kmax,
        )
    kappa = min(kappa, kmax)
    t = math.sqrt((kappa - 1.0 / d) / ((1.0 + math.sqrt(d)) ** 2 * (d - 1)))
    eye = np.eye(d, dtype=complex) / d
    povms = tuple(
        Povm(eye[None, :, :] + t * f, family=Family.MUM, meta={"kappa": kappa})
        for f in _mum_directions(d)[:M]
    )
    logger.debug("mum set built", extra={"d": d, "kappa": kappa, "M": M})
    return MeasurementSet(povms, kind=SetKind.MUM, meta={"d": d, "M": M, "kappa": kappa})


# ---------- SIC ----------

def _weyl_heisenberg(d: int) -> list[ComplexMatrix]:
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def sic_frame(d: int) -> ComplexMatrix:
    """d² vecteurs unitaires avec |<φ_i|φ_j>|² = 1/(d+1) : tétraèdre (d = 2), fiducial de Hesse (d = 3)."""
    if d == 2:
        axis = (_PAULI["x"] + _PAULI["y"] + _PAULI["z"]) / math.sqrt(3.0)
        _, vecs = np.linalg.eigh(0.5 * (np.eye(2) + axis))
        fiducial = vecs[:, -1]
        orbit = [np.eye(2, dtype=complex), _PAULI["x"], _PAULI["y"], _PAULI["z"]]
    elif d == 3:
        fiducial = np.array([0.0, 1.0, -1.0], dtype=complex) / math.sqrt(2.0)
        orbit = _weyl_heisenberg(3)
    else:
        raise UnsupportedDimensionError(
            f"built-in SIC fiducials cover d in {{2, 3}}, got d={d}; supply the frame as a JSON file"
        )
    return np.stack([u @ fiducial for u in orbit])


def sic_povm(d: int) -> Povm:
    povm = Povm(_projectors(sic_frame(d)) / d, family=Family.SIC, meta={"n": d * d, "theta": 1.0 / d**2})
    validate_povm_family(povm)
    return povm


def general_sic(d: int, theta: float, frame: npt.ArrayLike | None = None) -> Povm:
    """
    SIC généralisée Λ_j = μ N_j + (1 - μ)/d² 𝟙 avec μ = √((θd³ - 1)/(d - 1)).
    `frame` remplace le fiducial intégré (d² vecteurs unitaires formant une SIC).
    """
    if d < 2:
        raise DomainError(f"general SICs require d >= 2, got d={d}")
    lo, hi = 1.0 / d**3, 1.0 / d**2
    if not (lo < theta <= hi + THETA_TOL):
        raise DomainError(f"theta must lie in (1/d^3, 1/d^2] = ({lo:.12g}, {hi:.12g}], got {theta!r}")
    theta = min(theta, hi)
    if frame is None:
        vectors = sic_frame(d)
    else:
        vectors = np.asarray(frame, dtype=complex)
        if vectors.shape != (d * d, d):
            raise DimensionMismatchError(f"a SIC frame in d={d} needs {d * d} vectors of length {d}")
        report = etf_validate(vectors)
        if not report.is_etf:
            raise InvalidMeasurementError("supplied frame is not a SIC (equiangular tight frame with n = d^2)", report.c_deviation)
    mu = min(1.0, math.sqrt(max(theta * d**3 - 1.0, 0.0) / (d - 1.0)))
    sic = _projectors(vectors) / d
    elements = mu * sic + (1.0 - mu) / d**2 * np.eye(d, dtype=complex)[None, :, :]
    povm = Povm(elements, family=Family.GSIC, meta={"n": d * d, "theta": theta})
    validate_povm_family(povm)
    return povm


# ---------- ETF ----------

def simplex_frame(d: int) -> ComplexMatrix:
    """d+1 vecteurs unitaires du simplexe régulier : lignes normalisées d'une base du noyau de (1, ..., 1)."""
    if d < 2:
        raise DomainError(f"simplex frames require d >= 2, got d={d}")
    rows = null_space(np.ones((1, d + 1)))
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return rows.astype(complex)


def etf_validate(vectors: npt.ArrayLike) -> EtfReport:
    v = np.asarray(vectors, dtype=complex)
    if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
        raise DomainError(f"a frame is a non-empty list of vectors of equal length, got shape {v.shape}")
    n, d = v.shape
    norms = np.einsum("ja,ja->j", v, v.conj()).real
    unit_dev = float(np.abs(norms - 1.0).max())

    S = n / d
    frame_op = np.einsum("ja,jb->ab", v, v.conj())
    S_dev = float(np.abs(frame_op - S * np.eye(d)).max())

    c_expected = (n - d) / (d * (n - 1.0)) if n > 1 else 0.0
    pairs: list[PairDiagnostic] = []
    if n > 1:
        overlaps = np.abs(v @ v.conj().T) ** 2
        iu = np.triu_indices(n, k=1)
        off = overlaps[iu]
        c = float(off.mean())
        c_dev = float(np.abs(off - c_expected).max())
        spread = float(off.max() - off.min())
        for i, j, ov in zip(iu[0], iu[1], off):
            dev = abs(float(ov) - c_expected)
            if dev > FRAME_TOL and len(pairs) < MAX_PAIR_DIAGNOSTICS:
                pairs.append(PairDiagnostic(i=int(i), j=int(j), overlap=float(ov), deviation=dev))
    else:
        c, c_dev, spread = 0.0, 0.0, 0.0

    is_unit = unit_dev <= FRAME_TOL
    is_tight = S_dev <= FRAME_TOL
    is_equiangular = spread <= FRAME_TOL
    within = n <= d * d
    is_etf = is_unit and is_tight and is_equiangular and within and c_dev <= FRAME_TOL
    note = None
    if is_etf and n > d:
        note = f"Naimark complement: an ETF of {n} vectors exists in dimension {n - d}"
    return EtfReport(
        d=d,
        n=n,
        S=S,
        c=c,
        c_expected=c_expected,
        unit_norm_deviation=unit_dev,
        S_deviation=S_dev,
        c_deviation=c_dev,
        n_within_d2=within,
        is_unit=is_unit,
        is_tight=is_tight,
        is_equiangular=is_equiangular,
        is_etf=is_etf,
        pairs=pairs,
        naimark_note=note,
    )


def etf_povm(vectors: npt.ArrayLike) -> Povm:
    """POVM F_j = (d/n)|φ_j><φ_j| d'une ETF validée."""
    report = etf_validate(vectors)
    if not report.is_etf:
        problems = [
            name
            for name, ok in (
                ("unit norm", report.is_unit),
                ("tight", report.is_tight),
                ("equiangular", report.is_equiangular),
                ("n <= d^2", report.n_within_d2),
            )
            if not ok
        ]
        raise InvalidMeasurementError(f"frame is not an ETF (fails: {', '.join(problems) or 'c'})", report.c_deviation)
    v = np.asarray(vectors, dtype=complex)
    n, d = v.shape
    povm = Povm(_projectors(v) * (d / n), family=Family.ETF, meta={"n": n, "c": report.c_expected, "S": report.S})
    validate_povm_family(povm)
    return povm


def etf_simplex(d: int) -> Povm:
    return etf_povm(simplex_frame(d))


# ---------- validation des conditions de Gram ----------

def _expected_gram(povm: Povm) -> tuple[float, float, float] | None:
    """(trace, diagonale, hors diagonale) attendus pour la famille, None pour custom."""
    d, n, meta = povm.d, povm.size, povm.meta
    fam = povm.family
    if fam is Family.MUB_BASIS:
        return 1.0, 1.0, 0.0
    if fam is Family.MUM:
        kappa = float(meta["kappa"])
        return 1.0, kappa, (1.0 - kappa) / (d - 1.0)
    if fam is Family.ETF:
        w = d / n
        return w, w * w, w * w * float(meta["c"])
    if fam is Family.SIC:
        return 1.0 / d, 1.0 / d**2, 1.0 / (d**2 * (d + 1.0))
    if fam is Family.GSIC:
        theta = float(meta["theta"])
        return 1.0 / d, theta, (1.0 - theta * d) / (d * (d * d - 1.0))
    return None


def validate_povm_family(povm: Povm) -> float:
    """Écart maximal aux conditions de Gram de la famille ; lève InvalidMeasurementError au-delà de 1e-9."""
    try:
        expected = _expected_gram(povm)
    except KeyError as e:
        raise InvalidMeasurementError(f"{povm.family.value} POVM is missing family parameter {e.args[0]!r}") from e
    if expected is None:
        return 0.0
    tr, diag, off = expected
    gram = povm.gram()
    target = np.full(gram.shape, off)
    np.fill_diagonal(target, diag)
    traces = np.einsum("jaa->j", povm.elements).real
    dev = max(float(np.abs(gram - target).max()), float(np.abs(traces - tr).max()))
    if dev > GRAM_TOL:
        raise InvalidMeasurementError(
            f"{povm.family.value} POVM violates its Gram conditions (deviation {dev:.3e})", dev
        )
    return dev


def validate_set(mset: MeasurementSet) -> float:
    return max(validate_povm_family(m) for m in mset)

