from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigvalsh, ishermitian

from icdiag.services.errors import DimensionMismatchError, DomainError, InvalidMeasurementError

ComplexMatrix = npt.NDArray[np.complex128]

# --- Tolérances ---
STATE_TOL = 1e-10
PSD_TOL = 1e-10
RESOLUTION_TOL = 1e-9
GRAM_TOL = 1e-9


class Family(str, Enum):
    MUB_BASIS = "mub-basis"
    MUM = "mum"
    ETF = "etf"
    SIC = "sic"
    GSIC = "gsic"
    CUSTOM = "custom"


class SetKind(str, Enum):
    MUB = "mub"
    MUM = "mum"


def _frozen(arr: npt.ArrayLike) -> ComplexMatrix:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


def hs_products(ops_a: ComplexMatrix, ops_b: ComplexMatrix) -> npt.NDArray[np.float64]:
    """Produits de Hilbert-Schmidt tr(A_i B_j) pour deux piles d'opérateurs hermitiens."""
    return np.einsum("iab,jba->ij", ops_a, ops_b).real


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """État ρ : hermitien, de trace 1, semi-défini positif (à 1e-10 près)."""
    mat: ComplexMatrix

    def __post_init__(self) -> None:
        m = _frozen(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DomainError(f"a density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("density matrix entries must be finite")
        if not ishermitian(m, atol=STATE_TOL):
            raise DomainError("density matrix must be Hermitian (tolerance 1e-10)")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise DomainError(f"density matrix must have unit trace (got {tr!r})")
        if eigvalsh(m).min() < -STATE_TOL:
            raise DomainError("density matrix must be positive semidefinite (tolerance 1e-10)")
        object.__setattr__(self, "mat", m)

    @property
    def d(self) -> int:
        return int(self.mat.shape[0])


@dataclass(frozen=True, eq=False)
class Povm:
    """
    Mesure généralisée {M_j} : éléments PSD dont la somme vaut l'identité.
    `meta` porte les paramètres de famille (kappa, theta, n, c, S).
    """
    elements: ComplexMatrix
    family: Family = Family.CUSTOM
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        els = _frozen(self.elements)
        if els.ndim != 3 or els.shape[1] != els.shape[2] or els.shape[0] < 1:
            raise DomainError(f"POVM elements must be a stack of square matrices, got shape {els.shape}")
        d = els.shape[1]
        for j, m in enumerate(els):
            if not ishermitian(m, atol=PSD_TOL):
                raise InvalidMeasurementError(f"POVM element {j} is not Hermitian")
        lowest = float(np.linalg.eigvalsh(els).min())
        if lowest < -PSD_TOL:
            raise InvalidMeasurementError(
                f"POVM elements must be positive semidefinite (lowest eigenvalue {lowest:.3e})", -lowest
            )
        dev = float(np.abs(els.sum(axis=0) - np.eye(d)).max())
        if dev > RESOLUTION_TOL:
            raise InvalidMeasurementError(
                f"POVM elements must sum to the identity within {RESOLUTION_TOL:g} (deviation {dev:.3e})", dev
            )
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def d(self) -> int:
        return int(self.elements.shape[1])

    @property
    def size(self) -> int:
        return int(self.elements.shape[0])

    def gram(self) -> npt.NDArray[np.float64]:
        return hs_products(self.elements, self.elements)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Ensemble de MUBs ou de MUMs partageant la dimension d."""
    measurements: tuple[Povm, ...]
    kind: SetKind
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ms = tuple(self.measurements)
        if not ms:
            raise DomainError("a measurement set needs at least one measurement")
        d = ms[0].d
        if any(m.d != d for m in ms):
            raise DimensionMismatchError("all measurements of a set must share the dimension d")
        # Condition croisée : tr(E_i E'_j) = 1/d (|<b_i|b'_j>|^2 = 1/d pour des projecteurs)
        for a in range(len(ms)):
            for b in range(a + 1, len(ms)):
                cross = hs_products(ms[a].elements, ms[b].elements)
                dev = float(np.abs(cross - 1.0 / d).max())
                if dev > GRAM_TOL:
                    raise InvalidMeasurementError(
                        f"measurements {a} and {b} are not mutually unbiased (deviation {dev:.3e})", dev
                    )
        object.__setattr__(self, "measurements", ms)
        object.__setattr__(self, "kind", SetKind(self.kind))
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def d(self) -> int:
        return self.measurements[0].d

    @property
    def M(self) -> int:
        return len(self.measurements)

    def __iter__(self):
        return iter(self.measurements)

    def __len__(self) -> int:
        return self.M
