from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import numpy.typing as npt

from icdiag.services.errors import DomainError

# Bruit des probabilités de Born : entrées légèrement négatives tolérées puis écrêtées
TOL_NEG = 1e-10
TOL_SUM = 1e-9


@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Distribution finie P = (p_1, ..., p_n).

    Les zéros restent en place : n est fixé par le contexte (les bornes en dépendent).
    Après construction chaque entrée est dans [0, 1] et la somme vaut 1 à la précision machine.
    """
    probs: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float).ravel()
        if arr.size < 1:
            raise DomainError("a distribution needs at least one entry (n >= 1)")
        if not np.all(np.isfinite(arr)):
            raise DomainError("probabilities must be finite numbers")
        if arr.min() < -TOL_NEG or arr.max() > 1.0 + TOL_NEG:
            raise DomainError(f"probabilities must lie in [0, 1] (tolerance {TOL_NEG:g})")
        total = float(arr.sum())
        if abs(total - 1.0) > TOL_SUM:
            raise DomainError(f"probabilities must sum to 1 within {TOL_SUM:g} (got {total!r})")
        arr = np.clip(arr, 0.0, 1.0)
        arr = arr / arr.sum()
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def n(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.probs.tolist())

    def __repr__(self) -> str:
        return f"Distribution({self.probs.tolist()!r})"

    def tolist(self) -> list[float]:
        return self.probs.tolist()

    def padded(self, n: int) -> "Distribution":
        """Complète par des zéros jusqu'à n entrées."""
        if n < self.n:
            raise DomainError(f"cannot pad a distribution of size {self.n} down to {n}")
        return Distribution(np.concatenate([self.probs, np.zeros(n - self.n)]))

    @classmethod
    def of(cls, values: Iterable[float]) -> "Distribution":
        return cls(np.fromiter(values, dtype=float))

    @classmethod
    def uniform(cls, k: int, n: int | None = None) -> "Distribution":
        """U_k : k probabilités égales à 1/k, complétées de zéros jusqu'à n."""
        if k < 1:
            raise DomainError("uniform(k) requires k >= 1")
        size = k if n is None else n
        if size < k:
            raise DomainError(f"uniform({k}) does not fit in {size} outcomes")
        arr = np.zeros(size)
        arr[:k] = 1.0 / k
        return cls(arr)

    @classmethod
    def point_mass(cls, n: int = 1) -> "Distribution":
        return cls.uniform(1, n)
