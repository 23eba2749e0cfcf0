"""
Fonctionnelles scalaires sur les distributions finies : α-logarithme, entropies de
Tsallis et de Rényi, indice de coïncidence, probabilité maximale, min-entropie.

Les fonctions `*_rows` travaillent ligne par ligne sur un tableau (m, n) et servent aux sweeps.
"""
from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt

from icdiag.models.distribution import Distribution
from icdiag.services.errors import DomainError

EntropyOrder = float
DistributionLike = Union[Distribution, Sequence[float], npt.NDArray[np.float64]]

# En deçà, on évalue directement la formule de Shannon
ALPHA_ONE_TOL = 1e-8


def is_shannon(alpha: float) -> bool:
    return abs(alpha - 1.0) < ALPHA_ONE_TOL


def check_order(
    alpha: float,
    lo: float = 0.0,
    hi: float | None = None,
    *,
    open_lo: bool = False,
    open_hi: bool = False,
) -> float:
    """Valide l'ordre α contre l'intervalle requis par l'opération appelante."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError("alpha must be a finite real number")
    below = alpha <= lo if open_lo else alpha < lo
    above = hi is not None and (alpha >= hi if open_hi else alpha > hi)
    if below or above:
        left = "(" if open_lo else "["
        right = ")" if open_hi else "]"
        upper = "inf" if hi is None else f"{hi:g}"
        raise DomainError(f"alpha must lie in {left}{lo:g}, {upper}{right}, got {alpha:g}")
    return alpha


def as_distribution(p: DistributionLike) -> Distribution:
    return p if isinstance(p, Distribution) else Distribution(np.asarray(p, dtype=float))


# ---------- noyaux vectorisés ----------

def ln_alpha_array(x: npt.ArrayLike, alpha: float) -> npt.NDArray[np.float64]:
    lx = np.log(np.asarray(x, dtype=float))
    if is_shannon(alpha):
        return lx
    return np.expm1((1.0 - alpha) * lx) / (1.0 - alpha)


def eta_alpha_array(p: npt.ArrayLike, alpha: float) -> npt.NDArray[np.float64]:
    """η_α appliquée terme à terme ; η_α(0) = 0 pour tout α (convention 0^0 = 0)."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    x = p[pos]
    lx = np.log(x)
    if is_shannon(alpha):
        out[pos] = -x * lx
    else:
        out[pos] = x * np.expm1((alpha - 1.0) * lx) / (1.0 - alpha)
    return out


def tsallis_rows(probs: npt.ArrayLike, alpha: float) -> npt.NDArray[np.float64]:
    return eta_alpha_array(probs, alpha).sum(axis=-1)


def renyi_from_tsallis_array(t: npt.ArrayLike, alpha: float) -> npt.NDArray[np.float64]:
    t = np.asarray(t, dtype=float)
    if is_shannon(alpha):
        return t.copy()
    arg = (1.0 - alpha) * t
    if np.any(arg <= -1.0):
        raise DomainError("1 + (1 - alpha) * H_alpha must be positive")
    return np.log1p(arg) / (1.0 - alpha)


def renyi_rows(probs: npt.ArrayLike, alpha: float) -> npt.NDArray[np.float64]:
    return renyi_from_tsallis_array(tsallis_rows(probs, alpha), alpha)


def coincidence_rows(probs: npt.ArrayLike) -> npt.NDArray[np.float64]:
    p = np.asarray(probs, dtype=float)
    return np.einsum("...j,...j->...", p, p)


def max_probability_rows(probs: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return np.asarray(probs, dtype=float).max(axis=-1)


# ---------- opérations scalaires ----------

def ln_alpha(x: float, alpha: EntropyOrder) -> float:
    """α-logarithme (x^{1-α} - 1)/(1 - α), ln x en α = 1."""
    alpha = check_order(alpha)
    if not x > 0:
        raise DomainError(f"ln_alpha requires x > 0, got {x!r}")
    return float(ln_alpha_array(x, alpha))


def eta_alpha(x: float, alpha: EntropyOrder) -> float:
    alpha = check_order(alpha)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"eta_alpha requires x in [0, 1], got {x!r}")
    return float(eta_alpha_array(np.array([x]), alpha)[0])


def renyi_from_tsallis(t: float, alpha: EntropyOrder) -> float:
    """R_α = (1-α)^{-1} ln[1 + (1-α) H_α] ; identité en α = 1."""
    alpha = check_order(alpha)
    return float(renyi_from_tsallis_array(t, alpha))


def tsallis(p: DistributionLike, alpha: EntropyOrder) -> float:
    alpha = check_order(alpha)
    return float(tsallis_rows(as_distribution(p).probs, alpha))


def shannon(p: DistributionLike) -> float:
    return float(tsallis_rows(as_distribution(p).probs, 1.0))


def renyi(p: DistributionLike, alpha: EntropyOrder) -> float:
    alpha = check_order(alpha)
    return float(renyi_rows(as_distribution(p).probs, alpha))


def coincidence(p: DistributionLike) -> float:
    """Indice de coïncidence I(P) = Σ p_j²."""
    return float(coincidence_rows(as_distribution(p).probs))


def max_probability(p: DistributionLike) -> float:
    return float(as_distribution(p).probs.max())


def min_entropy(p: DistributionLike) -> float:
    return -math.log(max_probability(p))
