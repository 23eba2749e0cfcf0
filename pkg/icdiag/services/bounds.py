"""
Diagrammes d'information : coefficients des segments, bornes polygonales de Tsallis/Rényi,
enveloppe exacte de la probabilité maximale, et fonctions auxiliaires (f, F, Φ, ξ, g_k)
utilisées comme oracles dans les tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from icdiag.services import entropy
from icdiag.services.entropy import DistributionLike, EntropyOrder, check_order, is_shannon
from icdiag.services.errors import DomainError

# Bruit d'arrondi toléré sur l'abscisse (I(U_n) calculé peut tomber sous 1/n)
X_TOL = 1e-12
TIE_TOL = 1e-12
# Écart relatif k·x - 1 en deçà duquel x est traité comme le point de rupture 1/k
BREAKPOINT_SNAP = 1e-14


@dataclass(frozen=True)
class PolygonalCoefficients:
    """Segment a_{αk} - b_{αk} x passant par (1/k, ln_α k) et (1/(k+1), ln_α(k+1))."""
    k: int
    a: float
    b: float
    alpha: float

    def at(self, x: float) -> float:
        return self.a - self.b * x


@dataclass(frozen=True)
class BoundValue:
    value: float
    k: int


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise DomainError(f"segment index k must be a positive integer, got {k!r}")
    return int(k)


def _check_n(n: int) -> int:
    if int(n) != n or n < 2:
        raise DomainError(f"support size n must be an integer >= 2, got {n!r}")
    return int(n)


def _check_ic(x: float, n: int) -> float:
    x = float(x)
    if not (1.0 / n - X_TOL <= x <= 1.0 + X_TOL):
        raise DomainError(
            f"index of coincidence must lie in [1/n, 1] = [{1.0 / n:.12g}, 1] for n={n}, got {x!r}"
        )
    return min(max(x, 1.0 / n), 1.0)


@lru_cache(maxsize=256)
def _coefficient_table(alpha: float, kmax: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    ks = np.arange(1, kmax + 2, dtype=float)
    ln = entropy.ln_alpha_array(ks, alpha)
    lk, lk1 = ln[:-1], ln[1:]
    k = ks[:-1]
    a = (k + 1.0) * lk1 - k * lk
    b = k * (k + 1.0) * (lk1 - lk)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def coefficient_arrays(alpha: EntropyOrder, kmax: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """(a_{αk}, b_{αk}) pour k = 1..kmax, en lecture seule."""
    alpha = check_order(alpha, 0.0, 2.0)
    return _coefficient_table(alpha, _check_k(kmax))


def coefficients(alpha: EntropyOrder, k: int) -> PolygonalCoefficients:
    alpha = check_order(alpha, 0.0, 2.0)
    k = _check_k(k)
    a, b = _coefficient_table(alpha, k)
    return PolygonalCoefficients(k=k, a=float(a[k - 1]), b=float(b[k - 1]), alpha=alpha)


# ---------- borne polygonale ----------

def tie_index(vals: npt.NDArray[np.float64], xs: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """
    Indice (base 0) du segment retenu, ligne par ligne : parmi les k atteignant le maximum
    à TIE_TOL près, celui le plus proche de floor(1/x).
    """
    vals = np.atleast_2d(vals)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    kmax = vals.shape[-1]
    top = vals.max(axis=-1, keepdims=True)
    hits = vals >= top - TIE_TOL * (1.0 + np.abs(top))
    target = np.clip(np.floor(1.0 / xs + 1e-9), 1, kmax) - 1
    dist = np.where(hits, np.abs(np.arange(kmax)[None, :] - target[:, None]), np.inf)
    return dist.argmin(axis=-1)


def max_affine(x: float, alpha: EntropyOrder, kmax: int) -> BoundValue:
    """
    max_{1<=k<=kmax} {a_{αk} - b_{αk} x} par balayage exhaustif (sans contrôle de domaine sur x).
    Aux points de rupture x = 1/k, le segment k = floor(1/x) est retenu.
    """
    a, b = coefficient_arrays(alpha, kmax)
    vals = a - b * x
    j = int(tie_index(vals, x)[0])
    return BoundValue(value=float(vals.max()), k=j + 1)


def polygonal_tsallis_bound(x: float, alpha: EntropyOrder, n: int) -> BoundValue:
    """L_α(x) restreinte à n issues : max_{1<=k<=n-1} {a_{αk} - b_{αk} x}."""
    alpha = check_order(alpha, 0.0, 2.0)
    n = _check_n(n)
    x = _check_ic(x, n)
    return max_affine(x, alpha, n - 1)


def polygonal_tsallis_segment(x: float, alpha: EntropyOrder, n: int) -> BoundValue:
    """Même borne par recherche directe du segment k = floor(1/x), plafonné à n-1."""
    alpha = check_order(alpha, 0.0, 2.0)
    n = _check_n(n)
    x = _check_ic(x, n)
    k = min(max(int(math.floor(1.0 / x)), 1), n - 1)
    c = coefficients(alpha, k)
    return BoundValue(value=c.at(x), k=k)


def polygonal_tsallis_values(xs: npt.ArrayLike, alpha: EntropyOrder, n: int) -> npt.NDArray[np.float64]:
    """Version vectorisée de polygonal_tsallis_bound (valeurs seulement)."""
    n = _check_n(n)
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() < 1.0 / n - X_TOL or xs.max() > 1.0 + X_TOL):
        raise DomainError(f"index of coincidence must lie in [1/n, 1] for n={n}")
    a, b = coefficient_arrays(alpha, n - 1)
    return (a[None, :] - np.multiply.outer(xs.ravel(), b)).max(axis=1).reshape(xs.shape)


def polygonal_renyi_bound(x: float, alpha: EntropyOrder, n: int) -> BoundValue:
    """(1-α)^{-1} ln[1 + (1-α) L_α(x)] ; borne de Shannon en α = 1."""
    t = polygonal_tsallis_bound(x, alpha, n)
    return BoundValue(value=entropy.renyi_from_tsallis(t.value, alpha), k=t.k)


def smooth_bound(x: float, alpha: EntropyOrder) -> float:
    """Borne de Jensen ln_α(1/x)."""
    alpha = check_order(alpha, 0.0, 2.0)
    if not 0.0 < x <= 1.0 + X_TOL:
        raise DomainError(f"smooth bound requires 0 < x <= 1, got {x!r}")
    return entropy.ln_alpha(1.0 / min(x, 1.0), alpha)


def smooth_values(xs: npt.ArrayLike, alpha: EntropyOrder) -> npt.NDArray[np.float64]:
    alpha = check_order(alpha, 0.0, 2.0)
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() <= 0.0 or xs.max() > 1.0 + X_TOL):
        raise DomainError("smooth bound requires 0 < x <= 1")
    return entropy.ln_alpha_array(1.0 / np.minimum(xs, 1.0), alpha)


# ---------- probabilité maximale ----------

def _maxp_lower_array(xs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    k = np.maximum(2.0, np.ceil(1.0 / xs))
    # résidu d'arrondi en x = 1/k : ramené à 0 avant la racine
    excess = k * xs - 1.0
    excess = np.where(excess <= BREAKPOINT_SNAP * k, 0.0, excess)
    return (1.0 + np.sqrt(excess / (k - 1.0))) / k


def maxp_lower(x: float) -> float:
    """Λ_p(x) = (1/k)(1 + sqrt((kx-1)/(k-1))) sur [1/k, 1/(k-1)]."""
    if not 0.0 < x <= 1.0 + X_TOL:
        raise DomainError(f"maxp_lower requires 0 < x <= 1, got {x!r}")
    return float(_maxp_lower_array(np.array([min(x, 1.0)]))[0])


def maxp_lower_values(xs: npt.ArrayLike) -> npt.NDArray[np.float64]:
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() <= 0.0 or xs.max() > 1.0 + X_TOL):
        raise DomainError("maxp_lower requires 0 < x <= 1")
    return _maxp_lower_array(np.minimum(xs, 1.0))


def maxp_upper_values(xs: npt.ArrayLike, n: int) -> npt.NDArray[np.float64]:
    n = _check_n(n)
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() < 1.0 / n - X_TOL or xs.max() > 1.0 + X_TOL):
        raise DomainError(f"index of coincidence must lie in [1/n, 1] for n={n}")
    rad = np.clip(n * np.minimum(xs, 1.0) - 1.0, 0.0, None)
    return (1.0 + math.sqrt(n - 1) * np.sqrt(rad)) / n


def maxp_upper(x: float, n: int) -> float:
    """(1/n)(1 + sqrt(n-1) sqrt(nx-1))."""
    n = _check_n(n)
    x = _check_ic(x, n)
    return float(maxp_upper_values(np.array([x]), n)[0])


def maxp_lower_inverse_values(ps: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    Réciproque de Λ_p : plus grand I compatible avec max p = p,
    (k-1)p² + (1-(k-1)p)² avec k = ceil(1/p).

    Polynomiale en p, donc bien conditionnée aux points de rupture :
    Λ_p(I) <= p équivaut à I <= maxp_lower_inverse(p).
    """
    ps = np.asarray(ps, dtype=float)
    if ps.size and (ps.min() <= 0.0 or ps.max() > 1.0 + X_TOL):
        raise DomainError("maximal probability must lie in (0, 1]")
    ps = np.minimum(ps, 1.0)
    m = np.ceil(1.0 / ps) - 1.0
    rest = np.clip(1.0 - m * ps, 0.0, None)
    return m * ps * ps + rest * rest


def maxp_lower_inverse(p: float) -> float:
    return float(maxp_lower_inverse_values(np.array([p]))[0])


def maxp_upper_inverse_values(ps: npt.ArrayLike, n: int) -> npt.NDArray[np.float64]:
    """Plus petit I compatible avec max p = p sur n issues : p² + (1-p)²/(n-1)."""
    n = _check_n(n)
    ps = np.asarray(ps, dtype=float)
    if ps.size and (ps.min() < 1.0 / n - X_TOL or ps.max() > 1.0 + X_TOL):
        raise DomainError(f"maximal probability must lie in [1/n, 1] for n={n}")
    ps = np.clip(ps, 1.0 / n, 1.0)
    return ps * ps + (1.0 - ps) ** 2 / (n - 1.0)


# ---------- fonctions auxiliaires ----------

def f_alpha(x: float, alpha: EntropyOrder, k: int) -> float:
    """f_{αk}(x) = η_α(x) - a_{αk} x + b_{αk} x²."""
    c = coefficients(alpha, k)
    return entropy.eta_alpha(x, alpha) - c.a * x + c.b * x * x


def f_alpha_second(x: float, alpha: EntropyOrder, k: int) -> float:
    """f''_{αk}(x) = 2 b_{αk} - α x^{α-2}."""
    alpha = check_order(alpha, 0.0, 2.0, open_lo=True, open_hi=True)
    if not 0.0 < x <= 1.0:
        raise DomainError(f"f'' requires 0 < x <= 1, got {x!r}")
    return 2.0 * coefficients(alpha, k).b - alpha * x ** (alpha - 2.0)


def F_functional(p: DistributionLike, alpha: EntropyOrder, k: int) -> float:
    """F_{αk}(P) = H_α(P) - a_{αk} + b_{αk} I(P) ; non négatif pour α dans [0, 2]."""
    c = coefficients(alpha, k)
    return entropy.tsallis(p, alpha) - c.a + c.b * entropy.coincidence(p)


def _mixture_parts(x: float, k: int) -> tuple[float, float]:
    return (k + x) / (k * (k + 1.0)), (1.0 - x) / (k + 1.0)


def mixture_tsallis(x: float, alpha: EntropyOrder, k: int) -> float:
    """H_α(x U_k + (1-x) U_{k+1}) en forme close."""
    alpha = check_order(alpha, 0.0, 2.0)
    q1, q2 = _mixture_parts(x, k)
    eta = entropy.eta_alpha_array(np.array([q1, q2]), alpha)
    return float(k * eta[0] + eta[1])


def mixture_coincidence(x: float, k: int) -> float:
    """I(x U_k + (1-x) U_{k+1}) = (k + x²)/(k(k+1))."""
    return (k + x * x) / (k * (k + 1.0))


def phi(x: float, alpha: EntropyOrder, k: int) -> float:
    """Φ_{αk}(x) = F_{αk} du mélange x U_k + (1-x) U_{k+1}."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"phi requires x in [0, 1], got {x!r}")
    c = coefficients(alpha, k)
    return mixture_tsallis(x, alpha, k) - c.a + c.b * mixture_coincidence(x, k)


def _delta_ln(alpha: float, k: int) -> float:
    return entropy.ln_alpha(k + 1.0, alpha) - entropy.ln_alpha(float(k), alpha)


def phi_prime(x: float, alpha: EntropyOrder, k: int) -> float:
    """Φ'_{αk}(x) ; vaut -inf en x = 1 pour α <= 1."""
    alpha = check_order(alpha, 0.0, 2.0, open_lo=True, open_hi=True)
    k = _check_k(k)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"phi_prime requires x in [0, 1], got {x!r}")
    if x == 1.0 and alpha <= 1.0:
        return -math.inf
    ratio = math.log((k + x) / k)
    tail = math.log1p(-x) if x < 1.0 else -math.inf
    if is_shannon(alpha):
        bracket = tail - ratio
    else:
        near = math.expm1((alpha - 1.0) * ratio)
        far = math.expm1((alpha - 1.0) * tail) if x < 1.0 else -1.0
        bracket = (near - far) / (1.0 - alpha)
    return alpha * bracket / (k + 1.0) ** alpha + 2.0 * x * _delta_ln(alpha, k)


def phi_double_prime(x: float, alpha: EntropyOrder, k: int) -> float:
    alpha = check_order(alpha, 0.0, 2.0, open_lo=True, open_hi=True)
    k = _check_k(k)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"phi_double_prime requires x in [0, 1], got {x!r}")
    if x == 1.0:
        return -math.inf
    inner = k ** (1.0 - alpha) * (k + x) ** (alpha - 2.0) + (1.0 - x) ** (alpha - 2.0)
    return 2.0 * _delta_ln(alpha, k) - alpha * inner / (k + 1.0) ** alpha


def inflection_xi(alpha: EntropyOrder, k: int) -> float:
    """Point d'inflexion ξ_{αk} = (2 b_{αk}/α)^{1/(α-2)} de f_{αk}."""
    alpha = check_order(alpha, 0.0, 2.0, open_lo=True, open_hi=True)
    b = coefficients(alpha, k).b
    return (2.0 * b / alpha) ** (1.0 / (alpha - 2.0))


def lemma_g(alpha: EntropyOrder, k: int) -> float:
    """g_k(α) = α/(k+1) + 2(1 + 1/k)^{1-α} - 2, positive sur (1, 2), nulle en 2."""
    alpha = check_order(alpha, 1.0, 2.0, open_lo=True)
    k = _check_k(k)
    return alpha / (k + 1.0) + 2.0 * (1.0 + 1.0 / k) ** (1.0 - alpha) - 2.0


def phi_prime_endpoint_identity(alpha: EntropyOrder, k: int) -> float:
    """Résidu (1-α) k^{α-1} Φ'_{αk}(1) - g_k(α) ; nul pour α dans (1, 2)."""
    alpha = check_order(alpha, 1.0, 2.0, open_lo=True, open_hi=True)
    k = _check_k(k)
    scaled = (1.0 - alpha) * k ** (alpha - 1.0) * phi_prime(1.0, alpha, k)
    return scaled - lemma_g(alpha, k)
