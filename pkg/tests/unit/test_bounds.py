import math

import numpy as np
import pytest
from scipy.optimize import brentq

from icdiag.models.distribution import Distribution
from icdiag.services import bounds, entropy
from icdiag.services.errors import DomainError
from icdiag.services.harness import mixture_uk, sample_simplex_array

pytestmark = pytest.mark.unit

ALPHAS = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0]


# ---------- coefficients ----------

def test_coefficients_alpha_zero():
    c = bounds.coefficients(0.0, 4)
    assert (c.a, c.b) == pytest.approx((8.0, 20.0))


def test_segment_passes_through_uniform_points():
    for alpha in ALPHAS:
        for k in (1, 2, 5):
            c = bounds.coefficients(alpha, k)
            assert c.at(1.0 / k) == pytest.approx(entropy.ln_alpha(k, alpha), abs=1e-12)
            assert c.at(1.0 / (k + 1)) == pytest.approx(entropy.ln_alpha(k + 1, alpha), abs=1e-12)


def test_alpha_two_segments_coincide():
    a, b = bounds.coefficient_arrays(2.0, 6)
    np.testing.assert_allclose(a, 1.0)
    np.testing.assert_allclose(b, 1.0)


def test_coefficient_arrays_read_only():
    a, _ = bounds.coefficient_arrays(0.5, 3)
    with pytest.raises(ValueError):
        a[0] = 0.0


def test_coefficients_domain():
    with pytest.raises(DomainError):
        bounds.coefficients(2.5, 1)
    with pytest.raises(DomainError):
        bounds.coefficients(1.0, 0)


# ---------- borne polygonale ----------

def test_polygonal_at_breakpoints():
    for alpha in ALPHAS:
        for k in range(1, 6):
            b = bounds.polygonal_tsallis_bound(1.0 / k, alpha, 6)
            assert b.value == pytest.approx(entropy.ln_alpha(k, alpha), abs=1e-12)


def test_polygonal_endpoints():
    b = bounds.polygonal_tsallis_bound(1.0, 1.0, 5)
    assert b.value == pytest.approx(0.0, abs=1e-15)
    assert b.k == 1
    low = bounds.polygonal_tsallis_bound(0.2, 0.5, 5)
    assert low.value == pytest.approx(entropy.ln_alpha(5, 0.5))
    assert low.k == 4


def test_achieving_k_at_ties():
    assert bounds.max_affine(1.0 / 3.0, 1.0, 8).k == 3
    assert bounds.max_affine(0.5, 1.0, 2).k == 2
    assert bounds.max_affine(1.0, 2.0, 5).k == 1
    # α = 2 : segments identiques, k = floor(1/x)
    assert bounds.max_affine(0.3, 2.0, 5).k == 3


def test_polygonal_segment_lookup_matches_scan():
    for alpha in ALPHAS:
        for x in np.linspace(1.0 / 7, 1.0, 41):
            scan = bounds.polygonal_tsallis_bound(x, alpha, 7)
            direct = bounds.polygonal_tsallis_segment(x, alpha, 7)
            assert scan.value == pytest.approx(direct.value, abs=1e-12)


def test_polygonal_values_vectorized():
    xs = np.linspace(0.25, 1.0, 13)
    vals = bounds.polygonal_tsallis_values(xs, 0.7, 4)
    expected = [bounds.polygonal_tsallis_bound(x, 0.7, 4).value for x in xs]
    np.testing.assert_allclose(vals, expected, atol=1e-14)


def test_polygonal_dominates_smooth_bound():
    xs = np.linspace(1.0 / 8, 1.0, 200)
    for alpha in ALPHAS:
        gap = bounds.polygonal_tsallis_values(xs, alpha, 8) - bounds.smooth_values(xs, alpha)
        assert gap.min() >= -1e-12


def test_polygonal_is_lower_bound_on_samples(rng):
    rows = sample_simplex_array(6, 2000, rng)
    ic = entropy.coincidence_rows(rows)
    for alpha in ALPHAS:
        slack = entropy.tsallis_rows(rows, alpha) - bounds.polygonal_tsallis_values(ic, alpha, 6)
        assert slack.min() >= -1e-10


def test_uniform_points_saturate_polygonal_bound():
    for alpha in ALPHAS:
        for k in (1, 2, 3, 4):
            p = Distribution.uniform(k, 5)
            b = bounds.polygonal_tsallis_bound(entropy.coincidence(p), alpha, 5)
            assert entropy.tsallis(p, alpha) == pytest.approx(b.value, abs=1e-10)


def test_alpha_two_bound_is_exact(rng):
    # H_2 = 1 - I pour toute distribution
    for row in sample_simplex_array(5, 20, rng):
        b = bounds.polygonal_tsallis_bound(entropy.coincidence(row), 2.0, 5)
        assert entropy.tsallis(row, 2.0) == pytest.approx(b.value, abs=1e-12)


def test_mixtures_stay_above_polygonal_bound():
    for alpha in ALPHAS:
        for k in (1, 2, 3):
            for x in (0.3, 0.8):
                p = mixture_uk(k, x, 5)
                b = bounds.polygonal_tsallis_bound(entropy.coincidence(p), alpha, 5)
                assert entropy.tsallis(p, alpha) - b.value == pytest.approx(bounds.phi(x, alpha, k), abs=1e-10)


def test_polygonal_renyi_bound():
    t = bounds.polygonal_tsallis_bound(0.4, 1.0, 4)
    r = bounds.polygonal_renyi_bound(0.4, 1.0, 4)
    assert r.value == pytest.approx(t.value)
    r2 = bounds.polygonal_renyi_bound(0.4, 2.0, 4)
    assert r2.value == pytest.approx(-math.log(1.0 - (1.0 - 0.4)))


@pytest.mark.parametrize("x,n", [(0.1, 5), (1.5, 5), (0.5, 1)])
def test_polygonal_domain(x, n):
    with pytest.raises(DomainError):
        bounds.polygonal_tsallis_bound(x, 1.0, n)


def test_smooth_bound():
    assert bounds.smooth_bound(0.25, 1.0) == pytest.approx(math.log(4))
    assert bounds.smooth_bound(0.4, 2.0) == pytest.approx(0.6)
    with pytest.raises(DomainError):
        bounds.smooth_bound(0.0, 1.0)


@pytest.mark.parametrize("xs", [[0.0, 0.5], [0.5, 1.5], [-0.1]])
def test_smooth_values_domain(xs):
    with pytest.raises(DomainError):
        bounds.smooth_values(xs, 1.0)


# ---------- probabilité maximale ----------

def test_maxp_lower_reference_value():
    assert bounds.maxp_lower(0.6) == pytest.approx(0.72360, abs=1e-5)
    assert bounds.maxp_lower(1.0) == pytest.approx(1.0)
    assert bounds.maxp_lower(1.0 / 3.0) == pytest.approx(1.0 / 3.0)


def test_maxp_upper_endpoints():
    assert bounds.maxp_upper(0.25, 4) == pytest.approx(0.25)
    assert bounds.maxp_upper(1.0, 4) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        bounds.maxp_upper(0.2, 4)


def test_maxp_bounds_coincide_for_two_outcomes():
    for x in np.linspace(0.5, 1.0, 11):
        assert bounds.maxp_lower(x) == pytest.approx(bounds.maxp_upper(x, 2), abs=1e-12)


def test_maxp_envelope_on_samples(rng):
    rows = sample_simplex_array(5, 2000, rng)
    ic = np.clip(entropy.coincidence_rows(rows), 0.2, 1.0)
    pmax = entropy.max_probability_rows(rows)
    assert (bounds.maxp_lower_inverse_values(pmax) - ic).min() >= -1e-12
    assert (ic - bounds.maxp_upper_inverse_values(pmax, 5)).min() >= -1e-12
    assert (bounds.maxp_upper_values(ic, 5) - pmax).min() >= -1e-10


@pytest.mark.parametrize("k", range(2, 51))
def test_maxp_lower_exact_at_uniform_points(k):
    x = entropy.coincidence(Distribution.uniform(k))
    assert abs(bounds.maxp_lower(x) - 1.0 / k) <= 1e-13
    assert bounds.maxp_lower_inverse(1.0 / k) == pytest.approx(1.0 / k, abs=1e-15)


def test_maxp_lower_snaps_rounding_residue():
    # 1/5 + 1 ulp
    assert bounds.maxp_lower(0.20000000000000004) == pytest.approx(0.2, abs=1e-15)
    assert bounds.maxp_lower(0.2 + 1e-9) > 0.2 + 1e-6


def test_maxp_inverse_forms():
    xs = np.linspace(0.2, 1.0, 81)
    np.testing.assert_allclose(bounds.maxp_lower_inverse_values(bounds.maxp_lower_values(xs)), xs, atol=1e-12)
    np.testing.assert_allclose(bounds.maxp_upper_inverse_values(bounds.maxp_upper_values(xs, 5), 5), xs, atol=1e-12)
    # extrémale : k-1 issues à p, le reste sur une dernière
    assert bounds.maxp_lower_inverse(0.4) == pytest.approx(2 * 0.16 + 0.04)
    with pytest.raises(DomainError):
        bounds.maxp_lower_inverse(0.0)
    with pytest.raises(DomainError):
        bounds.maxp_upper_inverse_values([0.1], 5)


# ---------- fonctions auxiliaires ----------

def test_lemma_g_reference_value():
    assert bounds.lemma_g(1.5, 1) == pytest.approx(0.16421, abs=1e-5)
    assert bounds.lemma_g(2.0, 3) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        bounds.lemma_g(1.0, 1)


@pytest.mark.parametrize("k", range(1, 101))
def test_lemma_g_positive_inside(k):
    for alpha in np.linspace(1.05, 1.95, 10):
        assert bounds.lemma_g(alpha, k) > 0.0


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
@pytest.mark.parametrize("k", [1, 3, 10])
def test_phi_prime_endpoint_matches_g(alpha, k):
    assert bounds.phi_prime_endpoint_identity(alpha, k) == pytest.approx(0.0, abs=1e-12)
    # Φ'(1) < 0 sur (1, 2)
    assert bounds.phi_prime(1.0, alpha, k) < 0.0


def test_F_functional_nonnegative(rng):
    rows = sample_simplex_array(5, 200, rng)
    for alpha in ALPHAS:
        for k in (1, 2, 3, 4):
            assert min(bounds.F_functional(r, alpha, k) for r in rows) >= -1e-10


@pytest.mark.parametrize("k", range(1, 21))
def test_phi_vanishes_at_ends(k):
    for alpha in ALPHAS:
        assert bounds.phi(0.0, alpha, k) == pytest.approx(0.0, abs=1e-12)
        assert bounds.phi(1.0, alpha, k) == pytest.approx(0.0, abs=1e-12)
        assert bounds.phi(0.5, alpha, k) >= -1e-12


@pytest.mark.parametrize("k", range(1, 21))
def test_phi_prime_vanishes_at_zero(k):
    for alpha in (0.5, 1.0, 1.5):
        assert bounds.phi_prime(0.0, alpha, k) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("k", range(1, 21))
def test_phi_convex_at_zero(k):
    # Φ''(0) = 2Δ - α(k+1)^{1-α}/k
    for alpha in (1.1, 1.5, 1.9):
        value = bounds.phi_double_prime(0.0, alpha, k)
        delta = entropy.ln_alpha(k + 1.0, alpha) - entropy.ln_alpha(float(k), alpha)
        assert value == pytest.approx(2.0 * delta - alpha * (k + 1.0) ** (1.0 - alpha) / k, rel=1e-9)
        assert value > 0.0


def test_mixture_closed_forms():
    p = mixture_uk(2, 0.4)
    assert bounds.mixture_coincidence(0.4, 2) == pytest.approx(entropy.coincidence(p))
    assert bounds.mixture_tsallis(0.4, 0.6, 2) == pytest.approx(entropy.tsallis(p, 0.6))


def test_phi_prime_matches_finite_difference():
    h = 1e-6
    for alpha in (0.5, 1.0, 1.5):
        for x in (0.2, 0.5, 0.8):
            numeric = (bounds.phi(x + h, alpha, 2) - bounds.phi(x - h, alpha, 2)) / (2 * h)
            assert bounds.phi_prime(x, alpha, 2) == pytest.approx(numeric, rel=1e-5, abs=1e-7)


def test_phi_prime_singular_at_one():
    assert bounds.phi_prime(1.0, 0.5, 2) == -math.inf
    assert bounds.phi_double_prime(1.0, 1.5, 2) == -math.inf


def test_phi_double_prime_matches_finite_difference():
    h = 1e-5
    x, alpha, k = 0.4, 1.3, 2
    numeric = (bounds.phi_prime(x + h, alpha, k) - bounds.phi_prime(x - h, alpha, k)) / (2 * h)
    assert bounds.phi_double_prime(x, alpha, k) == pytest.approx(numeric, rel=1e-5)


def test_inflection_point_zeroes_second_derivative():
    xi = bounds.inflection_xi(1.5, 1)
    assert 0.0 < xi < 1.0
    assert bounds.f_alpha_second(xi, 1.5, 1) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("k", range(1, 101))
def test_shannon_inflection_bracket(k):
    xi = bounds.inflection_xi(1.0, k)
    assert 1.0 / (2 * (k + 1)) < xi < 1.0 / (2 * k)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
@pytest.mark.parametrize("k", range(1, 101))
def test_inflection_point_matches_root_finder(alpha, k):
    # f'' croît de -inf (x -> 0) à 2b - α > 0 (x = 1)
    root = brentq(lambda x: bounds.f_alpha_second(x, alpha, k), 1e-12, 1.0, xtol=1e-15)
    assert bounds.inflection_xi(alpha, k) == pytest.approx(root, rel=1e-9)


def test_f_alpha_matches_definition():
    c = bounds.coefficients(0.8, 2)
    x = 0.3
    expected = entropy.eta_alpha(x, 0.8) - c.a * x + c.b * x * x
    assert bounds.f_alpha(x, 0.8, 2) == pytest.approx(expected)
