import numpy as np
import pytest

from icdiag.schemas.reports import QuantumSweepConfig, SweepConfig
from icdiag.services import bounds, entropy, harness
from icdiag.services.errors import DomainError

pytestmark = pytest.mark.unit


# ---------- échantillons ----------

def test_sample_simplex_reproducible():
    a = harness.sample_simplex(4, 50, seed=3)
    b = harness.sample_simplex(4, 50, seed=3)
    assert [p.tolist() for p in a] == [p.tolist() for p in b]
    assert all(abs(sum(p.tolist()) - 1.0) < 1e-12 for p in a)
    with pytest.raises(DomainError):
        harness.sample_simplex(1, 5, seed=0)


def test_mixture_uk_entries():
    p = harness.mixture_uk(2, 0.4, 4)
    assert p.tolist() == pytest.approx([0.4, 0.4, 0.2, 0.0])
    assert harness.mixture_uk(3, 1.0).tolist() == pytest.approx([1 / 3, 1 / 3, 1 / 3, 0.0])
    with pytest.raises(DomainError):
        harness.mixture_uk(2, 1.5)
    with pytest.raises(DomainError):
        harness.mixture_uk(3, 0.5, 3)


def test_extremal_maxp_saturates_lower_envelope():
    p = harness.extremal_maxp(3, 0.4)
    assert p.tolist() == pytest.approx([0.4, 0.4, 0.2])
    assert bounds.maxp_lower(entropy.coincidence(p)) == pytest.approx(0.4, abs=1e-12)
    with pytest.raises(DomainError):
        harness.extremal_maxp(3, 0.6)


def test_extremal_maxp_upper_saturates_upper_envelope():
    p = harness.extremal_maxp_upper(0.7, 4)
    assert p.tolist() == pytest.approx([0.7, 0.1, 0.1, 0.1])
    assert bounds.maxp_upper(entropy.coincidence(p), 4) == pytest.approx(0.7, abs=1e-12)


def test_injection_rows_are_distributions(rng):
    rows = harness.injection_rows(5, rng, step=0.1)
    np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-12)
    assert rows.min() >= 0.0
    # chaque U_k est présent
    for k in range(1, 6):
        target = np.zeros(5)
        target[:k] = 1.0 / k
        assert np.any(np.all(np.isclose(rows, target), axis=1))


# ---------- statistiques d'écart ----------

def test_gap_statistics_counts(rng):
    rows = harness.sample_simplex_array(4, 500, rng)
    stats = harness.gap_statistics(rows, [0.5, 1.0], 4)
    assert len(stats) == 20
    assert sum(s.count for s in stats if s.alpha == 0.5) == 500
    assert all(s.min_slack >= -1e-10 for s in stats if s.count)


# ---------- balayages ----------

def test_polygonal_sweep_passes():
    verdict = harness.run_polygonal_sweep(SweepConfig(n=5, alphas=[0.0, 0.5, 1.0, 2.0], samples=3000, seed=1))
    assert verdict.status == "PASS"
    assert verdict.kind == "polygonal"
    assert verdict.checks > 3 * 3000
    assert verdict.min_slack >= -1e-10
    assert len(verdict.gaps) == 4 * harness.DECILES
    assert verdict.failures == []


def test_polygonal_sweep_independent_of_threads():
    config = SweepConfig(n=4, alphas=[0.5, 1.5], samples=harness.CHUNK_SIZE + 500, seed=7)
    one = harness.run_polygonal_sweep(config, threads=1)
    two = harness.run_polygonal_sweep(config, threads=2)
    assert one.min_slack == two.min_slack
    assert one.checks == two.checks
    assert [g.mean_slack for g in one.gaps] == [g.mean_slack for g in two.gaps]


def test_polygonal_sweep_reports_failure(monkeypatch):
    original = bounds.polygonal_tsallis_values
    monkeypatch.setattr(
        harness.bounds, "polygonal_tsallis_values", lambda xs, alpha, n: original(xs, alpha, n) + 1.0
    )
    verdict = harness.run_polygonal_sweep(SweepConfig(n=3, alphas=[1.0], samples=200, seed=2))
    assert verdict.status == "FAIL"
    assert verdict.failures
    assert verdict.worst.slack < 0.0


@pytest.mark.parametrize("n", [2, 5])
def test_thm1_sweep_passes(n):
    verdict = harness.run_thm1_sweep(SweepConfig(n=n, samples=2000, seed=4))
    assert verdict.status == "PASS"
    assert verdict.kind == "thm1"
    assert "collapse" not in " ".join(verdict.failures)


@pytest.mark.parametrize("seed", [42, 1, 7])
@pytest.mark.parametrize("n", range(2, 9))
def test_thm1_sweep_passes_at_breakpoints(n, seed):
    # les lignes injectées contiennent les uniformes U_k, posés sur les points de rupture
    verdict = harness.run_thm1_sweep(SweepConfig(n=n, samples=200, seed=seed))
    assert verdict.status == "PASS", verdict.failures
    assert verdict.min_slack >= -1e-12


def test_thm1_tally_exact_on_uniform_rows():
    n = 8
    uniforms = np.zeros((n, n))
    for k in range(1, n + 1):
        uniforms[k - 1, :k] = 1.0 / k
    tally = harness._thm1_tally(uniforms, n)
    assert tally.worst["lower"].slack >= -1e-15
    assert tally.worst["upper"].slack >= -1e-15


def test_quantum_sweep_passes():
    verdict = harness.run_quantum_sweep(QuantumSweepConfig(dims=[2], alphas=[0.5, 1.0, 2.0], states=15, seed=5))
    assert verdict.status == "PASS"
    assert verdict.samples == 30
    assert verdict.reports
    assert verdict.min_slack >= -1e-9


def test_builtin_catalogue_names():
    names = [name for name, _ in harness.builtin_catalogue(2)]
    assert names[:3] == ["mub-M1", "mub-M2", "mub-M3"]
    assert "sic" in names
    assert sum(n.startswith("gsic-") for n in names) == 5


# ---------- diagrammes ----------

def test_emit_entropy_diagram():
    config = SweepConfig(n=4, alphas=[0.8], samples=100, seed=3, grid=20)
    points = harness.emit_diagram("entropy", config)
    tags = [p.tag for p in points]
    assert tags.count("sample") == 100
    assert tags.count("boundary-lower") == 20
    assert tags.count("breakpoint") == 4
    for p in points:
        assert p.alpha == 0.8
        assert p.polygonal_bound >= p.smooth_bound - 1e-12
        if p.tag == "sample":
            assert p.value >= p.polygonal_bound - 1e-10


def test_emit_maxp_diagram():
    config = SweepConfig(n=3, samples=50, seed=3, grid=10)
    points = harness.emit_diagram("maxp", config)
    tags = [p.tag for p in points]
    assert tags.count("boundary-upper") == 10
    for p in points:
        assert p.lower <= p.upper + 1e-12
        if p.tag == "sample":
            assert p.lower - 1e-10 <= p.value <= p.upper + 1e-10


def test_emit_diagram_reproducible_and_kind_checked():
    config = SweepConfig(n=3, alphas=[1.0], samples=30, seed=9, grid=5)
    assert harness.emit_diagram("entropy", config) == harness.emit_diagram("entropy", config)
    with pytest.raises(DomainError):
        harness.emit_diagram("volume", config)
