import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unitary
from rmtlab import stats
from rmtlab.ensembles import RngStream, gue_sample, hurwitz_sample
from rmtlab.errors import EmptySample, MissingReferenceKind
from rmtlab.qcore import SpectralData, spectral_decomposition

RNG = RngStream(161803)


def test_element_amplitudes_identity():
    x = stats.element_amplitudes(np.eye(4))
    assert np.array_equal(x.samples, [0] * 12 + [4] * 4)


def test_element_amplitudes_mean_one_for_unitary():
    U = random_unitary(32, 1)
    assert stats.element_amplitudes(U).mean() == pytest.approx(1.0, abs=1e-12)


def test_eigenvector_amplitudes_identity_basis():
    spec = SpectralData(np.zeros(4), np.eye(4, dtype=complex))
    y = stats.eigenvector_amplitudes(spec)
    assert np.array_equal(y.samples, [0] * 12 + [4] * 4)


def test_gue_eigenvector_amplitudes_exponential():
    H = gue_sample(256, RNG.substream("gue-ev"))
    _, vecs = np.linalg.eigh(H)
    y = stats.eigenvector_amplitudes(SpectralData(np.zeros(256), vecs))
    assert stats.ks_distance(y, stats.exponential_cdf) < 0.015


def test_spacings_equally_spaced():
    phases = 2 * np.pi * np.arange(8) / 8
    s = stats.eigenphase_spacings(SpectralData(phases, np.eye(8, dtype=complex)))
    assert np.allclose(s.samples, 1.0)


def test_spacings_degenerate_wrap():
    s = stats.eigenphase_spacings(SpectralData(np.zeros(8), np.eye(8, dtype=complex)))
    assert np.array_equal(s.samples, [0] * 7 + [8])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 4, 8, 16]))
def test_spacing_mean_exactly_one(seed, N):
    spec = spectral_decomposition(random_unitary(N, seed))
    assert stats.eigenphase_spacings(spec).mean() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 4, 8, 16]))
def test_element_mean_exactly_one(seed, N):
    U = random_unitary(N, seed)
    assert stats.element_amplitudes(U).mean() == pytest.approx(1.0, abs=1e-12)


def test_ks_self_distance_zero():
    d = stats.EmpiricalDistribution.from_samples([0.1, 0.4, 0.9])
    assert stats.ks_distance(d, d) == 0


def test_ks_point_mass():
    d = stats.EmpiricalDistribution.from_samples([0.5] * 100)
    assert stats.ks_distance(d, lambda x: (np.asarray(x) >= 0.5).astype(float)) == 0


def test_ks_empty_raises():
    with pytest.raises(EmptySample):
        stats.ks_distance(stats.EmpiricalDistribution.from_samples([]), stats.exponential_cdf)


def test_ks_poisson_samples_vs_surmise_cdf():
    """Sampled distance matches the analytic sup-norm between the two CDFs."""
    g = RNG.substream("ks-oracle").generator()
    samples = stats.EmpiricalDistribution.from_samples(g.exponential(size=200_000))
    measured = stats.ks_distance(samples, stats.wigner_surmise_cdf)
    grid = np.linspace(0, 10, 200_001)
    analytic = np.max(np.abs((1 - np.exp(-grid)) - stats.wigner_surmise_cdf(grid)))
    assert measured == pytest.approx(analytic, abs=0.02)


def test_ks_two_sample_symmetric_and_triangle():
    g = RNG.substream("ks-prop").generator()
    a = stats.EmpiricalDistribution.from_samples(g.exponential(size=500))
    b = stats.EmpiricalDistribution.from_samples(g.exponential(size=700))
    c = stats.EmpiricalDistribution.from_samples(g.uniform(size=600))
    assert stats.ks_distance(a, b) == pytest.approx(stats.ks_distance(b, a), abs=1e-12)
    assert stats.ks_distance(a, c) <= stats.ks_distance(a, b) + stats.ks_distance(b, c) + 1e-9


def test_histogram_density_integrates_to_one():
    d = stats.EmpiricalDistribution.from_samples(RNG.substream("h").generator().exponential(size=5000))
    edges, density = d.histogram(range_=stats.AMPLITUDE_RANGE)
    assert np.sum(density * np.diff(edges)) == pytest.approx(1.0, abs=1e-9)


def test_thinned_preserves_ecdf():
    d = stats.EmpiricalDistribution.from_samples(
        RNG.substream("thin").generator().exponential(size=100_000)
    )
    t = d.thinned(1000)
    assert t.size == 1000
    assert stats.ks_distance(d, t) < 0.002


@pytest.fixture(scope="module")
def small_library():
    # coarse grid at N=32 keeps the build fast for unit tests
    return stats.build_reference_library(
        32, [0.0, 0.25, 0.5, 0.75, 1.0], 40, RNG.substream("small-lib")
    )


def test_library_grid_endpoints(small_library):
    assert small_library.delta_grid[0] == 0.0
    assert small_library.delta_grid[-1] == 1.0
    sp0 = small_library.spacing_refs[0]
    assert stats.ks_distance(sp0, stats.poisson_spacing_cdf) < 0.05
    ev1 = small_library.eigenvector_refs[-1]
    assert stats.ks_distance(ev1, stats.exponential_cdf) < 0.05


def test_library_roundtrip_bit_exact(tmp_path, small_library):
    path = tmp_path / "lib.rmtref"
    small_library.save(path)
    loaded = stats.ReferenceLibrary.load(path)
    assert np.array_equal(loaded.delta_grid, small_library.delta_grid)
    assert loaded.metadata == small_library.metadata
    for a, b in zip(loaded.eigenvector_refs, small_library.eigenvector_refs):
        assert np.array_equal(a.samples, b.samples)
    for a, b in zip(loaded.spacing_refs, small_library.spacing_refs):
        assert np.array_equal(a.samples, b.samples)
    assert (tmp_path / "lib.rmtref.json").exists()


def test_delta_fit_endpoints_small(small_library):
    rng = RNG.substream("fit-small")
    cue = stats.pooled(
        [stats.element_amplitudes(hurwitz_sample(32, 1.0, rng.substream("c", k))) for k in range(40)]
    )
    fit = stats.delta_fit(cue, small_library, stats.EIGENVECTOR_AMPLITUDE)
    assert fit.best_delta >= 0.75
    cpe = stats.pooled(
        [
            stats.eigenphase_spacings(
                spectral_decomposition(hurwitz_sample(32, 0.0, rng.substream("p", k)))
            )
            for k in range(40)
        ]
    )
    fit = stats.delta_fit(cpe, small_library, stats.EIGENPHASE_SPACING)
    assert fit.best_delta == 0.0


def test_delta_fit_errors(small_library):
    with pytest.raises(EmptySample):
        stats.delta_fit(stats.EmpiricalDistribution.from_samples([]), small_library)
    with pytest.raises(MissingReferenceKind):
        stats.delta_fit(
            stats.EmpiricalDistribution.from_samples([1.0]), small_library, "bogus"
        )


def test_delta_fit_tie_breaks_toward_larger_delta():
    ref = stats.EmpiricalDistribution.from_samples([1.0, 2.0])
    lib = stats.ReferenceLibrary(
        np.array([0.2, 0.8]), [ref, ref], [ref, ref], {}
    )
    fit = stats.delta_fit(ref, lib, stats.EIGENVECTOR_AMPLITUDE)
    assert fit.best_delta == 0.8
    assert fit.distance == 0.0
