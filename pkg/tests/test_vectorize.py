import math

import numpy as np
import pytest
from oracles import loop_histogram, random_diagram
from scipy.stats import multivariate_normal

from phkit.complexes import rips_filtration
from phkit.geometry import ShapeSpec, distance_matrix, generate_shape
from phkit.persistence import PersistenceDiagramSet, diagrams
from phkit.vectorize import (
    BARCODE_STAT_NAMES,
    PCA,
    AlgebraicCoordinates,
    BarcodeStatistics,
    BettiCurve,
    BinnedFeatures,
    BinningSpec,
    Codebook,
    GmmModel,
    Landscape,
    NearZeroVarianceScaler,
    PersistenceBoW,
    PersistenceFisherVector,
    PersistenceImager,
    PersistenceVLAD,
    SignatureLayer,
    SignatureUnit,
    TropicalCoordinates,
    algebraic_coordinates,
    barcode_statistics,
    binned_feature_names,
    binned_features,
    fit_codebook,
    fit_gmm,
    kmeans,
    pbow,
    pca,
    pfv_points,
    preprocess,
    pvlad,
    signature_layer,
    structure_element,
    tropical_coordinates,
)

SQ3 = math.sqrt(3)


@pytest.fixture
def hexagon_diagram(hexagon):
    return diagrams(rips_filtration(distance_matrix(hexagon), max_dim=2, max_scale=2), max_dim=2)


def _empty(max_dim=2):
    return PersistenceDiagramSet([[] for _ in range(max_dim + 1)])


def _blobs(rng, n=40):
    a = rng.normal([1.0, 1.0], 0.01, size=(n, 2))
    b = rng.normal([5.0, 3.0], 0.01, size=(n, 2))
    return a, b


def _as_diagram(rotated):
    """Diagram in dimension 1 whose rotated points are ``rotated``."""
    r = np.asarray(rotated, dtype=float)
    return PersistenceDiagramSet([[], np.column_stack([r[:, 0], r[:, 0] + r[:, 1]])])


# -- statistics ----------------------------------------------------------------


def test_stat_names_frozen():
    assert len(BARCODE_STAT_NAMES) == 13
    assert BARCODE_STAT_NAMES[8:10] == ("H1_longest_birth", "H1_longest_death")
    assert BARCODE_STAT_NAMES[-1] == "H1_births_in_window"


def test_stats_empty():
    v = barcode_statistics(_empty())
    assert v.shape == (13,) and np.all(v == 0)


def test_stats_hexagon(hexagon_diagram):
    v = dict(zip(BARCODE_STAT_NAMES, barcode_statistics(hexagon_diagram)))
    assert v["H1_len1"] == pytest.approx(SQ3 - 1, abs=1e-12)
    assert v["H1_longest_birth"] == pytest.approx(1.0, abs=1e-12)
    assert v["H1_longest_death"] == pytest.approx(SQ3, abs=1e-12)
    assert v["H1_len2"] == 0


def test_stats_helix_window():
    pc = generate_shape(ShapeSpec("helix", n=40, noise=0.0))
    d = diagrams(rips_filtration(distance_matrix(pc.points), max_dim=2), max_dim=2)
    assert barcode_statistics(d)[-1] >= 1


def test_stats_golden_order():
    d = PersistenceDiagramSet(
        [[(0, 1), (0, 4), (0, 2), (0, 3)], [(1, 2), (5, 9), (4.5, 5)], [(2, 3), (3, 6)]]
    )
    expected = [4, 3, 2, 4, 1, 0.5, 3, 1, 5, 9, 3, 6, 2]
    np.testing.assert_array_equal(barcode_statistics(d), expected)


def test_stats_infinite_cap():
    d = PersistenceDiagramSet([[(0, np.inf)], [], []])
    assert barcode_statistics(d)[0] == 0
    assert barcode_statistics(d, cap=7.0)[0] == 7.0


def test_algebraic_examples():
    assert algebraic_coordinates([[0, 1], [0, 3]])[0] == 0
    c = algebraic_coordinates([[2, 5]])
    assert c[1] == 0 and c[3] == 0
    assert algebraic_coordinates([[0, 1], [1, 3]])[0] == pytest.approx(1.0)


def test_algebraic_direct_formula(rng):
    bars = random_diagram(rng, 6)
    a, d = bars[:, 0], bars[:, 1]
    p = d - a
    m = d.max()
    ref = [np.mean(a * p), np.mean((m - d) * p), np.mean(a**2 * p**4), np.mean((m - d) ** 2 * p**4)]
    np.testing.assert_allclose(algebraic_coordinates(bars), ref, rtol=1e-12)


def test_tropical_examples():
    np.testing.assert_array_equal(tropical_coordinates([[0, 3], [0, 1]]), [3, 4, 4, 4, 4])
    np.testing.assert_array_equal(tropical_coordinates([[0, 4], [1, 4], [0, 2], [5, 6]]), [4, 7, 9, 10, 10])
    np.testing.assert_array_equal(tropical_coordinates(np.zeros((0, 2))), np.zeros(5))


def test_tropical_sort_and_sum_oracle(rng):
    bars = random_diagram(rng, 9)
    p = sorted((b - a for a, b in bars), reverse=True)
    ref = [p[0], p[0] + p[1], sum(p[:3]), sum(p[:4]), sum(p)]
    np.testing.assert_allclose(tropical_coordinates(bars), ref, rtol=1e-12)


# -- binning -------------------------------------------------------------------


def test_binning_hexagon_pl():
    spec = BinningSpec(L=2, bin_width=0.5, kinds=("pl_hist",), dims=(1,))
    v = binned_features(PersistenceDiagramSet([[], [(1.0, SQ3)]]), spec)
    np.testing.assert_array_equal(v, [0, 1, 0, 0])


@pytest.mark.parametrize("width,n", [(0.5, 40), (0.25, 80), (0.1, 200), (1.0, 20)])
def test_binning_9n(width, n):
    spec = BinningSpec(L=20, bin_width=width)
    assert spec.n_bins == n
    assert len(binned_feature_names(spec)) == 9 * n
    v = binned_features(_empty(), spec)
    assert v.shape == (9 * n,) and np.all(v == 0)


def test_binning_histogram_oracle(rng):
    d = PersistenceDiagramSet([random_diagram(rng, 10), random_diagram(rng, 12), random_diagram(rng, 3)])
    spec = BinningSpec(L=12, bin_width=0.75)
    v = binned_features(d, spec).reshape(3, 3, spec.n_bins)
    edges = spec.edges.tolist()
    for k in range(3):
        bars = d[k]
        if k > 0:
            assert v[k, 0].tolist() == loop_histogram(bars[:, 0], edges)
            assert v[k, 1].tolist() == loop_histogram(bars[:, 1], edges)
        else:
            assert np.all(v[k, :2] == 0)
        assert v[k, 2].tolist() == loop_histogram(bars[:, 1] - bars[:, 0], edges)


def test_binning_infinite_capped_at_L():
    spec = BinningSpec(L=4, bin_width=1, kinds=("dt_hist",), dims=(1,))
    v = binned_features(PersistenceDiagramSet([[], [(0.5, np.inf)]]), spec)
    np.testing.assert_array_equal(v, [0, 0, 0, 1])


def test_binning_all_kinds_widths(rng):
    spec = BinningSpec(L=4, bin_width=1, kinds=tuple(reversed(("betti_samples", "pd_grid", "landscape_samples"))))
    d = PersistenceDiagramSet([random_diagram(rng, 3, scale=3)] * 3)
    v = binned_features(d, spec)
    assert len(v) == len(binned_feature_names(spec)) == 3 * (5 + 16 + 3 * 5)
    assert binned_feature_names(spec)[0] == "H0_betti_samples_0"


def test_binning_spec_errors():
    with pytest.raises(ValueError):
        BinningSpec(kinds=("nope",))
    with pytest.raises(ValueError):
        BinningSpec(bin_width=0)


def test_binned_transformer_shapes(rng):
    corpus = [PersistenceDiagramSet([random_diagram(rng, 4)] * 3) for _ in range(3)] + [_empty()]
    X = BinnedFeatures(L=10, bin_width=0.5).fit_transform(corpus)
    assert X.shape == (4, 180)
    Xi = BinnedFeatures(L=10, bin_width=2.5, kinds=("image_pixels",)).fit(corpus).transform(corpus)
    assert Xi.shape == (4, 48)


# -- codebooks -----------------------------------------------------------------


def test_kmeans_one_center_is_mean(rng):
    pts = rng.normal(size=(30, 2))
    c, _ = kmeans(pts, 1)
    np.testing.assert_allclose(c[0], pts.mean(axis=0), atol=1e-12)


def test_codebook_two_blobs(rng):
    a, b = _blobs(rng)
    corpus = [_as_diagram(a), _as_diagram(b)]
    cb = fit_codebook(corpus, 2, seed=0)
    got = sorted(map(tuple, cb.centers))
    ref = sorted([tuple(a.mean(axis=0)), tuple(b.mean(axis=0))])
    np.testing.assert_allclose(got, ref, atol=1e-3)
    assert sorted(pbow(_as_diagram(np.vstack([a, b[:7]])), cb).tolist()) == [7, 40]
    res = pvlad(corpus[0], cb).reshape(2, 2)
    assert np.abs(res).max() < 1e-3 * 40 and np.linalg.norm(res.sum(axis=0)) < 1e-3 * len(a)


def test_codebook_deterministic(rng):
    corpus = [_as_diagram(np.abs(rng.normal(size=(20, 2)))) for _ in range(3)]
    a, b = fit_codebook(corpus, 3, seed=5), fit_codebook(corpus, 3, seed=5)
    np.testing.assert_array_equal(a.centers, b.centers)


def test_pbow_pvlad_empty_and_partition(rng):
    cb = Codebook(np.array([[0.0, 1.0], [3.0, 1.0]]))
    assert np.all(pbow(_empty(1), cb) == 0)
    assert np.all(pvlad(_empty(1), cb) == 0)
    pts = np.abs(rng.normal(size=(17, 2)))
    assert pbow(_as_diagram(pts), cb).sum() == 17


def test_pvlad_single_point_and_mean():
    p = np.array([[2.0, 1.5]])
    np.testing.assert_allclose(pvlad(_as_diagram(p), Codebook(np.array([[1.0, 1.0]]))), [1.0, 0.5])
    pts = np.array([[0.0, 1.0], [2.0, 3.0]])
    np.testing.assert_allclose(pvlad(_as_diagram(pts), Codebook(pts.mean(axis=0, keepdims=True))), 0, atol=1e-15)


def test_weighted_codebook_ramp(rng):
    corpus = [_as_diagram(np.abs(rng.normal(size=(30, 2)))) for _ in range(2)]
    cb = fit_codebook(corpus, 2, weighted=True)
    assert cb.weighted and cb.t2 > cb.t1
    assert pbow(corpus[0], cb).sum() <= 30


def test_codebook_transformers(rng):
    corpus = [_as_diagram(np.abs(rng.normal(size=(12, 2)))) for _ in range(4)]
    assert PersistenceBoW(n_words=3).fit_transform(corpus).shape == (4, 3)
    assert PersistenceVLAD(n_words=3).fit_transform(corpus).shape == (4, 6)
    assert PersistenceFisherVector(n_components=2).fit_transform(corpus).shape == (4, 8)


def test_gmm_ll_non_decreasing(rng):
    pts = np.vstack([rng.normal([1, 1], 0.3, (60, 2)), rng.normal([4, 2], 0.5, (60, 2))])
    g = fit_gmm([_as_diagram(pts)], 2, seed=1)
    ll = np.array(g.log_likelihoods)
    assert len(ll) > 2
    assert np.all(np.diff(ll) >= -1e-8)


def _scipy_ll(pts, weights, means, variances):
    dens = sum(w * multivariate_normal(mu, np.diag(v)).pdf(pts) for w, mu, v in zip(weights, means, variances))
    return float(np.sum(np.log(np.atleast_1d(dens))))


def test_pfv_stationary_single_point():
    p = np.array([[1.0, 2.0]])
    g = GmmModel([1.0], p, [[0.5, 0.5]])
    assert np.all(pfv_points(p, g)[:2] == 0)


def test_pfv_against_finite_differences(rng):
    for trial in range(5):
        m = 3
        w = rng.dirichlet(np.ones(m))
        mu = rng.normal(size=(m, 2)) * 2
        var = rng.uniform(0.5, 2.0, size=(m, 2))
        pts = rng.normal(size=(15, 2)) * 2
        g = GmmModel(w, mu, var)
        grad = pfv_points(pts, g)
        h = 1e-5
        num = []
        for block, arr in (("mu", mu), ("var", var)):
            for i in range(m):
                for j in range(2):
                    up, dn = arr.copy(), arr.copy()
                    up[i, j] += h
                    dn[i, j] -= h
                    if block == "mu":
                        f1, f0 = _scipy_ll(pts, w, up, var), _scipy_ll(pts, w, dn, var)
                    else:
                        f1, f0 = _scipy_ll(pts, w, mu, up), _scipy_ll(pts, w, mu, dn)
                    num.append((f1 - f0) / (2 * h))
        num = np.array(num)
        assert np.linalg.norm(grad - num) / np.linalg.norm(num) < 1e-5


def test_gmm_validation():
    with pytest.raises(ValueError):
        GmmModel([0.5, 0.6], [[0, 0], [1, 1]], [[1, 1], [1, 1]])


# -- signature layer -----------------------------------------------------------


def test_signature_examples():
    u = SignatureUnit((0, 0), (1, 1), 1.0)
    assert structure_element([0.0], [1.0], u)[0] == pytest.approx(math.exp(-1), abs=1e-12)
    assert structure_element([0.0], [0.0], u)[0] == 0.0
    assert signature_layer([[0, 1], [0, 0]], [u])[0] == pytest.approx(math.exp(-1))


def test_signature_continuity_at_nu(rng):
    for _ in range(50):
        nu = rng.uniform(0.05, 3)
        u = SignatureUnit((rng.normal(), abs(rng.normal())), rng.uniform(0.2, 3, 2), nu)
        a = rng.normal()
        lo, hi = structure_element(a, nu - 1e-9, u), structure_element(a, nu + 1e-9, u)
        assert abs(lo - hi) < 1e-6


def test_signature_infinite_needs_cap():
    u = SignatureUnit((0, 0), (1, 1), 1.0)
    with pytest.raises(ValueError):
        signature_layer([[0, np.inf]], [u])
    d = PersistenceDiagramSet([[], [(0, np.inf)]], max_scale=1.0)
    assert signature_layer(d, [u])[0] == pytest.approx(math.exp(-1))


def test_signature_transformer(rng):
    corpus = [PersistenceDiagramSet([[], random_diagram(rng, 5)]) for _ in range(3)]
    assert SignatureLayer(n_units=9).fit_transform(corpus).shape == (3, 9)


# -- functional transformers ---------------------------------------------------


def test_functional_transformers_shape_stability(rng):
    corpus = [PersistenceDiagramSet([[], random_diagram(rng, 5)]), _empty(1)]
    assert BettiCurve(n_samples=11).fit_transform(corpus).shape == (2, 11)
    assert Landscape(levels=2, n_samples=11).fit_transform(corpus).shape == (2, 22)
    assert PersistenceImager(resolution=(4, 5)).fit(corpus).transform(corpus).shape == (2, 20)
    assert BarcodeStatistics().fit_transform([_empty(), _empty()]).shape == (2, 13)
    assert AlgebraicCoordinates().fit_transform(corpus).shape == (2, 4)
    assert TropicalCoordinates().fit_transform(corpus).shape == (2, 5)


# -- preprocessing -------------------------------------------------------------


def test_preprocess_drops_constant_and_standardises(rng):
    X = np.column_stack([rng.normal(size=50), np.full(50, 3.0), rng.uniform(size=50)])
    Z, scaler = preprocess(X)
    assert Z.shape == (50, 2)
    assert scaler.support_.tolist() == [True, False, True]
    assert np.all(np.abs(Z.mean(axis=0)) < 1e-12)
    np.testing.assert_allclose(Z.var(axis=0), 1.0, atol=1e-9)


def test_preprocess_replays_training_stats(rng):
    X = rng.normal(size=(30, 3))
    s = NearZeroVarianceScaler().fit(X)
    Y = rng.normal(size=(5, 3))
    np.testing.assert_allclose(s.transform(Y), (Y - X.mean(axis=0)) / X.std(axis=0))


def test_preprocess_all_constant():
    with pytest.raises(ValueError):
        preprocess(np.ones((5, 3)))


def test_pca_line(rng):
    t = rng.normal(size=(20, 1))
    X = t @ np.array([[1.0, 2.0, -1.0]]) + np.array([3.0, 0.0, 1.0])
    model = PCA(1).fit(X)
    assert np.abs(model.inverse_transform(model.transform(X)) - X).max() < 1e-10


@pytest.mark.parametrize("shape", [(30, 5), (8, 20)])
def test_pca_orthonormal_and_variance(rng, shape):
    X = rng.normal(size=shape)
    k = min(shape[0] - 1, shape[1])
    model = PCA(k).fit(X)
    np.testing.assert_allclose(model.components_ @ model.components_.T, np.eye(k), atol=1e-9)
    assert np.all(np.diff(model.explained_variance_) <= 1e-12)
    total = np.var(X, axis=0, ddof=1).sum()
    assert model.explained_variance_.sum() == pytest.approx(total, abs=1e-9)
    scores, comps = pca(X, k)
    assert scores.shape == (shape[0], k)


def test_pca_range_error(rng):
    with pytest.raises(ValueError):
        PCA(10).fit(rng.normal(size=(5, 20)))
