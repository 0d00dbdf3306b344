import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latenthealth import baselines, health
from latenthealth.errors import ContaminationError, DataError, ShapeError
from latenthealth.vae import TrainConfig


def _blobs(rng, n=50):
    a = rng.normal(0.0, 0.1, size=(n, 3))
    b = rng.normal(0.0, 0.1, size=(n, 3)) + [5.0, 0, 0]
    return np.vstack([a, b]), np.array(["normal"] * n + ["degraded"] * n)


def test_knn_examples(rng):
    X, y = _blobs(rng)
    m = baselines.knn_fit(X, y, k=1)
    assert baselines.knn_classify(m, X[0]) == "normal"
    far = X.mean(axis=0) + [0, 100.0, 0]
    assert baselines.knn_classify(m, far) == "severe"

    ref = np.array([[0.0, 0], [1.0, 0], [0, 1.0], [10.0, 10.0]])
    m3 = baselines.KnnModel(ref, np.array(["normal", "degraded", "degraded", "normal"]), 3, 5.0)
    assert baselines.knn_classify(m3, [0.1, 0.1]) == "degraded"
    tie = baselines.KnnModel(ref[:2], np.array(["normal", "degraded"]), 2, 5.0)
    assert baselines.knn_classify(tie, [0.5, 0]) == "degraded"


def test_knn_scores_match_brute_force(rng):
    X, y = _blobs(rng, 20)
    q = rng.normal(size=(6, 3)) * 3
    for metric in health.METRICS:
        m = baselines.knn_fit(X, y, 4, metric)
        scores, _ = baselines.knn_scores(m, q)
        for qi, s in zip(q, scores):
            d = sorted(float(health.distance(qi, x, metric)) for x in X)
            assert s == pytest.approx(np.mean(d[:4]), rel=1e-12)


def test_knn_errors(rng):
    with pytest.raises(DataError):
        baselines.knn_fit(np.zeros((1, 3)), ["normal"])
    m = baselines.knn_fit(*_blobs(rng, 5))
    with pytest.raises(ShapeError):
        baselines.knn_predict(m, np.zeros((1, 4)))


def test_kmeans_blobs_and_determinism(rng):
    X, y = _blobs(rng)
    m = baselines.kmeans_fit(X, 2, seed=1, labels=y)
    order = np.argsort(m.centroids[:, 0])
    assert np.allclose(m.centroids[order[0]], X[:50].mean(axis=0), atol=0.1)
    assert np.allclose(m.centroids[order[1]], X[50:].mean(axis=0), atol=0.1)
    assert [m.cluster_labels[i] for i in order] == ["normal", "degraded"]
    m2 = baselines.kmeans_fit(X, 2, seed=1, labels=y)
    assert np.array_equal(m.centroids, m2.centroids)


def test_kmeans_single_cluster_is_mean(rng):
    X = rng.normal(size=(30, 4))
    assert np.allclose(baselines.kmeans_fit(X, 1).centroids[0], X.mean(axis=0))


def test_kmeans_predict_rules():
    m = baselines.KmeansModel(np.array([[0.0, 0], [2.0, 0]]), ["normal", "degraded"], 1.5)
    assert baselines.kmeans_classify(m, [2.0, 0]) == "degraded"
    assert baselines.kmeans_classify(m, [1.0, 0]) == "normal"  # equidistant: lower index wins
    assert baselines.kmeans_classify(m, [1.0, 10.0]) == "severe"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_kmeans_wcss_non_increasing(seed, k):
    X = np.random.default_rng(seed).normal(size=(40, 3))
    hist = baselines.kmeans_fit(X, k, seed=seed).wcss_history
    assert all(b <= a * (1 + 1e-12) for a, b in zip(hist, hist[1:]))


def test_kmeans_errors(rng):
    with pytest.raises(ValueError):
        baselines.kmeans_fit(rng.normal(size=(2, 3)), 3)


def test_vanilla_ae(synth_ds):
    wins = synth_ds.normalized(synth_ds.train)
    cfg = TrainConfig(epochs=30, seed=2)
    p, h = baselines.ae_train(wins, cfg)
    assert h.total[-1] < h.total[0]
    p2, h2 = baselines.ae_train(wins, cfg)
    assert h.total == h2.total
    X = np.stack([w.values for w in wins])
    assert baselines.ae_embed(p, X).shape == (len(X), 5)
    assert baselines.ae_reconstruct(p, X).shape == X.shape
    ref = baselines.ae_reference(p, X[:10])
    hi = baselines.ae_health_index(p, X[:3], ref)
    assert hi.shape == (3,) and np.all(hi >= 0)
    with pytest.raises(ContaminationError):
        baselines.ae_train(synth_ds.test, cfg)
