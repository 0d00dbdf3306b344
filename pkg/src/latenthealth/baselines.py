"""Comparison methods sharing the normal-reference + distance + threshold scheme.

KNN and K-means work directly on normalized 256-point windows. The vanilla
autoencoder has the VAE's layer ladder with a deterministic 5-unit bottleneck.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from . import nn
from .data import SignalWindow, stack
from .errors import DataError, ShapeError
from .health import ReferenceMean, distance, reference_mean
from .vae import TrainConfig, TrainHistory, VaeArch, check_training_labels, fit_adam, init_encoder

_CDIST = {"euclidean": ("euclidean", {}), "manhattan": ("cityblock", {}),
          "minkowski3": ("minkowski", {"p": 3})}


def _pairwise(a: np.ndarray, b: np.ndarray, metric: str) -> np.ndarray:
    name, kw = _CDIST[metric]
    return cdist(np.atleast_2d(a), np.atleast_2d(b), name, **kw)


def _majority(labels) -> str:
    n_normal = sum(1 for lab in labels if lab == "normal")
    n_degraded = sum(1 for lab in labels if lab == "degraded")
    return "normal" if n_normal > n_degraded else "degraded"


# ---------------------------------------------------------------------------
# KNN
# ---------------------------------------------------------------------------

@dataclass
class KnnModel:
    reference: np.ndarray
    labels: np.ndarray
    k: int = 5
    severe_threshold: float = np.inf
    metric: str = "euclidean"

    def __post_init__(self):
        self.reference = np.atleast_2d(np.asarray(self.reference, dtype=np.float64))
        self.labels = np.asarray(self.labels)
        if len(self.reference) == 0:
            raise DataError("empty KNN reference set")
        if not 1 <= self.k <= len(self.reference):
            raise ValueError(f"k={self.k} must lie in [1, {len(self.reference)}]")


def knn_fit(points, labels, k: int = 5, metric: str = "euclidean") -> KnnModel:
    """Store the reference set; the severe threshold is the largest leave-one-out
    mean k-NN distance among degraded references."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    labels = np.asarray(labels)
    if len(X) < 2:
        raise DataError("KNN needs at least two reference points")
    k = min(k, len(X) - 1)
    d = _pairwise(X, X, metric)
    np.fill_diagonal(d, np.inf)
    knn_mean = np.sort(d, axis=1)[:, :k].mean(axis=1)
    deg = labels == "degraded"
    threshold = float(knn_mean[deg].max() if deg.any() else knn_mean.max())
    return KnnModel(X, labels, k, threshold, metric)


def knn_scores(model: KnnModel, X) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.reference.shape[1]:
        raise ShapeError(f"feature length {X.shape[1]} != {model.reference.shape[1]}")
    d = _pairwise(X, model.reference, model.metric)
    idx = np.argsort(d, axis=1, kind="stable")[:, :model.k]
    return np.take_along_axis(d, idx, axis=1).mean(axis=1), idx


def knn_predict(model: KnnModel, X) -> list[str]:
    mean_d, idx = knn_scores(model, X)
    return ["severe" if m > model.severe_threshold else _majority(model.labels[row])
            for m, row in zip(mean_d, idx)]


def knn_classify(model: KnnModel, x) -> str:
    return knn_predict(model, np.atleast_2d(x))[0]


# ---------------------------------------------------------------------------
# K-means
# ---------------------------------------------------------------------------

@dataclass
class KmeansModel:
    centroids: np.ndarray
    cluster_labels: list
    severe_threshold: float = np.inf
    metric: str = "euclidean"
    wcss_history: list = field(default_factory=list)


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [X[rng.integers(len(X))]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        i = int(rng.integers(len(X))) if total == 0 else int(rng.choice(len(X), p=d2 / total))
        centers.append(X[i])
        d2 = np.minimum(d2, np.sum((X - X[i]) ** 2, axis=1))
    return np.array(centers)


def kmeans_fit(points, k: int = 2, seed=0, max_iters: int = 100, labels=None,
               metric: str = "euclidean") -> KmeansModel:
    """Lloyd's algorithm from k-means++ seeding.

    Clusters take the majority label of their members (ties go to degraded).
    The severe threshold is the largest distance from a degraded training point
    to its nearest centroid (all points when no labels are given).
    """
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if k < 1 or len(X) < k:
        raise ValueError(f"need 1 <= k <= n_points, got k={k}, n={len(X)}")
    rng = np.random.default_rng(seed)
    C = _kmeans_pp(X, k, rng)
    assign = None
    history = []
    for _ in range(max_iters):
        d2 = cdist(X, C, "sqeuclidean")
        new = np.argmin(d2, axis=1)
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        for j in range(k):
            members = X[assign == j]
            if len(members):
                C[j] = members.mean(axis=0)
            else:
                far = int(np.argmax(d2[np.arange(len(X)), assign]))
                C[j] = X[far]
                assign[far] = j
        history.append(float(np.sum((X - C[assign]) ** 2)))

    assign = np.argmin(cdist(X, C, "sqeuclidean"), axis=1)
    if labels is None:
        cluster_labels = ["unlabeled"] * k
        ref_mask = np.ones(len(X), dtype=bool)
    else:
        labels = np.asarray(labels)
        cluster_labels = [_majority(labels[assign == j]) for j in range(k)]
        ref_mask = labels == "degraded"
        if not ref_mask.any():
            ref_mask = np.ones(len(X), dtype=bool)
    nearest = _pairwise(X[ref_mask], C, metric).min(axis=1)
    return KmeansModel(C, cluster_labels, float(nearest.max()), metric, history)


def kmeans_predict(model: KmeansModel, X) -> list[str]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.centroids.shape[1]:
        raise ShapeError(f"feature length {X.shape[1]} != {model.centroids.shape[1]}")
    d = _pairwise(X, model.centroids, model.metric)
    j = np.argmin(d, axis=1)  # ties resolve to the lower centroid index
    dmin = d[np.arange(len(X)), j]
    return ["severe" if dm > model.severe_threshold else model.cluster_labels[c]
            for dm, c in zip(dmin, j)]


def kmeans_classify(model: KmeansModel, x) -> str:
    return kmeans_predict(model, np.atleast_2d(x))[0]


# ---------------------------------------------------------------------------
# vanilla autoencoder
# ---------------------------------------------------------------------------

@dataclass
class VanillaAeParams:
    arch: VaeArch
    encoder: list  # trunk layers then a linear bottleneck layer
    decoder: list

    def arrays(self) -> list[np.ndarray]:
        return nn.flatten_layers(self.encoder) + nn.flatten_layers(self.decoder)

    @classmethod
    def from_arrays(cls, arch: VaeArch, arrays) -> "VanillaAeParams":
        n_enc = 2 * (len(arch.hidden) + 1)
        return cls(arch, nn.layers_from_flat(arrays[:n_enc]), nn.layers_from_flat(arrays[n_enc:]))


def _ae_encoder_spec(arch: VaeArch) -> nn.MlpSpec:
    sizes = (arch.input_dim,) + arch.hidden + (arch.latent_dim,)
    return nn.MlpSpec(sizes, ("relu",) * len(arch.hidden) + ("identity",))


def ae_embed(params: VanillaAeParams, x) -> np.ndarray:
    """Bottleneck activation (5-D for the default architecture)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.arch.input_dim:
        raise ShapeError(f"window length {x.shape[-1]} != {params.arch.input_dim}")
    return nn.mlp_forward(_ae_encoder_spec(params.arch), params.encoder, x)[-1]


def ae_reconstruct(params: VanillaAeParams, x) -> np.ndarray:
    return nn.mlp_forward(params.arch.decoder_spec, params.decoder, ae_embed(params, x))[-1]


def ae_train(windows: Sequence[SignalWindow], config: TrainConfig = TrainConfig(),
             arch: VaeArch | None = None) -> tuple[VanillaAeParams, TrainHistory]:
    """Adam on the plain reconstruction loss ||x - xhat||^2 / 2 (batch mean)."""
    check_training_labels(windows)
    X = stack(windows)
    arch = arch or VaeArch(input_dim=X.shape[1])
    rng = np.random.default_rng(config.seed)
    enc_spec = _ae_encoder_spec(arch)
    params = VanillaAeParams(arch, init_encoder(enc_spec, rng), nn.init_mlp(arch.decoder_spec, rng))
    n_enc = 2 * enc_spec.n_layers
    history = TrainHistory()

    def grad_fn(arrays, idx, _rng):
        enc = nn.layers_from_flat(arrays[:n_enc])
        dec = nn.layers_from_flat(arrays[n_enc:])
        x = X[idx]
        ea = nn.mlp_forward(enc_spec, enc, x)
        da = nn.mlp_forward(arch.decoder_spec, dec, ea[-1])
        diff = da[-1] - x
        loss = float(np.mean(0.5 * np.sum(diff * diff, axis=1)))
        dg, gz = nn.mlp_backward(arch.decoder_spec, dec, da, diff / len(idx))
        eg, _ = nn.mlp_backward(enc_spec, enc, ea, gz)
        grads = [g for pair in eg + dg for g in pair]
        return (loss, loss, 0.0), grads

    def record(epoch, means):
        history.total.append(float(means[0]))
        history.recon.append(float(means[1]))
        history.kl.append(0.0)

    arrays = fit_adam(params.arrays(), grad_fn, len(X), config, record)
    return VanillaAeParams.from_arrays(arch, arrays), history


def ae_reference(params: VanillaAeParams, normal_windows) -> ReferenceMean:
    x = normal_windows if isinstance(normal_windows, np.ndarray) else stack(normal_windows)
    return reference_mean(ae_embed(params, x))


def ae_health_index(params: VanillaAeParams, window, ref: ReferenceMean, metric: str = "euclidean"):
    values = window.values if isinstance(window, SignalWindow) else window
    return distance(ae_embed(params, values), ref.mu_ref, metric)
