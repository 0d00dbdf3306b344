"""Latent-distance health index, threshold fitting and three-way condition classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .data import (CONDITIONS, WINDOW, NormStats, RawRecording, SignalWindow, label_windows,
                   normalize, segment, stack)
from .errors import DataError, DegenerateThresholdError, ShapeError
from .vae import VaeParams, encode

METRICS = ("euclidean", "manhattan", "minkowski3")
CLASS_ORDER = {name: i for i, name in enumerate(CONDITIONS)}


def distance(p, q, metric: str = "euclidean"):
    """Distance between ``p`` and ``q`` along the last axis (broadcasts over leading axes)."""
    p, q = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
    if p.shape[-1] != q.shape[-1]:
        raise ShapeError(f"dimension mismatch: {p.shape[-1]} vs {q.shape[-1]}")
    d = np.abs(q - p)
    if metric == "euclidean":
        return np.sqrt(np.sum(d * d, axis=-1))
    if metric == "manhattan":
        return np.sum(d, axis=-1)
    if metric == "minkowski3":
        return np.cbrt(np.sum(d**3, axis=-1))
    raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")


@dataclass(frozen=True)
class ReferenceMean:
    mu_ref: np.ndarray


def reference_mean(mus) -> ReferenceMean:
    """Mean of the encoded latent means of normal training windows.

    Accepts a list of ``LatentCode`` or an (n, latent) array of means.
    """
    if len(mus) == 0:
        raise DataError("reference mean needs at least one normal code")
    if hasattr(mus[0], "mu"):
        mus = [m.mu for m in mus]
    arr = np.atleast_2d(np.asarray(mus, dtype=np.float64))
    # sort rows first so the sum order, and hence the rounding, ignores input order
    arr = arr[np.lexsort(arr.T[::-1])]
    ref = np.sum(arr, axis=0) / arr.shape[0]
    if not np.all(np.isfinite(ref)):
        raise DataError("non-finite reference mean")
    return ReferenceMean(ref)


@dataclass(frozen=True)
class ThresholdSet:
    t_normal: float
    t_degraded: float
    metric: str = "euclidean"

    def to_dict(self) -> dict:
        return {"t_normal": self.t_normal, "t_degraded": self.t_degraded, "metric": self.metric}


@dataclass(frozen=True)
class HealthRecord:
    file_index: int
    health_index: float
    metric: str
    predicted: str
    truth: str | None = None
    offset: int | None = None


def health_indices(params: VaeParams, windows, ref: ReferenceMean, metric: str = "euclidean"):
    """Health index of each window: distance of its encoded mean from ``ref``."""
    x = windows if isinstance(windows, np.ndarray) else stack(windows)
    if len(x) == 0:
        return np.zeros(0)
    return distance(encode(params, x).mu, ref.mu_ref, metric)


def health_index(params: VaeParams, window: SignalWindow, ref: ReferenceMean,
                 metric: str = "euclidean") -> float:
    values = window.values if isinstance(window, SignalWindow) else window
    return float(distance(encode(params, values).mu, ref.mu_ref, metric))


def thresholds_from_indices(normal_hi, degraded_hi, metric: str = "euclidean") -> ThresholdSet:
    normal_hi, degraded_hi = np.asarray(normal_hi), np.asarray(degraded_hi)
    if normal_hi.size == 0 or degraded_hi.size == 0:
        raise DataError("threshold fitting needs normal and degraded samples")
    t_n, t_d = float(normal_hi.max()), float(degraded_hi.max())
    if t_n > t_d:
        raise DegenerateThresholdError(
            f"normal threshold {t_n:.6g} exceeds degraded threshold {t_d:.6g}; "
            "the embedding does not order the classes")
    return ThresholdSet(t_n, t_d, metric)


def fit_thresholds(params: VaeParams, ref: ReferenceMean, train_normal, train_degraded,
                   metric: str = "euclidean") -> ThresholdSet:
    """Thresholds are the largest training health index of each seen class."""
    return thresholds_from_indices(health_indices(params, train_normal, ref, metric),
                                   health_indices(params, train_degraded, ref, metric), metric)


def classify(hi: float, thresholds: ThresholdSet) -> str:
    if hi <= thresholds.t_normal:
        return "normal"
    if hi <= thresholds.t_degraded:
        return "degraded"
    return "severe"


def classify_many(his, thresholds: ThresholdSet) -> list[str]:
    return [classify(float(h), thresholds) for h in his]


@dataclass
class Monitor:
    """A trained condition monitor: encoder parameters plus normalization, reference and thresholds."""

    params: VaeParams
    norm: NormStats
    ref: ReferenceMean
    thresholds: ThresholdSet

    @property
    def metric(self) -> str:
        return self.thresholds.metric

    def scores(self, raw_windows) -> np.ndarray:
        x = raw_windows if isinstance(raw_windows, np.ndarray) else stack(raw_windows)
        return health_indices(self.params, (x - self.norm.mean) / self.norm.std, self.ref, self.metric)

    def predict(self, raw_windows) -> list[str]:
        return classify_many(self.scores(raw_windows), self.thresholds)


def build_monitor(params: VaeParams, norm: NormStats, train_normal, train_degraded,
                  metric: str = "euclidean") -> Monitor:
    """Reference mean from normalized normal training windows, thresholds from both classes."""
    ref = reference_mean(encode(params, stack(train_normal)).mu)
    th = fit_thresholds(params, ref, train_normal, train_degraded, metric)
    return Monitor(params, norm, ref, th)


def score_run_to_failure(params: VaeParams, ref: ReferenceMean, thresholds: ThresholdSet,
                         all_files: Sequence, channel: int, metric: str | None = None,
                         norm: NormStats | None = None, plan=None, aggregate: str = "mean",
                         per_window: bool = False, window: int = WINDOW) -> list[HealthRecord]:
    """Score every recording in file order.

    ``all_files`` holds :class:`RawRecording` objects or zero-argument callables
    returning one; a loader that raises is recorded as a gap (skipped).
    """
    metric = metric or thresholds.metric
    agg: Callable = {"mean": np.mean, "median": np.median}[aggregate]
    records = []
    for item in all_files:
        try:
            rec = item() if callable(item) else item
            if not isinstance(rec, RawRecording):
                raise DataError("not a recording")
            wins = segment(rec, channel, window)
        except (OSError, ValueError):
            continue
        if not wins:
            continue
        if plan is not None:
            wins = label_windows(wins, plan)
        if norm is not None:
            wins = normalize(wins, norm)
        his = health_indices(params, wins, ref, metric)
        truth = wins[0].label if plan is not None else None
        if per_window:
            records.extend(HealthRecord(w.file_index, float(h), metric, classify(float(h), thresholds),
                                        truth, w.offset) for w, h in zip(wins, his))
        else:
            hi = float(agg(his))
            records.append(HealthRecord(rec.file_index, hi, metric, classify(hi, thresholds), truth))
    return records


def moving_average(values, width: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if width < 1 or len(values) < width:
        return np.zeros(0)
    c = np.cumsum(np.concatenate([[0.0], values]))
    return (c[width:] - c[:-width]) / width
