"""Glue between data, model and scoring: datasets with frozen splits and fitted monitors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import data, health, vae
from .data import LabelPlan, NormStats, RawRecording, SignalWindow
from .errors import DataError


@dataclass
class Dataset:
    """Raw (un-normalized) labeled windows split into train and test.

    ``test`` holds the held-out share of normal/degraded windows plus every
    severe window; severe windows never enter ``train``.
    """

    train: list
    test: list
    norm: NormStats

    def __post_init__(self):
        self.fingerprint = data.split_fingerprint(self.train, self.test)

    def train_class(self, label: str) -> list:
        return [w for w in self.train if w.label == label]

    def normalized(self, windows: Sequence[SignalWindow]) -> list:
        return data.normalize(windows, self.norm)

    def test_matrix(self) -> np.ndarray:
        return data.stack(self.test)

    def test_truth(self) -> list:
        return [w.label for w in self.test]


def fit_norm(train: Sequence[SignalWindow]) -> NormStats:
    """Normalization statistics from the normal-condition training windows."""
    normal = [w for w in train if w.label == "normal"]
    return NormStats.fit(normal or list(train))


def dataset_from_windows(seen: Sequence[SignalWindow], unseen: Sequence[SignalWindow] = (),
                         train_fraction: float = 0.75, seed: int = 0) -> Dataset:
    """Shuffle/split the normal+degraded windows and append the unseen severe windows to test."""
    bad = {w.label for w in seen} - {"normal", "degraded"}
    if bad:
        raise DataError(f"seen windows must be normal or degraded, found {sorted(bad)}")
    train, test = data.shuffle_split(list(seen), train_fraction, seed)
    if not any(w.label == "normal" for w in train) or not any(w.label == "degraded" for w in train):
        raise DataError("training split needs both normal and degraded windows")
    return Dataset(train, test + list(unseen), fit_norm(train))


def dataset_from_recordings(train_recs: Sequence[RawRecording], severe_recs: Sequence[RawRecording],
                            plan: LabelPlan, train_fraction: float = 0.75, seed: int = 0,
                            window: int = data.WINDOW) -> Dataset:
    seen, unseen = [], []
    for rec in train_recs:
        seen.extend(data.label_windows(data.segment(rec, plan.channel, window), plan))
    for rec in severe_recs:
        unseen.extend(data.label_windows(data.segment(rec, plan.channel, window), plan))
    seen = [w for w in seen if w.label in ("normal", "degraded")]
    if any(w.label != "severe" for w in unseen):
        raise DataError("severe recordings fall outside the severe label range")
    if not seen:
        raise DataError("no normal or degraded windows in the training files")
    return dataset_from_windows(seen, unseen, train_fraction, seed)


def train_vae(ds: Dataset, config: vae.TrainConfig, arch: vae.VaeArch | None = None):
    return vae.train(ds.normalized(ds.train), config, arch)


def fit_monitor(params: vae.VaeParams, ds: Dataset, metric: str = "euclidean") -> health.Monitor:
    return health.build_monitor(params, ds.norm, ds.normalized(ds.train_class("normal")),
                                ds.normalized(ds.train_class("degraded")), metric)


def synthetic_dataset(n_per_class: int = 200, seed=0, train_fraction: float = 0.75) -> Dataset:
    """Synthetic normal/degraded windows split 75/25, plus ``n_per_class`` severe test windows."""
    seen = (data.synth_generate("normal", n_per_class, [seed, 1])
            + data.synth_generate("degraded", n_per_class, [seed, 2]))
    unseen = data.synth_generate("severe", n_per_class, [seed, 3])
    return dataset_from_windows(seen, unseen, train_fraction, seed)
