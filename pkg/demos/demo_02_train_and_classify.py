"""
Zero-shot condition classification
==================================

Train the beta-VAE on normal and degraded windows only, then classify a
held-out set that also contains severe windows the model never saw.
"""

import numpy as np

from latenthealth import evaluation, pipeline
from latenthealth.vae import TrainConfig

ds = pipeline.synthetic_dataset(n_per_class=200, seed=0)
print(f"train {len(ds.train)} windows, test {len(ds.test)} (severe only in test)")

# 100 epochs is enough on the synthetic set; 500 is the default
params, history = pipeline.train_vae(ds, TrainConfig(epochs=100, seed=0))
print(f"loss {history.total[0]:.1f} -> {history.total[-1]:.1f}, KL {history.kl[-1]:.2f}")

###############################################################################
# Reference mean and thresholds come from the training windows alone

monitor = pipeline.fit_monitor(params, ds, "euclidean")
th = monitor.thresholds
print(f"t_normal {th.t_normal:.3f}  t_degraded {th.t_degraded:.3f}")

X, truth = ds.test_matrix(), ds.test_truth()
hi = monitor.scores(X)
for cond in ("normal", "degraded", "severe"):
    sel = np.array(truth) == cond
    print(f"{cond:>9}: mean HI {hi[sel].mean():.3f}")

report = evaluation.report_from_labels(truth, monitor.predict(X))
print(evaluation.confusion(zip(truth, monitor.predict(X))).counts)
print({k: round(v, 4) for k, v in report.headline().items()})

###############################################################################
# The three distance metrics, each with its own fitted thresholds

for metric in ("euclidean", "manhattan", "minkowski3"):
    mon = pipeline.fit_monitor(params, ds, metric)
    rep = evaluation.report_from_labels(truth, mon.predict(X))
    print(f"{metric:>10}: accuracy {rep.accuracy:.4f}  macro-F1 {rep.f1:.4f}")
