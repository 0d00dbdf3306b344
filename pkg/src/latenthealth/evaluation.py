"""Metrics, noise sweeps, method comparison and CSV/SVG report emission."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import baselines, data, health
from .data import CONDITIONS, SignalWindow
from .errors import DataError
from .health import HealthRecord
from .pipeline import Dataset, fit_monitor, train_vae
from .vae import TrainConfig

CLASS_INDEX = {name: i for i, name in enumerate(CONDITIONS)}


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # [truth][predicted] over (normal, degraded, severe)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict
    unseen_class_accuracy: float
    micro_precision: float = 0.0
    micro_recall: float = 0.0
    micro_f1: float = 0.0

    def headline(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision, "recall": self.recall,
                "f1": self.f1, "unseen_class_accuracy": self.unseen_class_accuracy}


def confusion(records: Iterable) -> ConfusionMatrix:
    """Count (truth, predicted) pairs; accepts HealthRecords or ``(truth, predicted)`` tuples."""
    cm = np.zeros((3, 3), dtype=np.int64)
    for r in records:
        truth, pred = (r.truth, r.predicted) if hasattr(r, "predicted") else r
        if truth is None or truth not in CLASS_INDEX:
            raise DataError(f"record without a usable truth label: {truth!r}")
        cm[CLASS_INDEX[truth], CLASS_INDEX[pred]] += 1
    return ConfusionMatrix(cm)


def _ratio(num: float, den: float) -> float:
    return float(num / den) if den > 0 else 0.0


def metrics(cm: ConfusionMatrix) -> MetricReport:
    c = np.asarray(cm.counts, dtype=np.float64)
    total = c.sum()
    if total <= 0:
        raise DataError("empty confusion matrix")
    tp = np.diag(c)
    per_class = {}
    for i, name in enumerate(CONDITIONS):
        p = _ratio(tp[i], c[:, i].sum())
        r = _ratio(tp[i], c[i, :].sum())
        per_class[name] = {"precision": p, "recall": r, "f1": _ratio(2 * p * r, p + r)}
    macro = {k: float(np.mean([per_class[n][k] for n in CONDITIONS])) for k in ("precision", "recall", "f1")}
    acc = float(tp.sum() / total)
    # single-label multiclass: micro precision = micro recall = accuracy
    return MetricReport(acc, macro["precision"], macro["recall"], macro["f1"], per_class,
                        per_class["severe"]["recall"], acc, acc, acc)


def report_from_labels(truth: Sequence[str], predicted: Sequence[str]) -> MetricReport:
    return metrics(confusion(zip(truth, predicted)))


# ---------------------------------------------------------------------------
# noise robustness
# ---------------------------------------------------------------------------

DEFAULT_SNRS = (-2.0, 1.0, 4.0, 7.0, 10.0)


def noise_sweep(scorer: Callable, windows: Sequence[SignalWindow] | np.ndarray, truth: Sequence[str],
                snr_list: Sequence[float] = DEFAULT_SNRS, seed=0) -> list[tuple[float, MetricReport]]:
    """Metrics on clean windows (reported as SNR = inf) and at each SNR.

    ``scorer`` maps an (n, 256) raw window matrix to predicted labels. Each
    window gets its own noise stream spawned from ``(seed, snr index)``.
    """
    if len(snr_list) == 0:
        raise ValueError("snr_list must not be empty")
    X = windows if isinstance(windows, np.ndarray) else data.stack(windows)
    out = [(math.inf, report_from_labels(truth, scorer(X)))]
    for k, snr in enumerate(snr_list):
        streams = np.random.SeedSequence([int(seed), k]).spawn(len(X))
        noisy = np.stack([data.awgn(x, snr, np.random.default_rng(s)) for x, s in zip(X, streams)])
        out.append((float(snr), report_from_labels(truth, scorer(noisy))))
    return out


# ---------------------------------------------------------------------------
# method comparison
# ---------------------------------------------------------------------------

METHODS = ("vae", "knn", "kmeans", "vanilla_ae")


@dataclass
class FittedMethod:
    name: str
    fingerprint: str
    predict: Callable  # raw (n, 256) -> labels
    score: Callable | None = None  # raw (n, 256) -> distance used for the decision


@dataclass
class CompareConfig:
    vae: TrainConfig = field(default_factory=TrainConfig)
    ae: TrainConfig | None = None
    knn_k: int = 5
    kmeans_k: int = 2
    metric: str = "euclidean"
    seed: int = 0


def fit_methods(ds: Dataset, cfg: CompareConfig, vae_params=None) -> dict[str, FittedMethod]:
    norm = ds.norm
    train_n = ds.normalized(ds.train)
    Xtr = data.stack(train_n)
    ytr = np.array([w.label for w in train_n])
    z = lambda X: (np.asarray(X) - norm.mean) / norm.std

    if vae_params is None:
        vae_params, _ = train_vae(ds, cfg.vae)
    mon = fit_monitor(vae_params, ds, cfg.metric)

    knn = baselines.knn_fit(Xtr, ytr, cfg.knn_k, cfg.metric)
    km = baselines.kmeans_fit(Xtr, cfg.kmeans_k, cfg.seed, labels=ytr, metric=cfg.metric)

    ae_params, _ = baselines.ae_train(train_n, cfg.ae or cfg.vae)
    ae_ref = baselines.ae_reference(ae_params, Xtr[ytr == "normal"])
    ae_th = health.thresholds_from_indices(
        baselines.ae_health_index(ae_params, Xtr[ytr == "normal"], ae_ref, cfg.metric),
        baselines.ae_health_index(ae_params, Xtr[ytr == "degraded"], ae_ref, cfg.metric), cfg.metric)
    ae_score = lambda X: baselines.ae_health_index(ae_params, z(X), ae_ref, cfg.metric)

    fp = ds.fingerprint
    return {
        "vae": FittedMethod("vae", fp, mon.predict, mon.scores),
        "knn": FittedMethod("knn", fp, lambda X: baselines.knn_predict(knn, z(X)),
                            lambda X: baselines.knn_scores(knn, z(X))[0]),
        "kmeans": FittedMethod("kmeans", fp, lambda X: baselines.kmeans_predict(km, z(X)),
                               lambda X: baselines._pairwise(z(X), km.centroids, cfg.metric).min(axis=1)),
        "vanilla_ae": FittedMethod("vanilla_ae", fp,
                                   lambda X: health.classify_many(ae_score(X), ae_th), ae_score),
    }


def compare_methods(ds: Dataset, cfg: CompareConfig = CompareConfig(), fitted=None,
                    vae_params=None) -> dict[str, MetricReport]:
    """One MetricReport per method, all evaluated on ``ds.test``."""
    fitted = fitted or fit_methods(ds, cfg, vae_params)
    prints = {m.fingerprint for m in fitted.values()}
    if prints != {ds.fingerprint}:
        raise DataError("methods were fitted on different train/test splits")
    X, truth = ds.test_matrix(), ds.test_truth()
    return {name: report_from_labels(truth, m.predict(X)) for name, m in fitted.items()}


# ---------------------------------------------------------------------------
# CSV / SVG emission
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) and v > 0 else repr(v)
    return str(v)


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


HEALTH_HEADER = ["file_index", "health_index", "metric", "predicted", "truth"]


def health_csv(records: Sequence[HealthRecord]) -> str:
    if not records:
        raise DataError("no health records to write")
    per_window = any(r.offset is not None for r in records)
    header = HEALTH_HEADER[:1] + (["offset"] if per_window else []) + HEALTH_HEADER[1:]
    rows = ([r.file_index] + ([r.offset] if per_window else [])
            + [float(r.health_index), r.metric, r.predicted, r.truth] for r in records)
    return _csv(header, rows)


def parse_health_csv(text: str) -> list[HealthRecord]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(HealthRecord(int(row["file_index"]), float(row["health_index"]), row["metric"],
                                row["predicted"], row["truth"] or None,
                                int(row["offset"]) if "offset" in row else None))
    return out


def metrics_csv(reports: dict) -> str:
    if not reports:
        raise DataError("no metric reports to write")
    rows = []
    for method, rep in reports.items():
        for name, value in rep.headline().items():
            rows.append([method, name, float(value)])
        for cls, vals in rep.per_class.items():
            for name, value in vals.items():
                rows.append([method, f"{cls}_{name}", float(value)])
    return _csv(["method", "metric_name", "value"], rows)


def sweep_csv(results: Sequence[tuple[float, MetricReport]]) -> str:
    if not results:
        raise DataError("no sweep results to write")
    return _csv(["snr_db", "accuracy", "precision", "recall", "f1"],
                ([float(s), r.accuracy, r.precision, r.recall, r.f1] for s, r in results))


def history_csv(history) -> str:
    return _csv(["epoch", "total", "recon", "kl"],
                ([i + 1, float(t), float(r), float(k)]
                 for i, (t, r, k) in enumerate(zip(history.total, history.recon, history.kl))))


def svg_line_chart(series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
                   hlines: Sequence[float] = (), width: int = 640, height: int = 360) -> str:
    """Minimal static line chart. ``series`` maps a name to ``(xs, ys)``."""
    if not series:
        raise DataError("nothing to plot")
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    xs_all = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()])
    ys_all = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()] +
                            [np.asarray(hlines, dtype=float)])
    xs_all, ys_all = xs_all[np.isfinite(xs_all)], ys_all[np.isfinite(ys_all)]
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(min(ys_all.min(), 0.0)), float(ys_all.max())
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0
    ml, mr, mt, mb = 60, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
           f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
           f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>']
    for t in np.linspace(0, 1, 5):
        xv, yv = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
        out.append(f'<text x="{px(xv):.1f}" y="{mt + ph + 15}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{ml - 5}" y="{py(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2:.1f})">{ylabel}</text>')
    for h in hlines:
        out.append(f'<line x1="{ml}" y1="{py(h):.1f}" x2="{ml + pw}" y2="{py(h):.1f}" '
                   'stroke="gray" stroke-dasharray="4 3"/>')
    for i, (name, (xs, ys)) in enumerate(series.items()):
        pts = [(float(x), float(y)) for x, y in zip(xs, ys) if np.isfinite(x) and np.isfinite(y)]
        color = colors[i % len(colors)]
        path = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{ml + pw - 5}" y="{mt + 14 * (i + 1)}" text-anchor="end" '
                   f'fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def health_svg(records: Sequence[HealthRecord], thresholds=None) -> str:
    xs = [r.file_index for r in records]
    ys = [r.health_index for r in records]
    hl = [] if thresholds is None else [thresholds.t_normal, thresholds.t_degraded]
    return svg_line_chart({"health index": (xs, ys)}, "Health index over the run",
                          "file index", "health index", hl)


def sweep_svg(results: Sequence[tuple[float, MetricReport]]) -> str:
    pts = [(s, r.accuracy) for s, r in results if math.isfinite(s)]
    clean = [r.accuracy for s, r in results if not math.isfinite(s)]
    return svg_line_chart({"accuracy": ([p[0] for p in pts], [p[1] for p in pts])},
                          "Accuracy against SNR", "SNR (dB)", "accuracy", clean)


def emit_report(results, path, format: str = "csv", kind: str | None = None) -> Path:
    """Write ``results`` to ``path``.

    ``kind`` is one of health, metrics, sweep; it is inferred from the result
    type when omitted. ``format`` is ``csv`` or ``svg``.
    """
    if results is None or len(results) == 0:
        raise DataError("nothing to report")
    if kind is None:
        if isinstance(results, dict):
            kind = "metrics"
        elif isinstance(results[0], HealthRecord):
            kind = "health"
        else:
            kind = "sweep"
    writers = {("health", "csv"): health_csv, ("metrics", "csv"): metrics_csv,
               ("sweep", "csv"): sweep_csv, ("health", "svg"): health_svg,
               ("sweep", "svg"): sweep_svg}
    if (kind, format) not in writers:
        raise ValueError(f"cannot write {kind} results as {format}")
    path = Path(path)
    path.write_text(writers[(kind, format)](results))
    return path
