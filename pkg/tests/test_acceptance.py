"""Acceptance criteria, one test (and one PASS/FAIL line) per criterion.

Tolerances are pinned here and must not be loosened to make a run pass.
"""

import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from latenthealth import cli, data, evaluation, health, pipeline, vae
from latenthealth.data import IMS_SET2_PLAN
from latenthealth.nn import finite_difference_gradient
from latenthealth.vae import LatentCode, TrainConfig, VaeArch

KL_MC_DRAWS = 1_000_000
KL_MC_CODES = 20
KL_MC_REL_TOL = 0.01
DIST_PAIRS = 10_000
DIST_REL_TOL = 1e-12
GRAD_SEEDS = 20
GRAD_REL_TOL = 1e-4
GRAD_TIME_LIMIT_S = 60
E2E_SEEDS = (0, 1, 2)
E2E_PER_CLASS = 200
E2E_EPOCHS = 100
E2E_MIN_ACCURACY = 0.95
E2E_MIN_SEVERE_RECALL = 0.95
E2E_MA_WIDTH = 20
E2E_TIME_LIMIT_S = 600
IMS_MIN_METRIC = 0.98
SWEEP_SNRS = (-2.0, 1.0, 4.0, 7.0, 10.0)
SWEEP_CLEAN_GAP = 0.02
SWEEP_MIN_ACC_AT_MINUS2 = 0.80
COMPARE_SEEDS = (0, 1, 2)
COMPARE_MARGIN = 0.02


# 1. unit oracles -----------------------------------------------------------

def _mc_kl(mu, lv, n, rng):
    # E_q[ln q(z) - ln p(z)] with z ~ q; the 2*pi terms cancel
    std = np.exp(0.5 * lv)
    eps = rng.standard_normal((n, mu.size))
    z = mu + std * eps
    log_q = -0.5 * np.sum(eps**2 + lv, axis=1)
    log_p = -0.5 * np.sum(z**2, axis=1)
    return float(np.mean(log_q - log_p))


def _brute(p, q, metric):
    if metric == "euclidean":
        return math.sqrt(math.fsum((b - a) ** 2 for a, b in zip(p, q)))
    if metric == "manhattan":
        return math.fsum(abs(b - a) for a, b in zip(p, q))
    return math.fsum(abs(b - a) ** 3 for a, b in zip(p, q)) ** (1.0 / 3.0)


def test_criterion_1_unit_oracles(verdict):
    rng = np.random.default_rng(2024)
    worst_kl = 0.0
    for _ in range(KL_MC_CODES):
        mu, lv = rng.normal(0, 1, 5), rng.uniform(-1.5, 1.5, 5)
        exact = float(vae.kl_divergence(LatentCode(mu, lv)))
        worst_kl = max(worst_kl, abs(_mc_kl(mu, lv, KL_MC_DRAWS, rng) - exact) / exact)

    worst_d = 0.0
    P = rng.normal(0, 3, (DIST_PAIRS, 5))
    Q = rng.normal(0, 3, (DIST_PAIRS, 5))
    for metric in health.METRICS:
        fast = health.distance(P, Q, metric)
        for p, q, f in zip(P.tolist(), Q.tolist(), fast):
            ref = _brute(p, q, metric)
            worst_d = max(worst_d, abs(f - ref) / ref)

    ok = worst_kl < KL_MC_REL_TOL and worst_d <= DIST_REL_TOL
    verdict("1 unit oracles", ok, f"KL vs Monte Carlo max rel err {worst_kl:.2e} (< {KL_MC_REL_TOL}); "
            f"distance vs brute force max rel err {worst_d:.2e} (<= {DIST_REL_TOL})")


# 2. gradient check ---------------------------------------------------------

def test_criterion_2_gradient_check(verdict):
    arch = VaeArch(input_dim=6, hidden=(4, 3), latent_dim=2)
    start = time.perf_counter()
    worst = 0.0
    for seed in range(GRAD_SEEDS):
        rng = np.random.default_rng(seed)
        base = vae.init_params(arch, seed).arrays()
        # perturb every parameter (including the zero-initialized ones) away from init
        arrays0 = [a + rng.normal(0, 0.3, a.shape) for a in base]
        x, eps = rng.normal(size=(8, 6)), rng.normal(size=(8, 2))
        loss = lambda arrs: vae.loss_and_grads(vae.VaeParams.from_arrays(arch, arrs), x, eps, 20.0, 1.0)[0]
        _, _, _, grads = vae.loss_and_grads(vae.VaeParams.from_arrays(arch, arrays0), x, eps, 20.0, 1.0)
        numeric = finite_difference_gradient(loss, arrays0, h=1e-6)
        g = np.concatenate([a.ravel() for a in grads])
        n = np.concatenate([a.ravel() for a in numeric])
        worst = max(worst, float(np.max(np.abs(g - n) / np.maximum(np.maximum(np.abs(g), np.abs(n)), 1e-6))))
    elapsed = time.perf_counter() - start
    ok = worst < GRAD_REL_TOL and elapsed < GRAD_TIME_LIMIT_S
    verdict("2 gradient check", ok, f"max rel err {worst:.2e} (< {GRAD_REL_TOL}) over {GRAD_SEEDS} seeds "
            f"in {elapsed:.1f}s (< {GRAD_TIME_LIMIT_S}s)")


# 3. synthetic end-to-end ---------------------------------------------------

def _e2e_run(seed):
    train = (data.synth_generate("normal", E2E_PER_CLASS, [seed, 1])
             + data.synth_generate("degraded", E2E_PER_CLASS, [seed, 2]))
    held_out = (data.synth_generate("normal", E2E_PER_CLASS, [seed, 11])
                + data.synth_generate("degraded", E2E_PER_CLASS, [seed, 12])
                + data.synth_generate("severe", E2E_PER_CLASS, [seed, 13]))
    ds = pipeline.Dataset(train, held_out, pipeline.fit_norm(train))
    params, _ = pipeline.train_vae(ds, TrainConfig(epochs=E2E_EPOCHS, seed=seed))
    mon = pipeline.fit_monitor(params, ds, "euclidean")
    return ds, params, mon


@pytest.fixture(scope="module")
def e2e():
    start = time.perf_counter()
    runs = {seed: _e2e_run(seed) for seed in E2E_SEEDS}
    return runs, time.perf_counter() - start


def test_criterion_3_synthetic_end_to_end(e2e, verdict):
    runs, train_time = e2e
    start = time.perf_counter()
    details, ok = [], True
    for seed, (ds, params, mon) in runs.items():
        th = mon.thresholds
        rep = evaluation.report_from_labels(ds.test_truth(), mon.predict(ds.test_matrix()))
        run = data.synth_run(120, 5120, seed=seed)
        recs = health.score_run_to_failure(params, mon.ref, th, run.recordings, 0, norm=mon.norm)
        ma = health.moving_average([r.health_index for r in recs], E2E_MA_WIDTH)
        a = 0 < th.t_normal < th.t_degraded
        b = rep.accuracy >= E2E_MIN_ACCURACY and rep.unseen_class_accuracy >= E2E_MIN_SEVERE_RECALL
        c = len(recs) == 120 and bool(np.all(np.diff(ma) >= 0))
        ok &= a and b and c
        details.append(f"seed {seed}: t=({th.t_normal:.3f},{th.t_degraded:.3f}) acc {rep.accuracy:.4f} "
                       f"severe recall {rep.unseen_class_accuracy:.4f} MA non-decreasing={c}")
    elapsed = train_time + time.perf_counter() - start
    ok &= elapsed < E2E_TIME_LIMIT_S
    verdict("3 synthetic end-to-end", ok, "; ".join(details) + f"; {elapsed:.0f}s (< {E2E_TIME_LIMIT_S}s)")


# 4. IMS reproduction (optional) --------------------------------------------

def test_criterion_4_ims_reproduction(verdict, tmp_path):
    root = os.environ.get("LATENTHEALTH_DATA")
    if not root or not Path(root).is_dir():
        verdict("4 IMS reproduction", True, "LATENTHEALTH_DATA not set to an IMS Set-2 directory", skipped=True)
    files = data.list_ims_dir(root)
    if len(files) <= IMS_SET2_PLAN.severe[1]:
        verdict("4 IMS reproduction", True, f"{root} holds {len(files)} files, need 984", skipped=True)
    spec = {"source": "directory", "data": str(Path(root).resolve()), "plan": IMS_SET2_PLAN.to_dict(),
            "files_per_class": 10, "seed": 0, "train_fraction": 0.75, "window": 256}
    ds = cli.build_dataset(spec, {})
    params, _ = pipeline.train_vae(ds, TrainConfig())
    X, truth = ds.test_matrix(), ds.test_truth()
    reps = {m: evaluation.report_from_labels(truth, pipeline.fit_monitor(params, ds, m).predict(X))
            for m in ("euclidean", "manhattan")}
    e = reps["euclidean"]
    ok = (min(e.accuracy, e.precision, e.recall, e.f1, e.unseen_class_accuracy) >= IMS_MIN_METRIC
          and e.f1 >= reps["manhattan"].f1)
    verdict("4 IMS reproduction", ok, f"euclidean acc {e.accuracy:.4f} p {e.precision:.4f} r {e.recall:.4f} "
            f"f1 {e.f1:.4f} unseen {e.unseen_class_accuracy:.4f}; manhattan f1 {reps['manhattan'].f1:.4f}")


# 5. noise robustness -------------------------------------------------------

def test_criterion_5_noise_sweep(e2e, verdict):
    runs, _ = e2e
    details, ok = [], True
    for seed, (ds, params, mon) in runs.items():
        res = evaluation.noise_sweep(mon.predict, ds.test_matrix(), ds.test_truth(), SWEEP_SNRS, seed)
        acc = {s: r.accuracy for s, r in res}
        good = (len(res) == len(SWEEP_SNRS) + 1 and abs(acc[10.0] - acc[math.inf]) <= SWEEP_CLEAN_GAP
                and acc[-2.0] >= SWEEP_MIN_ACC_AT_MINUS2)
        ok &= good
        details.append(f"seed {seed}: clean {acc[math.inf]:.4f} 10dB {acc[10.0]:.4f} -2dB {acc[-2.0]:.4f}")
    verdict("5 noise sweep", ok, "; ".join(details) +
            f" (|10dB-clean| <= {SWEEP_CLEAN_GAP}, -2dB >= {SWEEP_MIN_ACC_AT_MINUS2})")


# 6. fair comparison --------------------------------------------------------

def test_criterion_6_compare_methods(verdict):
    f1 = {m: [] for m in evaluation.METHODS}
    ok = True
    for seed in COMPARE_SEEDS:
        ds = pipeline.synthetic_dataset(E2E_PER_CLASS, seed)
        cfg = evaluation.CompareConfig(vae=TrainConfig(epochs=E2E_EPOCHS, seed=seed), seed=seed)
        fitted = evaluation.fit_methods(ds, cfg)
        ok &= {m.fingerprint for m in fitted.values()} == {ds.fingerprint}
        reports = evaluation.compare_methods(ds, cfg, fitted=fitted)
        ok &= list(reports) == list(evaluation.METHODS)
        ok &= len({line.split(",")[0] for line in evaluation.metrics_csv(reports).splitlines()[1:]}) == 4
        for m, r in reports.items():
            f1[m].append(r.f1)
    means = {m: float(np.mean(v)) for m, v in f1.items()}
    ok &= all(means["vae"] >= means[m] - COMPARE_MARGIN for m in evaluation.METHODS)
    verdict("6 fair comparison", ok, "mean macro-F1 " + ", ".join(f"{m} {v:.4f}" for m, v in means.items())
            + f" (vae >= others - {COMPARE_MARGIN})")


# 7. reproducibility --------------------------------------------------------

def test_criterion_7_reproducibility(tmp_path, verdict):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["train", "--synthetic", "--seed", "5", "--out", str(a)]) == 0
    assert cli.main(["train", "--synthetic", "--seed", "5", "--out", str(b)]) == 0
    same_ckpt = (a / "model.lhv").read_bytes() == (b / "model.lhv").read_bytes()

    ck = str(a / "model.lhv")
    assert cli.main(["score", "--checkpoint", ck, "--synthetic", "--seed", "5", "--out", str(a)]) == 0
    assert cli.main(["evaluate", "--checkpoint", ck, "--out", str(a)]) == 0
    assert cli.main(["sweep", "--checkpoint", ck, "--snr", "-2,1,4,7,10", "--out", str(a)]) == 0
    assert cli.main(["compare", "--synthetic", "--seed", "5", "--epochs", "50", "--out", str(a)]) == 0

    replayed, checked = True, []
    for name in ("train", "score", "evaluate", "sweep", "compare"):
        manifest = a / f"manifest-{name}.json"
        target = tmp_path / f"replay-{name}"
        code = cli.main(["replay", str(manifest), "--out", str(target)])
        outputs = json.loads(manifest.read_text())["outputs"]
        csvs = [o for o in outputs if o.endswith(".csv")]
        same = code == 0 and all((a / o).read_bytes() == (target / o).read_bytes() for o in csvs)
        replayed &= same
        checked.extend(csvs)
    verdict("7 reproducibility", same_ckpt and replayed,
            f"checkpoints byte-identical={same_ckpt}; replayed CSVs byte-identical={replayed} "
            f"({', '.join(sorted(set(checked)))})")
