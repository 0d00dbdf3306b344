"""Command-line driver: ``latenthealth {synth,train,score,evaluate,sweep,compare,replay}``.

Settings resolve as command-line flag, then config file (``--config``), then
built-in defaults. Every command writes its outputs plus a JSON manifest into
``--out``; ``replay`` reruns a manifest and checks the output hashes.

Exit codes: 0 success, 1 replay mismatch, 2 argument error, 3 data error,
4 model or architecture error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import data, evaluation, health, pipeline, vae
from .errors import ArchitectureError, DataError, DegenerateThresholdError

EXIT_OK, EXIT_MISMATCH, EXIT_ARGS, EXIT_DATA, EXIT_MODEL = 0, 1, 2, 3, 4
MANIFEST_VERSION = 1

DEFAULTS = {
    "epochs": 500, "learning_rate": 5e-4, "beta": 20.0, "c": 1.0, "batch_size": 128, "seed": 0,
    "latent_dim": 5, "window": 256, "train_fraction": 0.75, "metric": "euclidean",
    "channel": 0, "normal": "100,149", "degraded": "711,900", "severe": "972,981",
    "files_per_class": 10, "n_per_class": 200, "n_files": 120, "rows_per_file": 5120,
    "snr": "-2,1,4,7,10", "knn_k": 5, "kmeans_k": 2, "aggregate": "mean",
}
TYPES = {"epochs": int, "learning_rate": float, "beta": float, "c": float, "batch_size": int,
         "seed": int, "latent_dim": int, "window": int, "train_fraction": float, "channel": int,
         "files_per_class": int, "n_per_class": int, "n_files": int, "rows_per_file": int,
         "knn_k": int, "kmeans_k": int}
CONFIG_SECTION = "latenthealth"


class ArgError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument parsing and config resolution
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, *, training=False, data_source=True, checkpoint=False):
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--out", default="latenthealth-out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--metric", help="euclidean, manhattan or minkowski3")
    if data_source:
        p.add_argument("--synthetic", action="store_true", help="use generated data")
        p.add_argument("--data", help="directory of IMS-format files (default $LATENTHEALTH_DATA)")
        p.add_argument("--channel", type=int)
        p.add_argument("--normal", help="normal file range, e.g. 100,149")
        p.add_argument("--degraded", help="degraded file range")
        p.add_argument("--severe", help="severe file range")
        p.add_argument("--files-per-class", type=int, dest="files_per_class")
        p.add_argument("--n-per-class", type=int, dest="n_per_class")
        p.add_argument("--train-fraction", type=float, dest="train_fraction")
        p.add_argument("--window", type=int)
    if training:
        p.add_argument("--epochs", type=int)
        p.add_argument("--lr", "--learning-rate", type=float, dest="learning_rate")
        p.add_argument("--beta", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--batch-size", type=int, dest="batch_size")
        p.add_argument("--latent-dim", type=int, dest="latent_dim")
    if checkpoint:
        p.add_argument("--checkpoint", required=True, help="model file written by train")
        p.add_argument("--thresholds", help="thresholds.json (default: next to the checkpoint)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latenthealth",
                                     description="Latent-distance condition monitoring")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic run-to-failure dataset")
    _common(p, data_source=False)
    p.add_argument("--n-files", type=int, dest="n_files")
    p.add_argument("--rows-per-file", type=int, dest="rows_per_file")

    p = sub.add_parser("train", help="fit the VAE, reference mean and thresholds")
    _common(p, training=True)

    p = sub.add_parser("score", help="health index per file (or per window)")
    _common(p, checkpoint=True)
    p.add_argument("--per-window", action="store_true", dest="per_window")
    p.add_argument("--aggregate", choices=["mean", "median"])
    p.add_argument("--n-files", type=int, dest="n_files")
    p.add_argument("--rows-per-file", type=int, dest="rows_per_file")

    p = sub.add_parser("evaluate", help="test-split metrics for one or more distance metrics")
    _common(p, checkpoint=True)

    p = sub.add_parser("sweep", help="metrics under additive white Gaussian noise")
    _common(p, checkpoint=True)
    p.add_argument("--snr", help="comma-separated SNR levels in dB")

    p = sub.add_parser("compare", help="VAE against KNN, K-means and a plain autoencoder")
    _common(p, training=True)
    p.add_argument("--checkpoint", help="reuse a trained VAE instead of training one")
    p.add_argument("--knn-k", type=int, dest="knn_k")
    p.add_argument("--kmeans-k", type=int, dest="kmeans_k")

    p = sub.add_parser("replay", help="rerun a manifest and verify its outputs")
    p.add_argument("manifest")
    p.add_argument("--out", help="directory for the rerun (default: the manifest's directory)")
    return parser


def _fix_negative_lists(argv: list[str]) -> list[str]:
    # "--snr -2,1,4" would otherwise read "-2,1,4" as an option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--snr" and i + 1 < len(argv):
            out.append(f"--snr={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def read_config(path) -> dict:
    """Parse a ``key = value`` file; a ``[latenthealth]`` header is optional."""
    text = Path(path).read_text()
    if not any(line.strip().startswith("[") for line in text.splitlines()):
        text = f"[{CONFIG_SECTION}]\n" + text
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ArgError(f"bad config file {path}: {exc}") from None
    if not cp.has_section(CONFIG_SECTION):
        raise ArgError(f"config file {path} has no [{CONFIG_SECTION}] section")
    out = {}
    for key, value in cp.items(CONFIG_SECTION):
        key = key.replace("-", "_")
        if key not in DEFAULTS and key not in ("data",):
            raise ArgError(f"unknown config key {key!r} in {path}")
        out[key] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults into one typed settings dict."""
    file_cfg = read_config(args.config) if getattr(args, "config", None) else {}
    cfg = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        value = flag if flag is not None else file_cfg.get(key, default)
        try:
            cfg[key] = TYPES[key](value) if key in TYPES else value
        except ValueError:
            raise ArgError(f"{key} must be {TYPES[key].__name__}, got {value!r}") from None
    data_dir = getattr(args, "data", None)
    if data_dir is None and file_cfg.get("data"):
        # relative paths in a config file are relative to that file
        data_dir = Path(args.config).parent / file_cfg["data"]
    data_dir = data_dir or data.default_data_dir()
    cfg["data"] = str(Path(data_dir).resolve()) if data_dir else None
    cfg["synthetic"] = bool(getattr(args, "synthetic", False))

    if cfg["epochs"] < 1:
        raise ArgError("--epochs must be at least 1")
    if cfg["metric"] not in health.METRICS:
        raise ArgError(f"--metric must be one of {health.METRICS}")
    if not 0 < cfg["train_fraction"] < 1:
        raise ArgError("--train-fraction must lie strictly between 0 and 1")
    for key in ("batch_size", "latent_dim", "window", "files_per_class", "n_per_class",
                "n_files", "rows_per_file", "knn_k", "kmeans_k"):
        if cfg[key] < 1:
            raise ArgError(f"{key} must be positive")
    if not (cfg["learning_rate"] > 0 and cfg["c"] > 0 and cfg["beta"] >= 0):
        raise ArgError("need learning_rate > 0, c > 0 and beta >= 0")
    cfg["snr_list"] = _parse_floats(cfg["snr"], "snr")
    return cfg


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ArgError(f"--{name} expects comma-separated numbers") from None
    if not vals:
        raise ArgError(f"--{name} is empty")
    return vals


def _range(text: str, name: str) -> tuple[int, int]:
    parts = [t.strip() for t in str(text).replace("-", ",").split(",") if t.strip()]
    if len(parts) != 2:
        raise ArgError(f"{name} range must be 'first,last'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ArgError(f"{name} range must hold integers") from None


def label_plan(cfg: dict) -> data.LabelPlan:
    return data.LabelPlan(_range(cfg["normal"], "normal"), _range(cfg["degraded"], "degraded"),
                          _range(cfg["severe"], "severe"), cfg["channel"])


def train_config(cfg: dict) -> vae.TrainConfig:
    return vae.TrainConfig(cfg["epochs"], cfg["learning_rate"], cfg["beta"], cfg["c"],
                           cfg["batch_size"], cfg["seed"])


# ---------------------------------------------------------------------------
# data sources
# ---------------------------------------------------------------------------

def data_spec(cfg: dict) -> dict:
    """The settings needed to rebuild the train/test split; stored in the checkpoint."""
    if cfg["synthetic"]:
        return {"source": "synthetic", "n_per_class": cfg["n_per_class"], "seed": cfg["seed"],
                "train_fraction": cfg["train_fraction"], "window": cfg["window"]}
    if not cfg["data"]:
        raise DataError("no data: pass --synthetic, --data DIR or set LATENTHEALTH_DATA")
    return {"source": "directory", "data": cfg["data"], "plan": label_plan(cfg).to_dict(),
            "files_per_class": cfg["files_per_class"], "seed": cfg["seed"],
            "train_fraction": cfg["train_fraction"], "window": cfg["window"]}


def _plan_from(d: dict) -> data.LabelPlan:
    return data.LabelPlan(tuple(d["normal"]), tuple(d["degraded"]), tuple(d["severe"]), d["channel"])


def build_dataset(spec: dict, inputs: dict) -> pipeline.Dataset:
    if spec["source"] == "synthetic":
        if spec["window"] != data.WINDOW:
            seen = (data.synth_generate("normal", spec["n_per_class"], [spec["seed"], 1], window=spec["window"])
                    + data.synth_generate("degraded", spec["n_per_class"], [spec["seed"], 2], window=spec["window"]))
            unseen = data.synth_generate("severe", spec["n_per_class"], [spec["seed"], 3], window=spec["window"])
            return pipeline.dataset_from_windows(seen, unseen, spec["train_fraction"], spec["seed"])
        return pipeline.synthetic_dataset(spec["n_per_class"], spec["seed"], spec["train_fraction"])
    plan = _plan_from(spec["plan"])
    picks = plan.training_files(spec["files_per_class"])
    train_idx = picks["normal"] + picks["degraded"]
    severe_idx = list(range(plan.severe[0], plan.severe[1] + 1))
    files = data.list_ims_dir(spec["data"])
    for i in train_idx + severe_idx:
        if i < len(files):
            inputs[str(files[i])] = data.file_digest(files[i])
    train_recs = data.load_ims_files(spec["data"], train_idx)
    severe_recs = data.load_ims_files(spec["data"], severe_idx)
    return pipeline.dataset_from_recordings(train_recs, severe_recs, plan, spec["train_fraction"],
                                            spec["seed"], spec["window"])


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _sha(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class Run:
    """Collects inputs/outputs of one command and writes its manifest."""

    def __init__(self, command: str, argv: list[str], cfg: dict, out: Path):
        self.command, self.argv, self.cfg, self.out = command, argv, cfg, out
        self.inputs: dict = {}
        self.outputs: dict = {}
        out.mkdir(parents=True, exist_ok=True)

    def write_text(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        self.outputs[name] = _sha(path)
        return path

    def record(self, name: str) -> None:
        self.outputs[name] = _sha(self.out / name)

    def add_input(self, path) -> None:
        self.inputs[str(Path(path).resolve())] = _sha(path)

    def finish(self) -> Path:
        cfg = {k: v for k, v in self.cfg.items() if k != "snr_list"}
        manifest = {"version": MANIFEST_VERSION, "command": self.command, "argv": self.argv,
                    "config": cfg, "inputs": self.inputs, "outputs": self.outputs}
        path = self.out / f"manifest-{self.command}.json"
        path.write_text(_json(manifest))
        return path


def _strip_out(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            out.append(a)
    return out


def _absolutize(argv: list[str]) -> list[str]:
    """Make path-valued flags absolute so a manifest replays from any directory."""
    path_flags = ("--config", "--data", "--checkpoint", "--thresholds")
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in path_flags and i + 1 < len(argv):
            out.extend([a, str(Path(argv[i + 1]).resolve())])
            i += 2
            continue
        key, eq, val = a.partition("=")
        out.append(f"{key}={Path(val).resolve()}" if eq and key in path_flags else a)
        i += 1
    return out


def thresholds_doc(params, ds: pipeline.Dataset, default_metric: str) -> dict:
    per_metric = {}
    ref = None
    for metric in health.METRICS:
        try:
            mon = pipeline.fit_monitor(params, ds, metric)
        except DegenerateThresholdError:
            if metric == default_metric:
                raise
            continue
        ref = mon.ref
        per_metric[metric] = {"t_normal": mon.thresholds.t_normal,
                              "t_degraded": mon.thresholds.t_degraded}
    return {"metric": default_metric, "reference_mean": [float(v) for v in ref.mu_ref],
            "thresholds": per_metric, "split_fingerprint": ds.fingerprint}


def load_model(args, run: Run):
    ckpt_path = Path(args.checkpoint)
    if not ckpt_path.is_file():
        raise DataError(f"checkpoint not found: {ckpt_path}")
    th_path = Path(args.thresholds) if args.thresholds else ckpt_path.with_name("thresholds.json")
    if not th_path.is_file():
        raise DataError(f"thresholds file not found: {th_path}")
    ckpt = vae.load_checkpoint(ckpt_path, latent_dim=None)
    if ckpt.norm is None:
        raise ArchitectureError("checkpoint carries no normalization statistics")
    try:
        doc = json.loads(th_path.read_text())
        ref = health.ReferenceMean(np.array(doc["reference_mean"], dtype=np.float64))
    except (ValueError, KeyError) as exc:
        raise DataError(f"bad thresholds file {th_path}: {exc}") from None
    if ref.mu_ref.shape != (ckpt.params.arch.latent_dim,):
        raise ArchitectureError("reference mean does not match the checkpoint latent size")
    run.add_input(ckpt_path)
    run.add_input(th_path)
    return ckpt, ref, doc


def _threshold_set(doc: dict, metric: str) -> health.ThresholdSet:
    if metric not in doc["thresholds"]:
        raise DataError(f"no fitted thresholds for metric {metric!r}")
    t = doc["thresholds"][metric]
    return health.ThresholdSet(float(t["t_normal"]), float(t["t_degraded"]), metric)


def _dataset_for(ckpt, doc, run: Run) -> pipeline.Dataset:
    spec = ckpt.extra.get("data")
    if not spec:
        raise DataError("checkpoint does not record its training data")
    ds = build_dataset(spec, run.inputs)
    if ds.fingerprint != doc.get("split_fingerprint"):
        raise DataError("rebuilt split does not match the one the model was trained on")
    return ds


def _metrics_requested(args, cfg) -> list[str]:
    # evaluate defaults to all three metrics unless one is given
    if getattr(args, "metric", None) is None and "metric" not in _file_keys(args):
        return list(health.METRICS)
    return [cfg["metric"]]


def _file_keys(args) -> set:
    return set(read_config(args.config)) if getattr(args, "config", None) else set()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(args, cfg, run: Run) -> int:
    sr = data.synth_run(cfg["n_files"], cfg["rows_per_file"], cfg["seed"])
    width = len(str(cfg["n_files"] - 1))
    for rec in sr.recordings:
        name = f"synth.{rec.file_index:0{width}d}"
        data.write_ims_file(run.out / name, rec.samples)
        run.record(name)
    plan = sr.plan
    lines = [f"[{CONFIG_SECTION}]",
             f"normal = {plan.normal[0]},{plan.normal[1]}",
             f"degraded = {plan.degraded[0]},{plan.degraded[1]}",
             f"severe = {plan.severe[0]},{plan.severe[1]}",
             f"channel = {plan.channel}"]
    run.write_text("labels.ini", "\n".join(lines) + "\n")
    print(f"wrote {len(sr.recordings)} files to {run.out}; labels in labels.ini")
    return EXIT_OK


def cmd_train(args, cfg, run: Run) -> int:
    spec = data_spec(cfg)
    ds = build_dataset(spec, run.inputs)
    config = train_config(cfg)
    arch = vae.VaeArch(input_dim=cfg["window"], latent_dim=cfg["latent_dim"])
    params, hist = pipeline.train_vae(ds, config, arch)
    doc = thresholds_doc(params, ds, cfg["metric"])
    vae.save_checkpoint(run.out / "model.lhv", params, config, ds.norm,
                        {"data": spec, "split_fingerprint": ds.fingerprint})
    run.record("model.lhv")
    run.write_text("thresholds.json", _json(doc))
    run.write_text("history.csv", evaluation.history_csv(hist))
    th = doc["thresholds"][cfg["metric"]]
    print(f"final loss {hist.total[-1]:.6g} (recon {hist.recon[-1]:.6g}, kl {hist.kl[-1]:.6g})")
    print(f"thresholds [{cfg['metric']}]: t_normal={th['t_normal']:.6g} t_degraded={th['t_degraded']:.6g}")
    return EXIT_OK


def cmd_score(args, cfg, run: Run) -> int:
    ckpt, ref, doc = load_model(args, run)
    metric = cfg["metric"] if args.metric or "metric" in _file_keys(args) else doc["metric"]
    th = _threshold_set(doc, metric)
    window = ckpt.params.arch.input_dim
    if cfg["synthetic"]:
        sr = data.synth_run(cfg["n_files"], cfg["rows_per_file"], cfg["seed"])
        files, plan = sr.recordings, sr.plan
    else:
        if not cfg["data"]:
            raise DataError("no data: pass --synthetic, --data DIR or set LATENTHEALTH_DATA")
        paths = data.list_ims_dir(cfg["data"])
        plan = label_plan(cfg)
        for p in paths:
            run.add_input(p)
        files = [(lambda p=p, i=i: data.parse_ims_file(p.read_bytes(), None, i, p.name))
                 for i, p in enumerate(paths)]
    records = health.score_run_to_failure(ckpt.params, ref, th, files, plan.channel, metric,
                                          ckpt.norm, plan, cfg["aggregate"], args.per_window, window)
    if not records:
        raise DataError("no scorable files")
    run.write_text("health.csv", evaluation.health_csv(records))
    if not args.per_window:
        run.write_text("health.svg", evaluation.health_svg(records, th))
    n_severe = sum(r.predicted == "severe" for r in records)
    print(f"scored {len(records)} rows with {metric}; {n_severe} predicted severe")
    return EXIT_OK


def cmd_evaluate(args, cfg, run: Run) -> int:
    ckpt, ref, doc = load_model(args, run)
    ds = _dataset_for(ckpt, doc, run)
    X, truth = ds.test_matrix(), ds.test_truth()
    reports = {}
    for metric in _metrics_requested(args, cfg):
        mon = pipeline.fit_monitor(ckpt.params, ds, metric)
        reports[f"vae_{metric}"] = evaluation.report_from_labels(truth, mon.predict(X))
    run.write_text("metrics.csv", evaluation.metrics_csv(reports))
    for name, rep in reports.items():
        print(f"{name}: accuracy {rep.accuracy:.4f} precision {rep.precision:.4f} "
              f"recall {rep.recall:.4f} f1 {rep.f1:.4f} unseen {rep.unseen_class_accuracy:.4f}")
    return EXIT_OK


def cmd_sweep(args, cfg, run: Run) -> int:
    ckpt, ref, doc = load_model(args, run)
    ds = _dataset_for(ckpt, doc, run)
    metric = cfg["metric"] if args.metric or "metric" in _file_keys(args) else doc["metric"]
    mon = health.Monitor(ckpt.params, ckpt.norm, ref, _threshold_set(doc, metric))
    results = evaluation.noise_sweep(mon.predict, ds.test_matrix(), ds.test_truth(),
                                     cfg["snr_list"], cfg["seed"])
    run.write_text("sweep.csv", evaluation.sweep_csv(results))
    run.write_text("sweep.svg", evaluation.sweep_svg(results))
    for snr, rep in results:
        label = "clean" if math.isinf(snr) else f"{snr:g} dB"
        print(f"{label:>8}: accuracy {rep.accuracy:.4f} f1 {rep.f1:.4f}")
    return EXIT_OK


def cmd_compare(args, cfg, run: Run) -> int:
    vae_params = None
    if args.checkpoint:
        args.thresholds = None
        ckpt, _, doc = load_model(args, run)
        ds = _dataset_for(ckpt, doc, run)
        vae_params = ckpt.params
    else:
        ds = build_dataset(data_spec(cfg), run.inputs)
    ccfg = evaluation.CompareConfig(vae=train_config(cfg), knn_k=cfg["knn_k"],
                                    kmeans_k=cfg["kmeans_k"], metric=cfg["metric"], seed=cfg["seed"])
    reports = evaluation.compare_methods(ds, ccfg, vae_params=vae_params)
    run.write_text("compare.csv", evaluation.metrics_csv(reports))
    for name, rep in reports.items():
        print(f"{name:>10}: accuracy {rep.accuracy:.4f} macro-f1 {rep.f1:.4f} "
              f"unseen {rep.unseen_class_accuracy:.4f}")
    return EXIT_OK


def cmd_replay(args) -> int:
    mpath = Path(args.manifest)
    try:
        manifest = json.loads(mpath.read_text())
        argv, recorded = manifest["argv"], manifest["outputs"]
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"unreadable manifest {mpath}: {exc}") from None
    for path, digest in manifest.get("inputs", {}).items():
        if not Path(path).is_file() or _sha(path) != digest:
            raise DataError(f"input changed or missing since the recorded run: {path}")
    out = Path(args.out) if args.out else mpath.parent
    code = main(list(argv) + ["--out", str(out)])
    if code != EXIT_OK:
        return code
    bad = [name for name, digest in recorded.items()
           if not (out / name).is_file() or _sha(out / name) != digest]
    for name in sorted(recorded):
        print(f"{'MISMATCH' if name in bad else 'ok':>8}  {name}")
    return EXIT_MISMATCH if bad else EXIT_OK


COMMANDS = {"synth": cmd_synth, "train": cmd_train, "score": cmd_score, "evaluate": cmd_evaluate,
            "sweep": cmd_sweep, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    argv = _fix_negative_lists(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            return cmd_replay(args)
        cfg = resolve(args)
        run = Run(args.command, _absolutize(_strip_out(argv)), cfg, Path(args.out))
        code = COMMANDS[args.command](args, cfg, run)
        run.finish()
        return code
    except ArgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (ArchitectureError, DegenerateThresholdError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
