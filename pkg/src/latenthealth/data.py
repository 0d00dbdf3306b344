"""Vibration data handling: IMS ingestion, windowing, labels, splits, noise, synthetic runs."""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

WINDOW = 256
SAMPLE_RATE = 20000.0
LABELS = ("normal", "degraded", "severe", "unlabeled")
CONDITIONS = ("normal", "degraded", "severe")


@dataclass
class RawRecording:
    samples: np.ndarray  # (n_rows, n_channels)
    file_index: int
    sample_rate: float = SAMPLE_RATE
    name: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim == 1:
            self.samples = self.samples[:, None]
        if self.samples.ndim != 2 or self.samples.shape[1] < 1:
            raise DataError("recording must be a 2-D (rows, channels) array")
        if self.file_index < 0:
            raise DataError("file_index must be non-negative")
        if not np.all(np.isfinite(self.samples)):
            raise DataError(f"non-finite samples in recording {self.name or self.file_index}")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class SignalWindow:
    values: np.ndarray
    label: str = "unlabeled"
    file_index: int = 0
    channel: int = 0
    offset: int = 0

    def __post_init__(self):
        if self.label not in LABELS:
            raise DataError(f"unknown label {self.label!r}")

    @property
    def source(self) -> tuple[int, int, int]:
        return (self.file_index, self.channel, self.offset)


@dataclass(frozen=True)
class NormStats:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0:
            raise DataError("normalization std must be positive")

    @classmethod
    def fit(cls, windows: Sequence[SignalWindow]) -> "NormStats":
        x = stack(windows)
        std = float(x.std())
        if std == 0.0:
            raise DataError("cannot normalize constant data")
        return cls(float(x.mean()), std)


@dataclass(frozen=True)
class LabelPlan:
    normal: tuple[int, int]
    degraded: tuple[int, int]
    severe: tuple[int, int]
    channel: int = 0

    def __post_init__(self):
        ranges = [tuple(int(v) for v in r) for r in (self.normal, self.degraded, self.severe)]
        for lo, hi in ranges:
            if lo > hi or lo < 0:
                raise DataError(f"bad file range [{lo}, {hi}]")
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = ranges[i], ranges[j]
                if a[0] <= b[1] and b[0] <= a[1]:
                    raise DataError(f"label ranges overlap: {a} and {b}")
        if ranges[1][0] <= ranges[0][1]:
            raise DataError("degraded range must start after the normal range")
        object.__setattr__(self, "normal", ranges[0])
        object.__setattr__(self, "degraded", ranges[1])
        object.__setattr__(self, "severe", ranges[2])

    def label_for(self, file_index: int) -> str:
        for name in CONDITIONS:
            lo, hi = getattr(self, name)
            if lo <= file_index <= hi:
                return name
        return "unlabeled"

    def training_files(self, per_class: int = 10) -> dict[str, list[int]]:
        """Evenly spaced file picks from the normal and degraded ranges."""
        return {name: evenly_spaced(getattr(self, name), per_class) for name in ("normal", "degraded")}

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "degraded": list(self.degraded),
                "severe": list(self.severe), "channel": self.channel}


# IMS Set 2, bearing 1: degradation after file 710, failure at file 981
IMS_SET2_PLAN = LabelPlan(normal=(100, 149), degraded=(711, 900), severe=(972, 981), channel=0)


def evenly_spaced(file_range: tuple[int, int], count: int) -> list[int]:
    lo, hi = file_range
    n = hi - lo + 1
    if count >= n:
        return list(range(lo, hi + 1))
    if count == 1:
        return [lo + n // 2]
    return sorted({int(round(lo + k * (hi - lo) / (count - 1))) for k in range(count)})


def stack(windows: Sequence[SignalWindow]) -> np.ndarray:
    if len(windows) == 0:
        return np.zeros((0, WINDOW))
    return np.stack([w.values for w in windows]).astype(np.float64, copy=False)


# ---------------------------------------------------------------------------
# IMS ingestion
# ---------------------------------------------------------------------------

def parse_ims_file(content, expected_channels: int | None = None, file_index: int = 0,
                   name: str = "") -> RawRecording:
    """Parse whitespace-separated ASCII (one row per sample, one column per channel)."""
    if isinstance(content, (bytes, bytearray)):
        content = content.decode("ascii", errors="strict")
    lines = [ln for ln in content.splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"empty file {name}".strip())
    rows = [ln.split() for ln in lines]
    width = expected_channels if expected_channels is not None else len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataError(f"ragged row {i + 1} in {name or 'input'}: {len(r)} fields, expected {width}")
    try:
        samples = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"non-numeric token in {name or 'input'}: {exc}") from None
    return RawRecording(samples, file_index=file_index, name=name)


def list_ims_dir(path) -> list[Path]:
    """Data files in lexicographic name order (IMS names are timestamps)."""
    p = Path(path)
    if not p.is_dir():
        raise DataError(f"not a directory: {p}")
    return sorted((f for f in p.iterdir() if f.is_file() and not f.name.startswith(".")
                   and f.suffix not in (".json", ".txt", ".csv", ".ini", ".cfg")),
                  key=lambda f: f.name)


def load_ims_files(path, indices: Iterable[int] | None = None,
                   expected_channels: int | None = None) -> list[RawRecording]:
    files = list_ims_dir(path)
    wanted = range(len(files)) if indices is None else sorted(set(indices))
    out = []
    for i in wanted:
        if i >= len(files):
            raise DataError(f"file index {i} out of range ({len(files)} files in {path})")
        out.append(parse_ims_file(files[i].read_bytes(), expected_channels, i, files[i].name))
    return out


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_ims_file(path, samples: np.ndarray) -> None:
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[0] == 1 and samples.shape[1] > 1:
        samples = samples.T
    with open(path, "w", newline="\n") as fh:
        for row in samples:
            fh.write("\t".join(f"{v:.6f}" for v in row) + "\n")


# ---------------------------------------------------------------------------
# windows
# ---------------------------------------------------------------------------

def segment(recording: RawRecording, channel: int = 0, window: int = WINDOW) -> list[SignalWindow]:
    if window < 1:
        raise ValueError("window must be at least 1")
    if not 0 <= channel < recording.n_channels:
        raise DataError(f"channel {channel} out of range (recording has {recording.n_channels})")
    col = recording.samples[:, channel]
    n = len(col) // window
    return [SignalWindow(col[k * window:(k + 1) * window].copy(), "unlabeled",
                         recording.file_index, channel, k * window) for k in range(n)]


def label_windows(windows: Sequence[SignalWindow], plan: LabelPlan) -> list[SignalWindow]:
    return [replace(w, label=plan.label_for(w.file_index)) for w in windows]


def normalize(windows: Sequence[SignalWindow], stats: NormStats) -> list[SignalWindow]:
    return [replace(w, values=(w.values - stats.mean) / stats.std) for w in windows]


def denormalize(windows: Sequence[SignalWindow], stats: NormStats) -> list[SignalWindow]:
    return [replace(w, values=w.values * stats.std + stats.mean) for w in windows]


def shuffle_split(windows: Sequence[SignalWindow], train_fraction: float = 0.75, seed: int = 0):
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n = len(windows)
    if n == 0:
        raise DataError("cannot split an empty window set")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(math.floor(train_fraction * n + 0.5))
    train = [windows[i] for i in perm[:n_train]]
    test = [windows[i] for i in perm[n_train:]]
    return train, test


def split_fingerprint(train: Sequence[SignalWindow], test: Sequence[SignalWindow]) -> str:
    """Hash of both splits (sources, labels and values) used to prove methods saw identical data."""
    h = hashlib.sha256()
    for tag, part in ((b"train", train), (b"test", test)):
        h.update(tag)
        for w in part:
            h.update(f"{w.file_index},{w.channel},{w.offset},{w.label};".encode())
            h.update(np.ascontiguousarray(w.values, dtype="<f8").tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------

def awgn(values: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    power = float(np.mean(values**2))
    if power == 0.0:
        raise DataError("signal has zero power; SNR is undefined")
    noise_power = power / 10.0 ** (snr_db / 10.0)
    return values + rng.normal(0.0, math.sqrt(noise_power), size=values.shape)


def add_awgn(window: SignalWindow, snr_db: float, seed) -> SignalWindow:
    """Return a copy of ``window`` with white Gaussian noise at the requested SNR (dB)."""
    return replace(window, values=awgn(window.values, snr_db, np.random.default_rng(seed)))


# ---------------------------------------------------------------------------
# synthetic vibration
# ---------------------------------------------------------------------------

# shaft at 2000 rpm sampled at 20 kHz -> 600 samples per revolution
_SHAFT_HZ = 2000.0 / 60.0
_HARMONICS = ((1, 0.30), (2, 0.20), (3, 0.10))
SEVERITY = {"normal": 0.0, "degraded": 1.0, "severe": 2.0}
# Defect impacts every 80 samples (250 Hz) ring a 1.5 kHz resonance whose decay
# outlasts the impact period, so a damaged bearing shows a phase-locked tone.
SYNTH = dict(resonance_hz=1500.0, decay_samples=150.0, burst_len=600, period=80.0,
             amp_per_severity=2.5, rate_gain=1.0, extra_noise=0.7, jitter=0.005)


def _impulse_params(severity: float) -> tuple[float, float, float]:
    """(impulse amplitude, impulse period in samples, extra broadband std) for a severity."""
    s = max(float(severity), 0.0)
    over = max(s - 1.0, 0.0)
    amplitude = SYNTH["amp_per_severity"] * s
    # integer rate steps keep the burst train phase-locked to the resonance
    period = SYNTH["period"] / (1.0 + math.floor(SYNTH["rate_gain"] * over + 0.5))
    extra = SYNTH["extra_noise"] * over
    return amplitude, period, extra


def synth_signal(n: int, severity: float, rng: np.random.Generator) -> np.ndarray:
    """One synthetic accelerometer trace of ``n`` samples at the given severity.

    Severity 0 is unit-variance noise plus shaft harmonics. Positive severity
    adds a train of exponentially decaying resonance bursts whose amplitude
    grows with severity; above 1 the bursts get denser and broadband noise is added.
    """
    t = np.arange(n) / SAMPLE_RATE
    x = rng.normal(0.0, 1.0, n)
    for k, amp in _HARMONICS:
        x += amp * np.sin(2 * np.pi * k * _SHAFT_HZ * t + rng.uniform(0, 2 * np.pi))
    amplitude, period, extra = _impulse_params(severity)
    if amplitude > 0:
        blen = int(SYNTH["burst_len"])
        tb = np.arange(blen)
        burst = np.exp(-tb / SYNTH["decay_samples"]) * np.sin(2 * np.pi * SYNTH["resonance_hz"] * tb / SAMPLE_RATE)
        pulses = np.zeros(n + 2 * blen)
        pos = rng.uniform(0, period)
        # start early so the window opens on a settled response
        pos -= blen
        while pos < n:
            idx = int(round(pos + rng.normal(0.0, SYNTH["jitter"] * period))) + blen
            if 0 <= idx < len(pulses):
                pulses[idx] += amplitude * (1.0 + 0.05 * rng.normal())
            pos += period
        x += np.convolve(pulses, burst)[blen:blen + n]
    if extra > 0:
        x += rng.normal(0.0, extra, n)
    return x


def synth_generate(condition: str, n_windows: int, seed, severity: float | None = None,
                   window: int = WINDOW) -> list[SignalWindow]:
    """Independent synthetic windows for one condition, reproducible from ``seed``."""
    if condition not in CONDITIONS:
        raise DataError(f"unknown condition {condition!r}")
    if n_windows < 1:
        raise ValueError("n_windows must be at least 1")
    s = SEVERITY[condition] if severity is None else severity
    rng = np.random.default_rng(seed)
    return [SignalWindow(synth_signal(window, s, rng), condition, 0, 0, 0)
            for _ in range(n_windows)]


@dataclass(frozen=True)
class SynthRun:
    recordings: list
    severities: np.ndarray
    plan: LabelPlan


def synth_severity_schedule(n_files: int) -> np.ndarray:
    """Monotone wear schedule: slow rise while healthy, steady degradation, then rapid failure."""
    u = np.linspace(0.0, 1.0, n_files)
    s = np.where(u < 0.4, 0.3 * u / 0.4,
                 np.where(u < 0.85, 0.6 + 0.9 * (u - 0.4) / 0.45,
                          1.8 + 0.8 * (u - 0.85) / 0.15))
    return s


def synth_run(n_files: int = 120, rows_per_file: int = 5120, seed=0,
              n_channels: int = 1) -> SynthRun:
    """A synthetic run-to-failure sequence of recordings plus its label plan."""
    if n_files < 10:
        raise ValueError("a synthetic run needs at least 10 files")
    sev = synth_severity_schedule(n_files)
    seeds = np.random.SeedSequence(seed).spawn(n_files)
    recs = []
    for i in range(n_files):
        rng = np.random.default_rng(seeds[i])
        cols = [synth_signal(rows_per_file, sev[i], rng) for _ in range(n_channels)]
        recs.append(RawRecording(np.stack(cols, axis=1), file_index=i, name=f"synth_{i:04d}"))
    normal_hi = int(np.max(np.nonzero(sev < 0.5)[0]))
    deg = np.nonzero((sev >= 0.5) & (sev < 1.7))[0]
    sev_lo = int(np.min(np.nonzero(sev >= 1.7)[0]))
    plan = LabelPlan(normal=(0, normal_hi), degraded=(int(deg.min()), int(deg.max())),
                     severe=(sev_lo, n_files - 1), channel=0)
    return SynthRun(recs, sev, plan)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def windows_to_csv(windows: Sequence[SignalWindow], path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n = len(windows[0].values) if windows else WINDOW
    writer.writerow(["file_index", "channel", "offset", "label"] + [f"v{i}" for i in range(n)])
    for w in windows:
        writer.writerow([w.file_index, w.channel, w.offset, w.label] + [repr(float(v)) for v in w.values])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def windows_from_csv(text: str) -> list[SignalWindow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:4] != ["file_index", "channel", "offset", "label"]:
        raise DataError("not a window CSV")
    return [SignalWindow(np.array([float(v) for v in row[4:]]), row[3], int(row[0]), int(row[1]),
                         int(row[2])) for row in reader]


def default_data_dir() -> str | None:
    return os.environ.get("LATENTHEALTH_DATA")
