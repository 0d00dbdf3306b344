"""Beta-VAE over fixed-length vibration windows.

Encoder: relu trunk (256 -> 128 -> 32 -> 8) feeding two affine heads that give
the latent mean and log-variance. Decoder: 5 -> 8 -> 32 -> 128 -> 256 with relu
hidden layers and an identity output.

The training objective is minimized per sample as

    ||x - xhat||^2 / (2 c) + beta * KL(N(mu, exp(logvar)) || N(0, I))

summed over input and latent dimensions and averaged over the mini-batch.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import nn
from .data import NormStats, SignalWindow, stack
from .errors import ArchitectureError, ContaminationError, DataError

FORMAT_MAGIC = b"LHVAE\x00"
FORMAT_VERSION = 1
LATENT_DIM = 5


@dataclass(frozen=True)
class VaeArch:
    input_dim: int = 256
    hidden: tuple[int, ...] = (128, 32, 8)
    latent_dim: int = LATENT_DIM

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.input_dim < 1 or self.latent_dim < 1 or not self.hidden:
            raise ArchitectureError("input, hidden and latent sizes must be positive")

    @property
    def encoder_spec(self) -> nn.MlpSpec:
        sizes = (self.input_dim,) + self.hidden
        return nn.MlpSpec(sizes, ("relu",) * (len(sizes) - 1))

    @property
    def decoder_spec(self) -> nn.MlpSpec:
        sizes = (self.latent_dim,) + self.hidden[::-1] + (self.input_dim,)
        return nn.MlpSpec(sizes, ("relu",) * (len(sizes) - 2) + ("identity",))

    @property
    def head_spec(self) -> nn.MlpSpec:
        return nn.MlpSpec((self.hidden[-1], self.latent_dim), ("identity",))

    def to_dict(self) -> dict:
        return {"input_dim": self.input_dim, "hidden": list(self.hidden), "latent_dim": self.latent_dim}


@dataclass
class VaeParams:
    arch: VaeArch
    encoder: list
    mu_head: nn.DenseLayer
    logvar_head: nn.DenseLayer
    decoder: list

    def arrays(self) -> list[np.ndarray]:
        """All parameters in checkpoint order: encoder, mu head, logvar head, decoder; (W, b) per layer."""
        return (nn.flatten_layers(self.encoder) + nn.flatten_layers([self.mu_head, self.logvar_head])
                + nn.flatten_layers(self.decoder))

    @classmethod
    def from_arrays(cls, arch: VaeArch, arrays: Sequence[np.ndarray]) -> "VaeParams":
        n_enc = 2 * arch.encoder_spec.n_layers
        n_dec = 2 * arch.decoder_spec.n_layers
        if len(arrays) != n_enc + 4 + n_dec:
            raise ArchitectureError(f"expected {n_enc + 4 + n_dec} arrays, got {len(arrays)}")
        enc = nn.layers_from_flat(arrays[:n_enc])
        mu_head, lv_head = nn.layers_from_flat(arrays[n_enc:n_enc + 4])
        dec = nn.layers_from_flat(arrays[n_enc + 4:])
        params = cls(arch, enc, mu_head, lv_head, dec)
        params.check()
        return params

    def check(self) -> None:
        try:
            nn._check_layers(self.arch.encoder_spec, self.encoder)
            nn._check_layers(self.arch.head_spec, [self.mu_head])
            nn._check_layers(self.arch.head_spec, [self.logvar_head])
            nn._check_layers(self.arch.decoder_spec, self.decoder)
        except ValueError as exc:
            raise ArchitectureError(str(exc)) from None


@dataclass(frozen=True)
class LatentCode:
    mu: np.ndarray
    logvar: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 5e-4
    beta: float = 20.0
    c: float = 1.0
    batch_size: int = 128
    seed: int = 0

    def __post_init__(self):
        if int(self.epochs) < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not self.beta >= 0:
            raise ValueError("beta must be >= 0")
        if not self.c > 0:
            raise ValueError("c must be > 0")
        if int(self.batch_size) < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrainHistory:
    total: list = field(default_factory=list)
    recon: list = field(default_factory=list)
    kl: list = field(default_factory=list)

    def __len__(self):
        return len(self.total)


INPUT_INIT_SCALE = 0.1


def init_encoder(spec: nn.MlpSpec, rng: np.random.Generator) -> list:
    """He-uniform trunk with the input layer shrunk by ``INPUT_INIT_SCALE``.

    Input directions the training windows never excite keep their initial
    weights, so a small start keeps the encoder quiet on unseen noise.
    """
    layers = nn.init_mlp(spec, rng)
    layers[0] = nn.DenseLayer(layers[0].weights * INPUT_INIT_SCALE, layers[0].bias)
    return layers


def init_params(arch: VaeArch, seed) -> VaeParams:
    rng = np.random.default_rng(seed)
    enc = init_encoder(arch.encoder_spec, rng)
    mu_head = nn.init_mlp(arch.head_spec, rng)[0]
    # start every posterior at unit variance
    lv_head = nn.DenseLayer(np.zeros((arch.latent_dim, arch.hidden[-1])), np.zeros(arch.latent_dim))
    dec = nn.init_mlp(arch.decoder_spec, rng)
    return VaeParams(arch, enc, mu_head, lv_head, dec)


def _as_input(params: VaeParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.arch.input_dim:
        raise DataError(f"window length {x.shape[-1]} != {params.arch.input_dim}")
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite input window")
    return x


def encode(params: VaeParams, x) -> LatentCode:
    """Deterministic encoder. ``x`` may be one window or a (n, 256) batch."""
    x = _as_input(params, x)
    h = nn.mlp_forward(params.arch.encoder_spec, params.encoder, x)[-1]
    return LatentCode(nn.dense_forward(params.mu_head, h), nn.dense_forward(params.logvar_head, h))


def reparameterize(code: LatentCode, eps) -> np.ndarray:
    eps = np.asarray(eps, dtype=np.float64)
    if eps.shape[-1] != code.mu.shape[-1]:
        raise ValueError("eps length must equal the latent dimension")
    return code.mu + np.exp(0.5 * code.logvar) * eps


def decode(params: VaeParams, z) -> np.ndarray:
    return nn.mlp_forward(params.arch.decoder_spec, params.decoder, z)[-1]


def kl_divergence(code: LatentCode):
    """KL(N(mu, diag exp(logvar)) || N(0, I)); summed over the last axis."""
    mu, lv = np.asarray(code.mu), np.asarray(code.logvar)
    # expm1 keeps exp(lv) - 1 - lv >= 0 when lv is tiny
    return 0.5 * np.sum(mu**2 + (np.expm1(lv) - lv), axis=-1)


def vae_loss(x, xhat, code: LatentCode, beta: float, c: float):
    """Per-sample (total, recon_term, kl_term); batches give arrays."""
    if c <= 0 or beta < 0:
        raise ValueError("need c > 0 and beta >= 0")
    x, xhat = np.asarray(x, dtype=np.float64), np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {xhat.shape}")
    recon = np.sum((x - xhat) ** 2, axis=-1) / (2.0 * c)
    kl = kl_divergence(code)
    return recon + beta * kl, recon, kl


def loss_and_grads(params: VaeParams, x: np.ndarray, eps: np.ndarray, beta: float, c: float):
    """Batch-mean loss terms and the gradient of the total with respect to ``params.arrays()``."""
    x = np.atleast_2d(x)
    eps = np.atleast_2d(eps)
    n = x.shape[0]
    arch = params.arch
    enc_acts = nn.mlp_forward(arch.encoder_spec, params.encoder, x)
    h = enc_acts[-1]
    mu = nn.dense_forward(params.mu_head, h)
    lv = nn.dense_forward(params.logvar_head, h)
    std = np.exp(0.5 * lv)
    z = mu + std * eps
    dec_acts = nn.mlp_forward(arch.decoder_spec, params.decoder, z)
    xhat = dec_acts[-1]

    total, recon, kl = vae_loss(x, xhat, LatentCode(mu, lv), beta, c)

    g_xhat = (xhat - x) / (c * n)
    dec_grads, g_z = nn.mlp_backward(arch.decoder_spec, params.decoder, dec_acts, g_xhat)
    g_mu = g_z + beta * mu / n
    g_lv = g_z * 0.5 * std * eps + beta * 0.5 * np.expm1(lv) / n
    head = nn.MlpSpec((h.shape[1], mu.shape[1]), ("identity",))
    mu_grads, g_h1 = nn.mlp_backward(head, [params.mu_head], [h, mu], g_mu)
    lv_grads, g_h2 = nn.mlp_backward(head, [params.logvar_head], [h, lv], g_lv)
    enc_grads, _ = nn.mlp_backward(arch.encoder_spec, params.encoder, enc_acts, g_h1 + g_h2)

    grads = []
    for group in (enc_grads, mu_grads, lv_grads, dec_grads):
        for dw, db in group:
            grads.extend([dw, db])
    return float(total.mean()), float(recon.mean()), float(kl.mean()), grads


def _epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(epoch)]))


def check_training_labels(windows: Sequence[SignalWindow]) -> None:
    if len(windows) == 0:
        raise DataError("no training windows")
    bad = sorted({w.label for w in windows} - {"normal", "degraded"})
    if bad:
        raise ContaminationError(f"training windows must be normal or degraded, found {bad}")


def fit_adam(params_list, grad_fn, n_samples: int, config: TrainConfig, on_epoch=None):
    """Shared mini-batch Adam loop. ``grad_fn(params_list, idx, rng)`` returns (terms, grads)."""
    state = nn.AdamState.zeros_like(params_list)
    for epoch in range(int(config.epochs)):
        rng = _epoch_rng(config.seed, epoch)
        order = rng.permutation(n_samples)
        sums = None
        for start in range(0, n_samples, int(config.batch_size)):
            idx = order[start:start + int(config.batch_size)]
            terms, grads = grad_fn(params_list, idx, rng)
            params_list, state = nn.adam_step(params_list, grads, state, config.learning_rate)
            w = np.array(terms) * len(idx)
            sums = w if sums is None else sums + w
        if on_epoch is not None:
            on_epoch(epoch, sums / n_samples)
    return params_list


def train(windows: Sequence[SignalWindow], config: TrainConfig = TrainConfig(),
          arch: VaeArch | None = None) -> tuple[VaeParams, TrainHistory]:
    """Fit a VAE on normal and degraded windows with mini-batch Adam."""
    check_training_labels(windows)
    x = stack(windows)
    arch = arch or VaeArch(input_dim=x.shape[1])
    if x.shape[1] != arch.input_dim:
        raise DataError(f"window length {x.shape[1]} != {arch.input_dim}")
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite training data")
    params = init_params(arch, config.seed)
    history = TrainHistory()

    def grad_fn(arrays, idx, rng):
        p = VaeParams.from_arrays(arch, arrays)
        eps = rng.standard_normal((len(idx), arch.latent_dim))
        total, recon, kl, grads = loss_and_grads(p, x[idx], eps, config.beta, config.c)
        return (total, recon, kl), grads

    def record(epoch, means):
        history.total.append(float(means[0]))
        history.recon.append(float(means[1]))
        history.kl.append(float(means[2]))

    arrays = fit_adam(params.arrays(), grad_fn, len(x), config, record)
    return VaeParams.from_arrays(arch, arrays), history


# ---------------------------------------------------------------------------
# checkpoint format
#
#   magic      6 bytes  b"LHVAE\0"
#   version    uint32 little-endian
#   hlen       uint64 little-endian, length of the header
#   header     UTF-8 JSON (sorted keys): arch, config, norm, extra, arrays
#              [{shape}], payload_sha256
#   payload    every array as little-endian float64, C order, in
#              VaeParams.arrays() order
# ---------------------------------------------------------------------------

def save_checkpoint(path, params: VaeParams, config: TrainConfig, norm: NormStats | None = None,
                    extra: dict | None = None) -> None:
    arrays = [np.ascontiguousarray(a, dtype="<f8") for a in params.arrays()]
    payload = b"".join(a.tobytes() for a in arrays)
    header = {
        "arch": params.arch.to_dict(),
        "config": asdict(config),
        "norm": None if norm is None else {"mean": norm.mean, "std": norm.std},
        "extra": extra or {},
        "arrays": [list(a.shape) for a in arrays],
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(FORMAT_MAGIC)
        fh.write(struct.pack("<IQ", FORMAT_VERSION, len(hbytes)))
        fh.write(hbytes)
        fh.write(payload)


@dataclass
class Checkpoint:
    params: VaeParams
    config: TrainConfig
    norm: NormStats | None
    extra: dict


def load_checkpoint(path, latent_dim: int | None = LATENT_DIM) -> Checkpoint:
    """Read a checkpoint written by :func:`save_checkpoint`.

    ``latent_dim`` is the latent size the caller expects; pass ``None`` to accept any.
    """
    blob = Path(path).read_bytes()
    head = len(FORMAT_MAGIC) + 12
    if len(blob) < head or blob[:len(FORMAT_MAGIC)] != FORMAT_MAGIC:
        raise ArchitectureError(f"{path} is not a latenthealth checkpoint")
    version, hlen = struct.unpack("<IQ", blob[len(FORMAT_MAGIC):head])
    if version != FORMAT_VERSION:
        raise ArchitectureError(f"unsupported checkpoint version {version}")
    if len(blob) < head + hlen:
        raise ArchitectureError("truncated checkpoint header")
    try:
        header = json.loads(blob[head:head + hlen].decode("utf-8"))
    except ValueError:
        raise ArchitectureError("corrupt checkpoint header") from None
    payload = blob[head + hlen:]

    arch = VaeArch(header["arch"]["input_dim"], tuple(header["arch"]["hidden"]),
                   header["arch"]["latent_dim"])
    if latent_dim is not None and arch.latent_dim != latent_dim:
        raise ArchitectureError(f"checkpoint latent dimension {arch.latent_dim} != {latent_dim}")
    shapes = [tuple(s) for s in header["arrays"]]
    expected = sum(int(np.prod(s)) for s in shapes) * 8
    if len(payload) != expected:
        raise ArchitectureError(f"truncated checkpoint payload ({len(payload)} of {expected} bytes)")
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        raise ArchitectureError("checkpoint payload checksum mismatch")
    arrays, pos = [], 0
    for s in shapes:
        size = int(np.prod(s))
        a = np.frombuffer(payload, dtype="<f8", count=size, offset=pos * 8).reshape(s).astype(np.float64)
        pos += size
        if not np.all(np.isfinite(a)):
            raise ArchitectureError("checkpoint contains non-finite parameters")
        arrays.append(a)
    params = VaeParams.from_arrays(arch, arrays)
    config = TrainConfig(**header["config"])
    norm = None if header["norm"] is None else NormStats(**header["norm"])
    return Checkpoint(params, config, norm, header.get("extra", {}))
