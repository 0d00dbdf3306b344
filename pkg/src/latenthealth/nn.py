"""Dense-network numerics: affine layers, relu MLPs, backprop and Adam.

Everything works on float64 arrays. Inputs may be a single vector of shape
``(in_dim,)`` or a batch of row vectors of shape ``(n, in_dim)``; outputs keep
the same leading shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError

ACTIVATIONS = ("relu", "identity")


@dataclass
class DenseLayer:
    """Affine map ``x -> weights @ x + bias``."""

    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.ndim != 1:
            raise ShapeError("weights must be 2-D and bias 1-D")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ShapeError(
                f"bias length {self.bias.shape[0]} != weight rows {self.weights.shape[0]}"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("layer parameters must be finite")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class MlpSpec:
    layer_sizes: tuple[int, ...]
    activations: tuple[str, ...] = field(default=())

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s <= 0 for s in sizes):
            raise ValueError("need at least two positive layer sizes")
        acts = tuple(self.activations) or ("relu",) * (len(sizes) - 1)
        if len(acts) != len(sizes) - 1:
            raise ValueError("one activation per layer required")
        bad = [a for a in acts if a not in ACTIVATIONS]
        if bad:
            raise ValueError(f"unknown activation(s): {bad}")
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "activations", acts)

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params], 0)


def relu(x):
    x = np.asarray(x, dtype=np.float64)
    # strict comparison keeps the subgradient at 0 equal to 0
    return np.where(x > 0.0, x, 0.0)


def _activate(z: np.ndarray, name: str) -> np.ndarray:
    return relu(z) if name == "relu" else z


def dense_forward(layer: DenseLayer, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != layer.in_dim:
        raise ShapeError(f"input length {x.shape[-1]} != layer in_dim {layer.in_dim}")
    return x @ layer.weights.T + layer.bias


def init_mlp(spec: MlpSpec, rng: np.random.Generator) -> list[DenseLayer]:
    """Uniform weights scaled by fan-in (He for relu layers, Glorot for identity), zero biases."""
    layers = []
    for fan_in, fan_out, act in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:], spec.activations):
        if act == "relu":
            limit = np.sqrt(6.0 / fan_in)
        else:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        layers.append(DenseLayer(w, np.zeros(fan_out)))
    return layers


def _check_layers(spec: MlpSpec, layers: Sequence[DenseLayer]) -> None:
    if len(layers) != spec.n_layers:
        raise ShapeError(f"spec has {spec.n_layers} layers, got {len(layers)}")
    for i, layer in enumerate(layers):
        expected = (spec.layer_sizes[i + 1], spec.layer_sizes[i])
        if layer.weights.shape != expected:
            raise ShapeError(f"layer {i} has shape {layer.weights.shape}, expected {expected}")


def mlp_forward(spec: MlpSpec, layers: Sequence[DenseLayer], x) -> list[np.ndarray]:
    """Run the network and return ``[input, act_1, ..., act_L]``."""
    _check_layers(spec, layers)
    a = np.asarray(x, dtype=np.float64)
    if a.shape[-1] != spec.layer_sizes[0]:
        raise ShapeError(f"input length {a.shape[-1]} != {spec.layer_sizes[0]}")
    acts = [a]
    for layer, name in zip(layers, spec.activations):
        a = _activate(dense_forward(layer, a), name)
        acts.append(a)
    return acts


def mlp_backward(spec: MlpSpec, layers: Sequence[DenseLayer], activations, output_gradient):
    """Backpropagate ``output_gradient`` through the network.

    Returns ``(grads, input_gradient)`` where ``grads[i] = (dW_i, db_i)``.
    For batched activations the parameter gradients are summed over rows.
    """
    _check_layers(spec, layers)
    if len(activations) != spec.n_layers + 1:
        raise ShapeError("activations do not match the network depth")
    delta = np.asarray(output_gradient, dtype=np.float64)
    if delta.shape != activations[-1].shape:
        raise ShapeError(f"output gradient shape {delta.shape} != {activations[-1].shape}")

    grads = [None] * spec.n_layers
    for i in range(spec.n_layers - 1, -1, -1):
        if spec.activations[i] == "relu":
            delta = delta * (activations[i + 1] > 0.0)
        a_prev = activations[i]
        if delta.ndim == 1:
            dw = np.outer(delta, a_prev)
            db = delta.copy()
        else:
            dw = delta.T @ a_prev
            db = delta.sum(axis=0)
        grads[i] = (dw, db)
        delta = delta @ layers[i].weights
    return grads, delta


def adam_step(params, grads, state: AdamState, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam update. Returns new ``(params, state)``; inputs are not mutated."""
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
        raise ValueError("beta1 and beta2 must lie in [0, 1)")
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError("params, grads and optimizer state differ in length")
    t = state.t + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.shape or m.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradient entries")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(new_m, new_v, t)


def finite_difference_gradient(loss_fn: Callable, params, h: float = 1e-4):
    """Central-difference gradient of a scalar ``loss_fn``.

    ``params`` is an array or a list of arrays; ``loss_fn`` receives the same
    structure. The returned estimate has the same structure as ``params``.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    single = isinstance(params, np.ndarray) or np.isscalar(params)
    plist = [np.array(params, dtype=np.float64)] if single else [
        np.array(p, dtype=np.float64) for p in params
    ]

    def call():
        return float(loss_fn(plist[0] if single else plist))

    out = []
    for p in plist:
        g = np.zeros_like(p)
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            up = call()
            flat[j] = orig - h
            down = call()
            flat[j] = orig
            gflat[j] = (up - down) / (2.0 * h)
        out.append(g)
    return out[0] if single else out


def flatten_layers(layers: Sequence[DenseLayer]) -> list[np.ndarray]:
    out = []
    for layer in layers:
        out.extend([layer.weights, layer.bias])
    return out


def layers_from_flat(arrays: Sequence[np.ndarray]) -> list[DenseLayer]:
    if len(arrays) % 2:
        raise ShapeError("expected (weights, bias) pairs")
    return [DenseLayer(arrays[i], arrays[i + 1]) for i in range(0, len(arrays), 2)]
