"""Small fully connected networks in float64 numpy.

Forward pass with cached activations, exact backpropagation, ADAM and the
soft target update. Hidden layers are ReLU; the head is linear or softmax.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

ACTIVATIONS = ("relu", "linear", "softmax")


class ShapeError(ValueError):
    pass


class StaleCacheError(RuntimeError):
    pass


@dataclass
class MlpParams:
    sizes: tuple[int, ...]
    weights: list[np.ndarray]  # weights[l] has shape (sizes[l], sizes[l+1])
    biases: list[np.ndarray]
    activations: tuple[str, ...]
    version: int = 0

    def __post_init__(self):
        n = len(self.sizes) - 1
        if n < 1 or len(self.weights) != n or len(self.biases) != n or len(self.activations) != n:
            raise ShapeError("need one weight, bias and activation per layer")
        for l in range(n):
            if self.weights[l].shape != (self.sizes[l], self.sizes[l + 1]):
                raise ShapeError(f"layer {l}: weight shape {self.weights[l].shape}")
            if self.biases[l].shape != (self.sizes[l + 1],):
                raise ShapeError(f"layer {l}: bias shape {self.biases[l].shape}")
            if self.activations[l] not in ACTIVATIONS:
                raise ShapeError(f"unknown activation {self.activations[l]!r}")
        if "softmax" in self.activations[:-1]:
            raise ShapeError("softmax is only allowed on the output layer")

    def arrays(self) -> list[np.ndarray]:
        return [a for pair in zip(self.weights, self.biases) for a in pair]

    def copy(self) -> "MlpParams":
        return MlpParams(self.sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases],
                         self.activations)

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays())


def init_mlp(sizes: Sequence[int], rng: np.random.Generator, head: str = "linear") -> MlpParams:
    """He-uniform weights, zero biases, ReLU hidden layers."""
    sizes = tuple(int(s) for s in sizes)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    acts = ("relu",) * (len(sizes) - 2) + (head,)
    return MlpParams(sizes, weights, biases, acts)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class Cache:
    inputs: list[np.ndarray]   # input to each layer
    pre: list[np.ndarray]      # pre-activations
    output: np.ndarray
    version: int
    params_id: int


def forward(params: MlpParams, x) -> tuple[np.ndarray, Cache]:
    """Accepts a single vector or a batch (rows); output has the same rank."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.ndim != 2 or h.shape[1] != params.sizes[0]:
        raise ShapeError(f"expected input width {params.sizes[0]}, got shape {x.shape}")
    inputs, pre = [], []
    for W, b, act in zip(params.weights, params.biases, params.activations):
        inputs.append(h)
        z = h @ W + b
        pre.append(z)
        if act == "relu":
            h = np.maximum(z, 0.0)
        elif act == "softmax":
            h = softmax(z)
        else:
            h = z
    out = h[0] if single else h
    return out, Cache(inputs, pre, h, params.version, id(params))


def backward(params: MlpParams, cache: Cache, grad_out, wrt_logits: bool = False) -> list[np.ndarray]:
    """Gradients ``[dW0, db0, dW1, db1, ...]`` of a scalar loss, summed over the batch.

    ``grad_out`` is the loss gradient w.r.t. the network output. For a softmax
    head, ``wrt_logits=True`` means it is already w.r.t. the pre-softmax logits.
    """
    if cache.params_id != id(params) or cache.version != params.version:
        raise StaleCacheError("cache does not belong to the current parameters")
    g = np.asarray(grad_out, dtype=np.float64)
    if g.ndim == 1:
        g = g[None, :]
    if g.shape != cache.output.shape:
        raise ShapeError(f"output gradient shape {g.shape} != output shape {cache.output.shape}")
    grads: list[np.ndarray] = []
    for l in reversed(range(len(params.weights))):
        act = params.activations[l]
        if act == "relu":
            g = g * (cache.pre[l] > 0)
        elif act == "softmax" and not wrt_logits:
            p = cache.output
            g = p * (g - (g * p).sum(axis=1, keepdims=True))
        grads.append(g.sum(axis=0))
        grads.append(cache.inputs[l].T @ g)
        if l:
            g = g @ params.weights[l].T
    return grads[::-1]


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0

    @classmethod
    def for_params(cls, params: MlpParams, **hyper) -> "AdamState":
        return cls([np.zeros_like(a) for a in params.arrays()],
                   [np.zeros_like(a) for a in params.arrays()], **hyper)


def adam_step(params: MlpParams, state: AdamState, grads: Sequence[np.ndarray]) -> tuple[MlpParams, AdamState]:
    """One bias-corrected ADAM update, in place."""
    arrays = params.arrays()
    if len(grads) != len(arrays) or any(g.shape != a.shape for g, a in zip(grads, arrays)):
        raise ShapeError("gradients do not match parameter shapes")
    for g in grads:
        if not np.isfinite(g).all():
            raise FloatingPointError("non-finite gradient passed to adam_step")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    for a, g, m, v in zip(arrays, grads, state.m, state.v):
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        a -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    params.version += 1
    return params, state


def soft_update(target: MlpParams, online: MlpParams, alpha: float) -> MlpParams:
    """``target <- alpha * target + (1 - alpha) * online``, in place."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if target.sizes != online.sizes:
        raise ShapeError("target and online networks differ in shape")
    for t, o in zip(target.arrays(), online.arrays()):
        t *= alpha
        t += (1.0 - alpha) * o
    target.version += 1
    return target


# Checkpoint text layout:
#   line 1: "mlp v1"
#   line 2: layer sizes, space separated
#   line 3: activations, space separated
#   then per layer: weights row-major (one matrix row per line), then the bias on one line.
# Values use repr() so a round trip is exact.

def save_mlp(params: MlpParams, path) -> None:
    lines = ["mlp v1", " ".join(map(str, params.sizes)), " ".join(params.activations)]
    for W, b in zip(params.weights, params.biases):
        lines.extend(" ".join(repr(float(x)) for x in row) for row in W)
        lines.append(" ".join(repr(float(x)) for x in b))
    Path(path).write_text("\n".join(lines) + "\n")


def load_mlp(path) -> MlpParams:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "mlp v1":
        raise ValueError(f"{path}: not an mlp v1 checkpoint")
    sizes = tuple(int(s) for s in lines[1].split())
    acts = tuple(lines[2].split())
    pos = 3
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = np.array([[float(x) for x in lines[pos + r].split()] for r in range(fan_in)]).reshape(fan_in, fan_out)
        pos += fan_in
        b = np.array([float(x) for x in lines[pos].split()]).reshape(fan_out)
        pos += 1
        weights.append(W)
        biases.append(b)
    return MlpParams(sizes, weights, biases, acts)
