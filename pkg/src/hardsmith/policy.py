"""Noise-to-graph policy network and its REINFORCE / Adam update.

A fully connected network maps Gaussian noise ``z`` to one logit per vertex
pair; a sigmoid turns the logits into edge probabilities ``P`` and each edge
of the sampled graph is an independent Bernoulli(``P_k``) draw. Training
ascends ``r * sum_k [A_k log P_k + (1 - A_k) log(1 - P_k)]``.

Weights are stored ``(fan_in, fan_out)`` so a layer computes ``x @ W + b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _adam
from .graph import Graph, num_pairs

PROB_EPS = 1e-7
BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8


class ShapeError(ValueError):
    pass


def default_layer_dims(n: int) -> tuple[int, ...]:
    return (10, 100, 500, num_pairs(n))


@dataclass(frozen=True)
class PolicyConfig:
    """Shape and optimiser settings of a policy.

    ``layer_dims`` defaults to ``(10, 100, 500, n(n-1)/2)``. ``dtype`` picks
    the floating type of parameters and Adam state; float32 halves memory,
    which matters from a few hundred vertices on.
    """

    n: int
    layer_dims: tuple[int, ...] | None = None
    learning_rate: float = 1e-4
    init_edge_prob: float = 0.5
    dtype: str = "float64"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"policy needs n >= 2, got {self.n}")
        dims = tuple(self.layer_dims) if self.layer_dims else default_layer_dims(self.n)
        object.__setattr__(self, "layer_dims", dims)
        if len(dims) < 2:
            raise ValueError("layer_dims needs an input and an output size")
        if dims[-1] != num_pairs(self.n):
            raise ValueError(f"output dim {dims[-1]} != n(n-1)/2 = {num_pairs(self.n)}")
        if not 0.0 < self.init_edge_prob < 1.0:
            raise ValueError(f"init_edge_prob must lie in (0, 1), got {self.init_edge_prob}")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype!r}")

    @property
    def noise_dim(self) -> int:
        return self.layer_dims[0]


@dataclass
class PolicyParams:
    """Network weights plus Adam state. Updated in place by :func:`adam_step`."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    m_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_weights: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0
    layer_dims: tuple[int, ...] = field(default=())

    @property
    def n(self) -> int:
        m = self.layer_dims[-1]
        return int(round((1 + math.sqrt(1 + 8 * m)) / 2))

    @property
    def dtype(self) -> np.dtype:
        return self.weights[0].dtype

    def arrays(self) -> list[np.ndarray]:
        """All arrays in checkpoint order: per layer W, b, mW, mb, vW, vb."""
        out = []
        for k in range(len(self.weights)):
            out += [self.weights[k], self.biases[k], self.m_weights[k],
                    self.m_biases[k], self.v_weights[k], self.v_biases[k]]
        return out

    def copy(self) -> PolicyParams:
        return PolicyParams(*([a.copy() for a in group] for group in (
            self.weights, self.biases, self.m_weights, self.m_biases,
            self.v_weights, self.v_biases)), step=self.step, layer_dims=self.layer_dims)

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


def logit(p: float) -> float:
    return -math.log(1.0 / p - 1.0)


def init_params(cfg: PolicyConfig, rng: np.random.Generator) -> PolicyParams:
    """Xavier-uniform weights, zero hidden biases, output bias ``logit(p*)``."""
    dtype = np.dtype(cfg.dtype)
    dims = cfg.layer_dims
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        # drawn in the target dtype to avoid a float64 temporary at large n
        w = rng.random((fan_in, fan_out), dtype=dtype)
        w *= 2 * limit
        w -= limit
        weights.append(w)
        biases.append(np.zeros(fan_out, dtype=dtype))
    biases[-1][:] = logit(cfg.init_edge_prob)
    zeros = lambda arrs: [np.zeros_like(a) for a in arrs]  # noqa: E731
    return PolicyParams(weights, biases, zeros(weights), zeros(biases),
                        zeros(weights), zeros(biases), 0, dims)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _forward(params: PolicyParams, z) -> tuple[list[np.ndarray], np.ndarray]:
    z = np.asarray(z, dtype=params.dtype)
    if z.shape != (params.layer_dims[0],):
        raise ShapeError(f"noise must have shape ({params.layer_dims[0]},), got {z.shape}")
    acts = [z]
    h = z
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w + b
        if k < last:
            np.maximum(h, 0, out=h)
            acts.append(h)
    probs = _sigmoid(h)
    np.clip(probs, PROB_EPS, 1 - PROB_EPS, out=probs)
    return acts, probs


def forward(params: PolicyParams, z) -> np.ndarray:
    """Edge probabilities for noise ``z``, clipped to ``[1e-7, 1 - 1e-7]``."""
    return _forward(params, z)[1]


def sample_noise(params_or_cfg, rng: np.random.Generator) -> np.ndarray:
    d0 = params_or_cfg.layer_dims[0]
    return rng.standard_normal(d0)


def sample_graph(probs: np.ndarray, rng: np.random.Generator) -> Graph:
    m = probs.shape[0]
    n = int(round((1 + math.sqrt(1 + 8 * m)) / 2))
    return Graph(n, rng.random(m) < probs)


def log_likelihood(probs: np.ndarray, graph: Graph) -> float:
    p = np.clip(probs.astype(np.float64), PROB_EPS, 1 - PROB_EPS)
    a = graph.edges
    return float(np.sum(np.where(a, np.log(p), np.log1p(-p))))


def objective(params: PolicyParams, z, graph: Graph, reward: float) -> float:
    """``reward * log Pr[graph | z]`` - the quantity REINFORCE ascends."""
    return reward * log_likelihood(forward(params, z), graph)


@dataclass
class Gradient:
    """Gradient of :func:`objective` in factored form.

    For layer ``k`` the weight gradient is ``outer(inputs[k], deltas[k])`` and
    the bias gradient is ``deltas[k]``.
    """

    inputs: list[np.ndarray]
    deltas: list[np.ndarray]

    def weight(self, k: int) -> np.ndarray:
        return np.outer(self.inputs[k], self.deltas[k])

    def bias(self, k: int) -> np.ndarray:
        return self.deltas[k]

    def dense(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        return ([self.weight(k) for k in range(len(self.deltas))],
                [self.bias(k) for k in range(len(self.deltas))])


def reinforce_grad(params: PolicyParams, z, graph: Graph, reward: float) -> Gradient:
    """Backpropagated gradient of ``reward * log Pr[graph | z]``.

    At the output the sigmoid-Bernoulli pair collapses to
    ``reward * (A - P)`` per logit.
    """
    if not math.isfinite(reward):
        raise FloatingPointError(f"non-finite reward {reward}")
    acts, probs = _forward(params, z)
    if graph.edges.shape != probs.shape:
        raise ShapeError(f"graph has {graph.edges.shape[0]} edge bits, policy outputs {probs.shape[0]}")
    delta = (graph.edges.astype(probs.dtype) - probs) * probs.dtype.type(reward)
    deltas = [delta]
    for k in range(len(params.weights) - 1, 0, -1):
        delta = params.weights[k] @ delta
        delta *= acts[k] > 0
        deltas.append(delta)
    deltas.reverse()
    return Gradient(acts, deltas)


def adam_step(params: PolicyParams, grad: Gradient | tuple, lr: float) -> PolicyParams:
    """One Adam ascent step, applied in place; returns ``params``.

    ``grad`` is either a factored :class:`Gradient` (fast path) or a pair
    ``(weight_grads, bias_grads)`` of dense arrays.
    """
    b1, b2, step, ic2, eps = _adam_scalars(params, lr)
    one = params.dtype.type(1)
    if isinstance(grad, Gradient):
        for k in range(len(params.weights)):
            x = grad.inputs[k].astype(params.dtype, copy=False)
            d = grad.deltas[k].astype(params.dtype, copy=False)
            _adam.adam_outer(params.weights[k], params.m_weights[k], params.v_weights[k],
                             x, d, b1, b2, step, ic2, eps)
            _adam.adam_row(params.biases[k], params.m_biases[k], params.v_biases[k],
                           one, d, b1, b2, step, ic2, eps)
    else:
        gw, gb = grad
        for k in range(len(params.weights)):
            _adam.adam_dense(params.weights[k], params.m_weights[k], params.v_weights[k],
                             gw[k], BETA1, BETA2, step, ic2, ADAM_EPS)
            _adam.adam_dense(params.biases[k], params.m_biases[k], params.v_biases[k],
                             gb[k], BETA1, BETA2, step, ic2, ADAM_EPS)
    return params


def forward_pass(params: PolicyParams, z) -> tuple[list[np.ndarray], np.ndarray]:
    """Layer inputs and edge probabilities; reusable by :func:`reinforce_update`."""
    return _forward(params, z)


def _adam_scalars(params: PolicyParams, lr: float):
    params.step += 1
    t = params.step
    cast = params.dtype.type
    return (cast(BETA1), cast(BETA2), cast(lr / (1 - BETA1 ** t)),
            cast(1 / (1 - BETA2 ** t)), cast(ADAM_EPS))


def reinforce_update(params: PolicyParams, z, graph: Graph, reward: float, lr: float,
                     cache: tuple[list[np.ndarray], np.ndarray] | None = None
                     ) -> PolicyParams:
    """REINFORCE gradient and Adam ascent step in one sweep per layer.

    Equivalent to ``adam_step(params, reinforce_grad(...), lr)`` up to
    floating-point summation order. Each layer is updated while its old
    weights are read for backpropagation, so the large output layer is
    traversed once. ``cache`` is the :func:`forward_pass` result for
    ``(params, z)`` when the caller already has it.
    """
    if not math.isfinite(reward):
        raise FloatingPointError(f"non-finite reward {reward}")
    acts, probs = cache if cache is not None else _forward(params, z)
    if graph.edges.shape != probs.shape:
        raise ShapeError(f"graph has {graph.edges.shape[0]} edge bits, policy outputs {probs.shape[0]}")
    b1, b2, step, ic2, eps = _adam_scalars(params, lr)
    one = params.dtype.type(1)
    delta = (graph.edges.astype(probs.dtype) - probs) * probs.dtype.type(reward)
    for k in range(len(params.weights) - 1, -1, -1):
        x = acts[k].astype(params.dtype, copy=False)
        _adam.adam_row(params.biases[k], params.m_biases[k], params.v_biases[k],
                       one, delta, b1, b2, step, ic2, eps)
        if k == 0:
            _adam.adam_outer(params.weights[0], params.m_weights[0], params.v_weights[0],
                             x, delta, b1, b2, step, ic2, eps)
            break
        back = np.empty(x.shape[0], dtype=params.dtype)
        _adam.adam_outer_back(params.weights[k], params.m_weights[k], params.v_weights[k],
                              x, delta, back, b1, b2, step, ic2, eps)
        back *= x > 0
        delta = back
    return params


def sample_graphs(params: PolicyParams, count: int, rng: np.random.Generator) -> list[Graph]:
    """``count`` independent draws, each with fresh noise."""
    return [sample_graph(forward(params, sample_noise(params, rng)), rng) for _ in range(count)]


def param_vector(params: PolicyParams) -> np.ndarray:
    """Flatten weights and biases (no Adam state), layer by layer."""
    parts = []
    for w, b in zip(params.weights, params.biases):
        parts += [w.ravel(), b.ravel()]
    return np.concatenate(parts)


def set_param_vector(params: PolicyParams, vec: Sequence[float]) -> None:
    vec = np.asarray(vec)
    pos = 0
    for w, b in zip(params.weights, params.biases):
        for arr in (w, b):
            arr.ravel()[:] = vec[pos:pos + arr.size]
            pos += arr.size
