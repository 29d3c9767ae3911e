"""Domain types and small differentiable classifiers.

Two architectures are supported, both with hand-written gradients with
respect to the parameters and the input:

* ``softmax_linear`` -- logits = W x + b
* ``mlp1``           -- one hidden layer, tanh by default (relu optional)

Parameters live in a single flat vector so the training loop can treat
every model identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, DimensionMismatchError, InvalidDistributionError

ARCH_KINDS = ("softmax_linear", "mlp1")
ACTIVATIONS = ("tanh", "relu")

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Sample:
    """One labelled point: features inside the domain box, integer label."""

    x: np.ndarray
    y: int

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.x.ndim != 1:
            raise DimensionMismatchError("sample features must be a 1-d vector")


@dataclass
class Dataset:
    samples: list
    dim: int
    num_classes: int
    domain_box: tuple = (0.0, 1.0)

    def __post_init__(self):
        if not self.samples:
            raise ConfigError("dataset must be nonempty")
        lo, hi = self.domain_box
        for s in self.samples:
            if s.x.shape != (self.dim,):
                raise DimensionMismatchError(
                    f"sample has dim {s.x.shape[0]}, dataset expects {self.dim}")
            if not (0 <= s.y < self.num_classes):
                raise ConfigError(f"label {s.y} outside 0..{self.num_classes - 1}")
            if np.any(s.x < lo - 1e-12) or np.any(s.x > hi + 1e-12):
                raise ConfigError("sample features leave the domain box")

    def __len__(self):
        return len(self.samples)

    def features(self):
        return np.stack([s.x for s in self.samples])

    def labels(self):
        return np.array([s.y for s in self.samples], dtype=int)


@dataclass
class DiscreteDistribution:
    """Finite support plus probability weights.

    ``support`` may hold raw vectors or indices into a fixed finite space;
    the metric code only ever consumes the weights together with a cost
    matrix aligned to the support.
    """

    support: list
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.support) != len(self.weights):
            raise InvalidDistributionError("support and weights differ in length")
        if np.any(self.weights < -WEIGHT_SUM_TOL):
            raise InvalidDistributionError("negative weight")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise InvalidDistributionError(
                f"weights sum to {self.weights.sum()}, expected 1")

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class AmbiguityParams:
    """(eps, gamma, p, tau, M): adversarial budget, statistical budget,
    Wasserstein order, temperature and label-shift penalty."""

    eps: float
    gamma: float
    p: int = 1
    tau: float = 1.0
    M: float = 1e6

    def __post_init__(self):
        if self.eps < 0:
            raise ConfigError("eps must be >= 0")
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.p < 1:
            raise ConfigError("p must be >= 1")
        if self.tau <= 0:
            raise ConfigError("tau must be > 0")
        if self.M <= 0:
            raise ConfigError("M must be > 0")


@dataclass(frozen=True)
class Architecture:
    kind: str
    dim: int
    num_classes: int
    hidden: int = 0
    activation: str = "tanh"

    def __post_init__(self):
        if self.kind not in ARCH_KINDS:
            raise ConfigError(f"unknown architecture {self.kind!r}")
        if self.kind == "mlp1" and self.hidden < 1:
            raise ConfigError("mlp1 needs hidden >= 1")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")

    @property
    def param_count(self):
        k, d = self.num_classes, self.dim
        if self.kind == "softmax_linear":
            return k * d + k
        h = self.hidden
        return h * d + h + k * h + k


@dataclass
class ModelParams:
    arch: Architecture
    theta: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if self.theta.shape != (self.arch.param_count,):
            raise DimensionMismatchError(
                f"theta has {self.theta.size} entries, "
                f"{self.arch.kind} expects {self.arch.param_count}")

    def copy(self):
        return ModelParams(self.arch, self.theta.copy())


def init_params(arch: Architecture, seed: int) -> ModelParams:
    """Uniform [-s, s] init with s = 1/sqrt(fan_in), per layer, seeded."""
    rng = np.random.default_rng(seed)
    k, d = arch.num_classes, arch.dim
    if arch.kind == "softmax_linear":
        s = 1.0 / np.sqrt(d)
        theta = rng.uniform(-s, s, arch.param_count)
    else:
        h = arch.hidden
        s1 = 1.0 / np.sqrt(d)
        s2 = 1.0 / np.sqrt(h)
        theta = np.concatenate([
            rng.uniform(-s1, s1, h * d + h),
            rng.uniform(-s2, s2, k * h + k),
        ])
    return ModelParams(arch, theta)


def _unpack(model: ModelParams):
    a = model.arch
    k, d = a.num_classes, a.dim
    t = model.theta
    if a.kind == "softmax_linear":
        W = t[:k * d].reshape(k, d)
        b = t[k * d:]
        return W, b
    h = a.hidden
    o = 0
    W1 = t[o:o + h * d].reshape(h, d); o += h * d
    b1 = t[o:o + h]; o += h
    W2 = t[o:o + k * h].reshape(k, h); o += k * h
    b2 = t[o:]
    return W1, b1, W2, b2


def _check_dims(model: ModelParams, x: np.ndarray):
    if x.shape != (model.arch.dim,):
        raise DimensionMismatchError(
            f"input has dim {x.shape}, model expects ({model.arch.dim},)")


def logits(model: ModelParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _check_dims(model, x)
    if model.arch.kind == "softmax_linear":
        W, b = _unpack(model)
        return W @ x + b
    W1, b1, W2, b2 = _unpack(model)
    a1 = W1 @ x + b1
    h = np.tanh(a1) if model.arch.activation == "tanh" else np.maximum(a1, 0.0)
    return W2 @ h + b2


def _softmax_and_loss(s: np.ndarray, y: int):
    m = s.max()
    exps = np.exp(s - m)
    z = exps.sum()
    loss = m + np.log(z) - s[y]
    return exps / z, loss


def model_loss(model: ModelParams, sample: Sample) -> float:
    """Cross-entropy of the softmax output at the sample's label."""
    s = logits(model, sample.x)
    if not (0 <= sample.y < model.arch.num_classes):
        raise ConfigError(f"label {sample.y} outside model classes")
    _, loss = _softmax_and_loss(s, sample.y)
    return float(loss)


def _backprop(model: ModelParams, x: np.ndarray, y: int):
    """Returns (loss, grad_theta, grad_x); shared by both gradient entry points."""
    x = np.asarray(x, dtype=float)
    _check_dims(model, x)
    a = model.arch
    k = a.num_classes
    if a.kind == "softmax_linear":
        W, b = _unpack(model)
        s = W @ x + b
        p, loss = _softmax_and_loss(s, y)
        g = p.copy()
        g[y] -= 1.0
        gt = np.concatenate([np.outer(g, x).ravel(), g])
        gx = W.T @ g
        return loss, gt, gx
    W1, b1, W2, b2 = _unpack(model)
    a1 = W1 @ x + b1
    if a.activation == "tanh":
        h = np.tanh(a1)
        dact = 1.0 - h * h
    else:
        h = np.maximum(a1, 0.0)
        dact = (a1 > 0).astype(float)
    s = W2 @ h + b2
    p, loss = _softmax_and_loss(s, y)
    g = p.copy()
    g[y] -= 1.0
    da1 = (W2.T @ g) * dact
    gt = np.concatenate([
        np.outer(da1, x).ravel(), da1,
        np.outer(g, h).ravel(), g,
    ])
    gx = W1.T @ da1
    return loss, gt, gx


def grad_theta(model: ModelParams, sample: Sample) -> np.ndarray:
    """Analytic gradient of the cross-entropy loss w.r.t. the flat parameters."""
    _, gt, _ = _backprop(model, sample.x, sample.y)
    return gt


def grad_x(model: ModelParams, sample: Sample) -> np.ndarray:
    """Analytic gradient of the cross-entropy loss w.r.t. the input features."""
    _, _, gx = _backprop(model, sample.x, sample.y)
    return gx


def predict(model: ModelParams, x: np.ndarray) -> int:
    return int(np.argmax(logits(model, x)))
