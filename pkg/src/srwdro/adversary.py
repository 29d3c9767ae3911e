"""Adversarial example generation.

Standard projected sign-ascent (for evaluation) and the penalty-based
ascent used during training, where a learnable multiplier on the soft
distance cost replaces the hard ball projection. Also the soft distance
itself and the label-aware sample-shift cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams, Sample, _backprop
from .exceptions import ConfigError, DimensionMismatchError

NORMS = ("linf", "l2")


@dataclass(frozen=True)
class AttackConfig:
    eps: float
    K: int = 10
    eta: float = 0.01
    norm: str = "linf"
    random_start: bool = True
    seed: int = 0
    lam: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        if self.eps < 0:
            raise ConfigError("eps must be >= 0")
        if self.K < 0:
            raise ConfigError("K must be >= 0")
        if self.K > 0 and self.eta <= 0:
            raise ConfigError("eta must be > 0 when K > 0")
        if self.tau <= 0:
            raise ConfigError("tau must be > 0")
        if self.lam < 0:
            raise ConfigError("lambda must be >= 0")
        if self.norm not in NORMS:
            raise ConfigError(f"unknown norm {self.norm!r}")


def _dist(x, x0, norm):
    d = x - x0
    return float(np.abs(d).max()) if norm == "linf" else float(np.linalg.norm(d))


def _grad_dist(x, x0, norm):
    """Subgradient of d_X(., x0): for linf, averaged over tied max coordinates."""
    d = x - x0
    if norm == "l2":
        nrm = np.linalg.norm(d)
        return d / nrm if nrm > 0 else np.zeros_like(d)
    a = np.abs(d)
    m = a.max()
    if m == 0:
        return np.zeros_like(d)
    ties = a >= m - 1e-15
    g = np.zeros_like(d)
    g[ties] = np.sign(d[ties]) / ties.sum()
    return g


def dhat(x, x0, eps, tau, norm="linf") -> float:
    """Soft distance: d below the eps threshold, eps + (d - eps)/tau beyond."""
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if x.shape != x0.shape:
        raise DimensionMismatchError("dhat operands differ in length")
    if eps < 0 or tau <= 0:
        raise ConfigError("need eps >= 0 and tau > 0")
    d = _dist(x, x0, norm)
    if d <= eps:
        return d
    return eps + (d - eps) / tau


def grad_dhat(x, x0, eps, tau, norm="linf"):
    """Gradient convention: the linear branch owns the threshold point."""
    d = _dist(x, x0, norm)
    g = _grad_dist(x, x0, norm)
    return g if d <= eps else g / tau


def sample_shift_cost(z: Sample, z2: Sample, M: float, norm="linf") -> float:
    """d_X(x, x') + M when the labels differ."""
    if z.x.shape != z2.x.shape:
        raise DimensionMismatchError("samples differ in dimension")
    return _dist(z.x, z2.x, norm) + (M if z.y != z2.y else 0.0)


def _project_ball(x, x0, eps, norm):
    if norm == "linf":
        return x0 + np.clip(x - x0, -eps, eps)
    d = np.linalg.norm(x - x0)
    if d <= eps:
        return x
    return x0 + (x - x0) * (eps / d) if d > 0 else x


def pgd_attack(model: ModelParams, sample: Sample, cfg: AttackConfig,
               domain_box=(0.0, 1.0)) -> Sample:
    """Projected sign-ascent inside the eps-ball around the clean input."""
    lo, hi = domain_box
    x0 = sample.x
    if x0.shape != (model.arch.dim,):
        raise DimensionMismatchError("sample does not match model input size")
    x = x0.copy()
    if cfg.random_start and cfg.eps > 0:
        rng = np.random.default_rng(cfg.seed)
        x = x + rng.uniform(-cfg.eps, cfg.eps, x.shape)
        x = np.clip(_project_ball(x, x0, cfg.eps, cfg.norm), lo, hi)
    for _ in range(cfg.K):
        _, _, gx = _backprop(model, x, sample.y)
        x = x + cfg.eta * np.sign(gx)
        x = np.clip(_project_ball(x, x0, cfg.eps, cfg.norm), lo, hi)
    return Sample(np.clip(x, lo, hi), sample.y)


def udr_attack(model: ModelParams, sample: Sample, cfg: AttackConfig,
               domain_box=(0.0, 1.0)) -> Sample:
    """Penalty ascent: sign step on the loss, then a step down the soft
    distance scaled by eta * lambda. No ball projection; the box clip is
    applied once at the end."""
    lo, hi = domain_box
    x0 = sample.x
    if x0.shape != (model.arch.dim,):
        raise DimensionMismatchError("sample does not match model input size")
    rng = np.random.default_rng(cfg.seed)
    x = x0 + rng.uniform(-cfg.eps, cfg.eps, x0.shape)
    for _ in range(cfg.K):
        _, _, gx = _backprop(model, x, sample.y)
        x_inter = x + cfg.eta * np.sign(gx)
        x = x_inter - cfg.eta * cfg.lam * grad_dhat(
            x_inter, x0, cfg.eps, cfg.tau, cfg.norm)
    return Sample(np.clip(x, lo, hi), sample.y)
