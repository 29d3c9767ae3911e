"""Exact discrepancies between discrete distributions.

Wasserstein-p and the LP_eps transport functional are solved as exact
transportation problems on the shared cost matrix; KL and total variation
assume index-aligned supports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DiscreteDistribution
from .exceptions import DimensionMismatchError, InvalidDistributionError
from .transport import solve_transport


@dataclass
class CostMatrix:
    """Pairwise ground costs d(z_i, z_j') between two supports."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2:
            raise DimensionMismatchError("cost matrix must be 2-d")
        if np.any(self.entries < 0):
            raise InvalidDistributionError("cost entries must be nonnegative")

    @classmethod
    def from_points(cls, xs, ys=None, norm="l2"):
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = xs if ys is None else np.atleast_2d(np.asarray(ys, dtype=float))
        diff = xs[:, None, :] - ys[None, :, :]
        if norm == "l2":
            d = np.sqrt((diff ** 2).sum(axis=2))
        elif norm == "linf":
            d = np.abs(diff).max(axis=2)
        else:
            raise InvalidDistributionError(f"unknown norm {norm!r}")
        return cls(d)

    @classmethod
    def sample_shift(cls, xs, labels_a, ys=None, labels_b=None, M=1e6, norm="l2"):
        """Feature distance plus M whenever the labels differ."""
        base = cls.from_points(xs, ys, norm=norm).entries
        la = np.asarray(labels_a)
        lb = la if labels_b is None else np.asarray(labels_b)
        return cls(base + M * (la[:, None] != lb[None, :]))

    @property
    def diameter(self):
        """max entry; equals diam(Z) when the matrix covers a full finite space."""
        return float(self.entries.max())


def _weights(dist):
    if isinstance(dist, DiscreteDistribution):
        return dist.weights
    w = np.asarray(dist, dtype=float)
    if np.any(w < -1e-12):
        raise InvalidDistributionError("negative weight")
    if abs(w.sum() - 1.0) > 1e-9:
        raise InvalidDistributionError(f"weights sum to {w.sum()}, expected 1")
    return w


def wasserstein_p(mu, nu, cost: CostMatrix, p: int = 1) -> float:
    """( min_coupling sum pi_ij d_ij^p )^(1/p), solved exactly."""
    wm = _weights(mu)
    wn = _weights(nu)
    if cost.entries.shape != (len(wm), len(wn)):
        raise DimensionMismatchError(
            f"cost is {cost.entries.shape}, marginals are {len(wm)}x{len(wn)}")
    if p < 1:
        raise InvalidDistributionError("p must be >= 1")
    value, _ = solve_transport(cost.entries ** p, wm, wn)
    return float(max(value, 0.0) ** (1.0 / p))


def kl_divergence(mu, nu) -> float:
    """sum_{mu_i>0} mu_i ln(mu_i/nu_i); +inf if mu charges a nu-null atom."""
    wm = _weights(mu)
    wn = _weights(nu)
    if len(wm) != len(wn):
        raise DimensionMismatchError("KL needs a shared support")
    pos = wm > 0
    if np.any(wn[pos] == 0):
        return float("inf")
    return float(np.sum(wm[pos] * np.log(wm[pos] / wn[pos])))


def tv_distance(mu, nu) -> float:
    """Half the l1 distance on a shared support."""
    wm = _weights(mu)
    wn = _weights(nu)
    if len(wm) != len(wn):
        raise DimensionMismatchError("TV needs a shared support")
    return float(0.5 * np.abs(wm - wn).sum())


def lp_eps(mu, nu, cost: CostMatrix, eps: float) -> float:
    """Least coupled mass moved farther than eps (0/1-cost transport)."""
    wm = _weights(mu)
    wn = _weights(nu)
    if cost.entries.shape != (len(wm), len(wn)):
        raise DimensionMismatchError(
            f"cost is {cost.entries.shape}, marginals are {len(wm)}x{len(wn)}")
    value, _ = solve_transport((cost.entries > eps).astype(float), wm, wn)
    return float(min(max(value, 0.0), 1.0))


def lp_metric(mu, nu, cost: CostMatrix, tol: float = 1e-11) -> float:
    """inf{tau >= 0 : lp_eps(mu, nu, tau) <= tau} by bisection.

    The crossing exists on a bounded space: lp_eps is nonincreasing in tau
    while the right side increases, and tau = max(1, diam) always passes.
    """
    lo, hi = 0.0, max(1.0, cost.diameter)
    if lp_eps(mu, nu, cost, lo) <= lo:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lp_eps(mu, nu, cost, mid) <= mid:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
