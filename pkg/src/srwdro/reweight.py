"""KL-constrained inner maximization over sample weights.

Given per-sample losses L and a strictly positive reference distribution q,
find weights p maximizing sum p_i L_i subject to KL(q || p) <= gamma.

The optimum has the parametric form p_i = beta * q_i / (eta - L_i) with the
scalar eta pinned by the constraint; the dual evaluator reduces the
(beta, eta) infimum to a 1-d convex minimization after solving beta in
closed form. Both routes must agree to 1e-8 (primal-dual check).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import ConfigError, InvalidDistributionError, NumericError


@dataclass
class ReweightSolution:
    weights: np.ndarray
    value: float
    eta: float
    beta: float
    kl_attained: float


def _validate(losses, q, gamma):
    losses = np.asarray(losses, dtype=float)
    q = np.asarray(q, dtype=float)
    if losses.ndim != 1 or q.shape != losses.shape or len(losses) < 1:
        raise InvalidDistributionError("losses and q must be equal-length vectors")
    if not np.all(np.isfinite(losses)):
        raise InvalidDistributionError("losses must be finite")
    if np.any(q <= 0):
        raise InvalidDistributionError(
            "q must be strictly positive (zero-mass reference entries are "
            "handled only by the enumeration oracle, not this solver)")
    if abs(q.sum() - 1.0) > 1e-9:
        raise InvalidDistributionError(f"q sums to {q.sum()}, expected 1")
    if gamma < 0:
        raise ConfigError("gamma must be >= 0")
    return losses, q


def _constraint_gap(t, gaps, q, gamma):
    """ln sum q/(t+gap) + sum q ln(t+gap) - gamma, zero at the optimal eta."""
    inv = q / (t + gaps)
    return np.log(inv.sum()) + float(q @ np.log(t + gaps)) - gamma


def solve_weights(losses, q, gamma) -> ReweightSolution:
    losses, q = _validate(losses, q, gamma)
    lmax = float(losses.max())
    base_value = float(q @ losses)
    if gamma == 0.0 or losses.max() == losses.min():
        # constraint forces p = q / objective is constant on the simplex
        return ReweightSolution(q.copy(), base_value, float("inf"), 0.0, 0.0)

    gaps = lmax - losses  # >= 0, zero at the maximal losses
    # bracket eta = lmax + t: G -> +inf as t -> 0+, G -> -gamma as t -> inf
    t_hi = 1e-12 * (1.0 + lmax)
    for _ in range(200):
        if _constraint_gap(t_hi, gaps, q, gamma) < 0:
            break
        t_hi *= 2.0
    else:
        raise NumericError("failed to bracket the KL multiplier from above")
    t_lo = t_hi / 2.0
    while _constraint_gap(t_lo, gaps, q, gamma) < 0:
        t_lo /= 2.0
        if t_lo < 1e-300:
            raise NumericError("failed to bracket the KL multiplier from below")
    t = brentq(_constraint_gap, t_lo, t_hi, args=(gaps, q, gamma),
               xtol=1e-15, rtol=8.9e-16)

    inv = q / (t + gaps)
    beta = 1.0 / inv.sum()
    p = beta * inv
    p /= p.sum()
    value = float(p @ losses)
    kl = float(q @ np.log(q / p))
    return ReweightSolution(p, value, lmax + t, beta, kl)


def _dual_slope(t, gaps, q, gamma):
    """Derivative of the reduced dual eta -> eta - exp(E_q ln(eta - L) - gamma)."""
    gm = np.exp(float(q @ np.log(t + gaps)) - gamma)
    return 1.0 - gm * float(np.sum(q / (t + gaps)))


def kl_dual_value(losses, q, gamma) -> float:
    """inf over beta >= 0, eta >= max L of the KL dual; beta solved closed-form.

    For fixed eta the minimizing beta is exp(E_q ln(eta - L) - gamma), which
    collapses the dual to a 1-d convex function of eta minimized by bisection
    on its slope.
    """
    losses, q = _validate(losses, q, gamma)
    lmax = float(losses.max())
    if gamma == 0.0 or losses.max() == losses.min():
        return float(q @ losses) if gamma == 0.0 else lmax

    gaps = lmax - losses
    t_lo = 1e-6 * (1.0 + lmax)
    while _dual_slope(t_lo, gaps, q, gamma) > 0:
        t_lo /= 2.0
        if t_lo < 1e-300:
            # slope already positive at eta -> max L: infimum sits at the edge
            return lmax
    t_hi = max(1.0, 2.0 * t_lo)
    for _ in range(200):
        if _dual_slope(t_hi, gaps, q, gamma) > 0:
            break
        t_hi *= 2.0
    else:
        raise NumericError("failed to bracket the dual minimizer")
    t = brentq(_dual_slope, t_lo, t_hi, args=(gaps, q, gamma),
               xtol=1e-15, rtol=8.9e-16)
    return float(lmax + t - np.exp(float(q @ np.log(t + gaps)) - gamma))
