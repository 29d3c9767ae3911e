"""Desk-scale ground truth for the statistically robust loss.

Everything here enumerates probability simplices at a finite resolution:
the two-stage ambiguity set (a Wasserstein ball followed by a KL ball) is
expanded explicitly, so these routines are slow, exact up to grid error,
and only meant for tiny finite spaces (m <= 4). They are the reference
the training-path code is validated against.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import xlogy

from .core import AmbiguityParams, DiscreteDistribution
from .exceptions import ConfigError, InvalidDistributionError, ProblemTooLargeError
from .metrics import CostMatrix, wasserstein_p

_LOG_SENTINEL = -1e30  # stands in for log(0); any hit pushes KL far above gamma
_MAX_KL_PAIRS = 5e7


@dataclass
class FiniteInstance:
    """A finite sample space with frozen per-point losses.

    The model parameter is absorbed into ``losses``; ``base`` plays the
    empirical distribution the ambiguity set is built around.
    """

    cost: CostMatrix
    losses: np.ndarray
    base: DiscreteDistribution
    params: AmbiguityParams

    def __post_init__(self):
        self.losses = np.asarray(self.losses, dtype=float)
        m = self.cost.entries.shape[0]
        if self.cost.entries.shape != (m, m):
            raise ConfigError("cost matrix must be square over the finite space")
        if m < 2:
            raise ConfigError("need at least 2 support points")
        if self.losses.shape != (m,):
            raise ConfigError("losses must cover every support point")
        if not np.all(np.isfinite(self.losses)):
            raise InvalidDistributionError("losses must be finite")
        if len(self.base.weights) != m:
            raise InvalidDistributionError("base distribution must cover the space")

    @property
    def m(self):
        return self.cost.entries.shape[0]


def simplex_grid(m: int, res: int) -> np.ndarray:
    """All weight vectors with entries k/res, boundary included."""
    count = comb(res + m - 1, m - 1)
    if count > 2_000_000:
        raise ProblemTooLargeError(
            f"simplex grid over {m} atoms at resolution {res} has {count} points; "
            "reduce m or grid_res")
    out = np.empty((count, m), dtype=float)
    idx = 0

    def fill(prefix, remaining, slots):
        nonlocal idx
        if slots == 1:
            out[idx, :len(prefix)] = prefix
            out[idx, -1] = remaining
            idx += 1
            return
        for k in range(remaining + 1):
            fill(prefix + [k], remaining - k, slots - 1)

    fill([], res, m)
    out /= res
    return out


def _kl_rows_vs_cols(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """KL(row || col) for every pair, with 0 ln 0 = 0 and +huge when a row
    charges a column-null atom."""
    if rows.shape[0] * cols.shape[0] > _MAX_KL_PAIRS:
        raise ProblemTooLargeError(
            f"{rows.shape[0]} x {cols.shape[0]} pairwise KL evaluations needed; "
            "reduce grid_res or the support size")
    ent = xlogy(rows, rows).sum(axis=1)
    logc = np.where(cols > 0, np.log(np.maximum(cols, 1e-300)), _LOG_SENTINEL)
    cross = rows @ logc.T
    return ent[:, None] - cross


def _reachable_and_mids(inst: FiniteInstance, grid_res: int):
    p = inst.params
    cand = np.vstack([simplex_grid(inst.m, grid_res), inst.base.weights])
    w_ok = np.array([
        wasserstein_p(inst.base.weights, row, inst.cost, p.p) <= p.eps + 1e-12
        for row in cand
    ])
    mids = cand[w_ok]
    kl = _kl_rows_vs_cols(mids, cand)
    reach = (kl <= p.gamma + 1e-12).any(axis=0)
    return cand[reach], mids


def reachable_distributions(inst: FiniteInstance, grid_res: int) -> np.ndarray:
    """Grid enumeration of the two-stage ambiguity set around ``base``.

    Candidates are the simplex grid plus the base itself (so the set is
    never empty even when base falls off-grid). A candidate D' is kept if
    some Wasserstein-feasible midpoint D'' has KL(D'' || D') <= gamma;
    zero entries of D'' are handled by 0 ln 0 = 0, so D' may carry mass
    outside D'''s support.
    """
    return _reachable_and_mids(inst, grid_res)[0]


def sr_loss_exact(inst: FiniteInstance, grid_res: int = 60) -> float:
    """Statistically robust loss by double simplex enumeration."""
    reach = reachable_distributions(inst, grid_res)
    return float((reach @ inst.losses).max())


def _phi_terms(lam, beta, eta, losses, cost_p, gamma):
    """phi(lam, beta, eta, z_i) for every base atom, the sup over xi exact."""
    gaps = eta - losses
    if beta > 0:
        if np.any(gaps <= 0):
            return np.full(cost_p.shape[0], np.inf)
        a = beta * np.log(beta / gaps)
    else:
        a = np.zeros_like(losses)
    inner = a[None, :] - lam * cost_p
    return inner.max(axis=1) + (gamma - 1.0) * beta + eta


def _dual_objective(lam, beta, eta, inst: FiniteInstance, cost_p):
    p = inst.params
    phi = _phi_terms(lam, beta, eta, inst.losses, cost_p, p.gamma)
    return lam * p.eps ** p.p + float(inst.base.weights @ phi)


def dual_value(inst: FiniteInstance, sweeps: int = 200) -> float:
    """Three-variable dual of the robust loss (valid for gamma > 0).

    Coarse grid over (lambda, beta, eta) followed by derivative-free
    coordinate descent with shrinking multiplicative steps; the objective
    is convex but nonsmooth in lambda, so refinement stays comparison-based.
    """
    p = inst.params
    if p.gamma <= 0:
        raise ConfigError("the dual formulation requires gamma > 0")
    cost_p = inst.cost.entries ** p.p
    lmax = float(inst.losses.max())

    lam_grid = np.concatenate([[0.0], np.logspace(-3, 3, 13)])
    beta_grid = np.concatenate([[0.0], np.logspace(-3, 3, 13)])
    eta_grid = lmax + np.logspace(-6, 2, 17)
    best = (np.inf, 0.0, 0.0, lmax + 1.0)
    for lam in lam_grid:
        for beta in beta_grid:
            for eta in eta_grid:
                val = _dual_objective(lam, beta, eta, inst, cost_p)
                if val < best[0]:
                    best = (val, lam, beta, eta)

    val, lam, beta, eta = best
    step = 1.5
    for _ in range(sweeps):
        for coord in range(3):
            cur = (lam, beta, eta - lmax)[coord]
            cands = [cur * step, cur / step]
            if coord < 2:
                cands.append(0.0)
                if cur == 0.0:
                    cands.append(1e-3 * step)
            for c in cands:
                if coord == 2 and c < 1e-12:
                    continue
                trial = [lam, beta, eta - lmax]
                trial[coord] = c
                v = _dual_objective(trial[0], trial[1], lmax + trial[2],
                                    inst, cost_p)
                if v < val:
                    val, lam, beta, eta = v, trial[0], trial[1], lmax + trial[2]
        step = max(1.0 + 0.5 * (step - 1.0) * 0.99, 1.0 + 1e-9)
        if step < 1.0 + 1e-8:
            break
    return val


def _polish_saddle(start, mids, a_lo, a_hi, gamma, seed=0):
    """Local search for the distribution maximizing min over theta of the
    affine payoff (attained at an interval endpoint), constrained to stay
    reachable from one of the Wasserstein-feasible midpoints."""
    def feasible(p):
        return _kl_rows_vs_cols(mids, p[None, :]).min() <= gamma + 1e-12

    def score(p):
        return min(float(p @ a_lo), float(p @ a_hi))

    best, best_val = start.copy(), score(start)
    rng = np.random.default_rng(seed)
    m = len(start)
    step = 0.05
    while step > 1e-7:
        improved = False
        for _ in range(200):
            d = rng.normal(size=m)
            d -= d.mean()
            p = np.maximum(best + step * d, 0.0)
            s = p.sum()
            if s <= 0:
                continue
            p /= s
            if score(p) > best_val and feasible(p):
                best, best_val = p, score(p)
                improved = True
        if not improved:
            step /= 2.0
    return best


def minimax_gap(inst: FiniteInstance, slope, intercept, theta_range,
                theta_res: int = 200, grid_res: int = 60):
    """(min-max, max-min) values for affine per-point losses a_i theta + b_i
    over a compact theta interval, both sides sharing the same candidate set.

    The candidate distributions are the grid enumeration plus one polished
    point found by local search near the grid max-min optimum; the shared
    set keeps max-min <= min-max while removing most of the grid bias.
    """
    a = np.asarray(slope, dtype=float)
    b = np.asarray(intercept, dtype=float)
    if a.shape != (inst.m,) or b.shape != (inst.m,):
        raise ConfigError("affine loss family must cover every support point")
    lo, hi = theta_range
    if theta_res < 1:
        raise ConfigError("empty theta grid")
    thetas = np.linspace(lo, hi, theta_res)
    reach, mids = _reachable_and_mids(inst, grid_res)
    # E_{D'}[L(theta)] = (D'.a) theta + (D'.b) for every reachable D'
    table = (reach @ a)[:, None] * thetas[None, :] + (reach @ b)[:, None]
    start = reach[int(np.argmax(table.min(axis=1)))]
    polished = _polish_saddle(start, mids, a * lo + b, a * hi + b,
                              inst.params.gamma)
    reach = np.vstack([reach, polished])
    table = (reach @ a)[:, None] * thetas[None, :] + (reach @ b)[:, None]
    minmax = float(table.max(axis=0).min())
    maxmin = float(table.min(axis=1).max())
    return minmax, maxmin


def instance_hash(inst: FiniteInstance) -> str:
    h = hashlib.sha256()
    for arr in (inst.cost.entries, inst.losses, inst.base.weights):
        h.update(np.round(arr, 12).tobytes())
    h.update(f"{inst.params.eps}:{inst.params.gamma}:{inst.params.p}".encode())
    return h.hexdigest()[:16]


def export_oracle_csv(path, records):
    """records: iterable of (instance, value) pairs -> regression-pin CSV."""
    with open(path, "w") as fh:
        fh.write("instance,eps,gamma,value\n")
        for inst, value in records:
            p = inst.params
            fh.write(f"{instance_hash(inst)},{p.eps},{p.gamma},{value!r}\n")
