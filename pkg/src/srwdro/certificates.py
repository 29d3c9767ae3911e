"""Generalization/robustness certificate quantities and their empirical check.

The certificate lower-bounds the probability that the true (or shifted)
distribution is reachable from the empirical one within the combined
Wasserstein + KL budget; the Monte Carlo routine estimates that frequency
directly on a tiny finite space. The greedy covering count is an upper
bound on the internal covering number, which makes the stated probability
conservative (never too optimistic).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DiscreteDistribution
from .exceptions import ConfigError
from .metrics import CostMatrix, kl_divergence, wasserstein_p
from .dro_oracle import simplex_grid


@dataclass(frozen=True)
class CertificateInputs:
    n: int
    gamma: float
    eps_or_sigma: float
    diam: float
    p: int
    m_cover: int

    def __post_init__(self):
        if self.n < 1 or self.gamma <= 0 or self.eps_or_sigma <= 0:
            raise ConfigError("n, gamma and the radius must be positive")
        if self.p < 1 or self.m_cover < 1 or self.diam < 0:
            raise ConfigError("need p >= 1, m_cover >= 1, diam >= 0")


def delta_of(eps: float, diam: float, p: int) -> float:
    """(eps / (diam + 1))^p, the covering radius induced by the budget."""
    if eps <= 0 or diam < 0 or p < 1:
        raise ConfigError("need eps > 0, diam >= 0, p >= 1")
    if eps > diam + 1:
        raise ConfigError("eps must not exceed diam + 1 (delta would leave (0,1])")
    return float((eps / (diam + 1.0)) ** p)


def covering_number_greedy(points, delta: float, cost: CostMatrix | None = None,
                           norm: str = "linf") -> int:
    """Greedy farthest-point cover count: an upper bound on the minimum
    number of delta-balls with centers in the set needed to cover it."""
    if cost is None:
        cost = CostMatrix.from_points(np.asarray(points, dtype=float), norm=norm)
    d = cost.entries
    n = d.shape[0]
    if n == 0:
        raise ConfigError("empty point set")
    centers = [0]
    mind = d[0].copy()
    while mind.max() > delta:
        far = int(np.argmax(mind))
        centers.append(far)
        mind = np.minimum(mind, d[far])
    return len(centers)


def certificate_probability(c: CertificateInputs):
    """(raw, clamped, vacuous) for 1 - e^{-gamma n} (4/delta)^m, in log space."""
    delta = delta_of(c.eps_or_sigma, c.diam, c.p)
    exponent = -c.gamma * c.n + c.m_cover * np.log(4.0 / delta)
    raw = float(-np.expm1(exponent)) if exponent < 700 else -float("inf")
    vacuous = raw <= 0.0
    return raw, max(raw, 0.0), vacuous


def robustness_certificate(n, gamma, sigma, eps, diam, p, m_cover):
    """Adversarial variant: same bound with delta built from sigma; the
    training loss the bound refers to uses the enlarged budget eps + sigma."""
    c = CertificateInputs(n, gamma, sigma, diam, p, m_cover)
    raw, clamped, vacuous = certificate_probability(c)
    return {"train_budget": eps + sigma, "raw": raw,
            "clamped": clamped, "vacuous": vacuous}


def feasibility_monte_carlo(true_dist: DiscreteDistribution, cost: CostMatrix,
                            n: int, eps: float, gamma: float, p: int,
                            trials: int, seed: int, grid_res: int = 50) -> float:
    """Fraction of i.i.d. empirical draws D_n for which some D' satisfies
    W_p(D_n, D') <= eps and KL(D' || D) <= gamma.

    Candidate D' come from a simplex grid (plus D itself and D_n), filtered
    by the KL condition once up front; the Wasserstein check runs per draw
    with memoization over the (small) set of distinct empirical counts.
    """
    if trials < 1:
        raise ConfigError("need trials >= 1")
    d = true_dist.weights
    m = len(d)
    if cost.entries.shape != (m, m):
        raise ConfigError("cost matrix must cover the finite space")
    rng = np.random.default_rng(seed)

    cand = np.vstack([simplex_grid(m, grid_res), d])
    kl_ok = np.array([kl_divergence(row, d) <= gamma + 1e-12 for row in cand])
    cand = cand[kl_ok]

    cache = {}
    hits = 0
    for _ in range(trials):
        counts = rng.multinomial(n, d)
        key = tuple(int(k) for k in counts)
        if key not in cache:
            emp = counts / n
            if kl_divergence(emp, d) <= gamma + 1e-12:
                cache[key] = True  # D' = D_n, zero transport
            elif wasserstein_p(emp, d, cost, p) <= eps + 1e-12:
                cache[key] = True  # D' = D, zero KL
            else:
                cache[key] = any(
                    wasserstein_p(emp, row, cost, p) <= eps + 1e-12
                    for row in cand)
        hits += cache[key]
    return hits / trials


def write_certificate_report(path, rows):
    """rows: dicts with keys n, eps, gamma, p, m_cover, bound, empirical_freq,
    trials."""
    cols = ["n", "eps", "gamma", "p", "m_cover", "bound", "empirical_freq",
            "trials"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(str(r[c]) for c in cols) + "\n")
