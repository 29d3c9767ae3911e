"""Independent reference implementations used to validate the package.

Nothing here imports the solver routines under test; the transport oracle
goes through scipy's LP solver, the reweighting oracle is a coarse-to-fine
grid search on the simplex, and gradients come from central differences.
"""

import numpy as np
from scipy.optimize import linprog
from scipy.special import rel_entr


def transport_lp(cost, a, b):
    """Optimal transport value via the assignment LP, solved with HiGHS."""
    m, n = cost.shape
    A_eq = np.zeros((m + n, m * n))
    for i in range(m):
        A_eq[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A_eq[m + j, j::n] = 1.0
    res = linprog(cost.ravel(), A_eq=A_eq, b_eq=np.concatenate([a, b]),
                  bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return res.fun


def kl(p, q):
    return float(rel_entr(p, q).sum())


def _simplex_points(m, res):
    """All vectors with entries k/res summing to 1 (independent generator)."""
    pts = []

    def rec(prefix, remaining):
        if len(prefix) == m - 1:
            pts.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k)

    rec([], res)
    return np.array(pts, dtype=float) / res


def reweight_grid_search(losses, q, gamma, res=200, seed=0):
    """max p.L subject to KL(q || p) <= gamma: simplex grid search followed
    by random-direction local search with shrinking steps.

    The random phase walks along the (curved) constraint boundary that the
    grid alone resolves only to O(1/res); steps shrink to ~1e-6.
    """
    losses = np.asarray(losses, dtype=float)
    q = np.asarray(q, dtype=float)
    m = len(losses)
    cand = _simplex_points(m, res)
    feas = np.array([kl(q, p) <= gamma for p in cand])
    cand = cand[feas]
    best = q.copy() if len(cand) == 0 else cand[np.argmax(cand @ losses)]
    best_val = float(best @ losses)

    rng = np.random.default_rng(seed)
    step = 2.0 / res
    while step > 1e-6:
        improved = False
        for _ in range(300):
            d = rng.normal(size=m)
            d -= d.mean()  # stay in the simplex tangent plane
            p = np.maximum(best + step * d, 0.0)
            p /= p.sum()
            if kl(q, p) <= gamma and p @ losses > best_val:
                best, best_val = p, float(p @ losses)
                improved = True
        if not improved:
            step /= 2.0
    return best_val, best


def central_diff(f, x, h=1e-5):
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g
