"""Pure-python exact solver for the discrete transportation problem.

Successive shortest augmenting paths with node potentials (Dijkstra on the
bipartite residual graph). Exact in the LP sense: the returned plan is an
optimal vertex/face point of the transportation polytope, no entropic or
iterative approximation. Supports here are tiny (a handful of atoms), so
the dense O(V^2) Dijkstra is the right tool.

A compiled twin of this routine lives in ``_speedups.pyx``; keep the two
in sync.
"""

import numpy as np

from .exceptions import InvalidDistributionError, NumericError

_INF = float("inf")
_FLOW_EPS = 1e-15
_MASS_TOL = 1e-9


def solve_transport(cost, a, b):
    """Min-cost transport of marginal ``a`` onto ``b`` under ``cost``.

    Returns ``(value, plan)`` where ``plan`` is an (m, n) coupling with the
    given marginals and ``value = sum(plan * cost)`` is minimal.
    """
    cost = np.asarray(cost, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = cost.shape
    if a.shape != (m,) or b.shape != (n,):
        raise InvalidDistributionError("marginal lengths do not match cost matrix")
    if np.any(a < -_MASS_TOL) or np.any(b < -_MASS_TOL):
        raise InvalidDistributionError("negative marginal mass")
    if abs(a.sum() - b.sum()) > _MASS_TOL:
        raise InvalidDistributionError(
            f"marginals carry different total mass ({a.sum()} vs {b.sum()})")
    if np.any(cost < 0):
        raise InvalidDistributionError("cost matrix must be nonnegative")

    rem_a = np.maximum(a, 0.0).copy()
    rem_b = np.maximum(b, 0.0).copy()
    flow = np.zeros((m, n))
    pot = np.zeros(m + n)  # node potentials keep residual reduced costs >= 0

    max_iter = 50 * (m + n) * (m + n) + 64
    for _ in range(max_iter):
        if rem_a.sum() <= 1e-12:
            return float(np.sum(flow * cost)), flow

        dist = np.full(m + n, _INF)
        parent = np.full(m + n, -1, dtype=int)
        done = np.zeros(m + n, dtype=bool)
        dist[:m][rem_a > 1e-12] = 0.0

        target = -1
        while True:
            u = -1
            best = _INF
            for v in range(m + n):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u < 0:
                break
            done[u] = True
            if u >= m and rem_b[u - m] > 1e-12:
                target = u
                break
            if u < m:
                for j in range(n):
                    nd = dist[u] + cost[u, j] + pot[u] - pot[m + j]
                    if nd < dist[m + j] - 1e-15:
                        dist[m + j] = nd
                        parent[m + j] = u
            else:
                j = u - m
                for i in range(m):
                    if flow[i, j] > _FLOW_EPS:
                        nd = dist[u] - cost[i, j] + pot[u] - pot[i]
                        if nd < dist[i] - 1e-15:
                            dist[i] = nd
                            parent[i] = u
        if target < 0:
            raise NumericError("transportation problem: no augmenting path")

        dt = dist[target]
        for v in range(m + n):
            pot[v] += min(dist[v], dt)

        # bottleneck along the path, then augment
        path = []
        v = target
        while parent[v] >= 0:
            path.append((parent[v], v))
            v = parent[v]
        delta = min(rem_a[v], rem_b[target - m])
        for pu, pv in path:
            if pu >= m:  # backward arc (sink -> source)
                delta = min(delta, flow[pv, pu - m])
        for pu, pv in path:
            if pu < m:
                flow[pu, pv - m] += delta
            else:
                flow[pv, pu - m] -= delta
        rem_a[v] -= delta
        rem_b[target - m] -= delta
    raise NumericError("transportation solver failed to converge")
