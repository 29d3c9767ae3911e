# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_transport_py.solve_transport``.

Same successive-shortest-path algorithm, same tolerances; keep in sync
with the pure-python kernel.
"""

import numpy as np

cimport numpy as cnp

from .exceptions import InvalidDistributionError, NumericError

cnp.import_array()

cdef double _INF = float("inf")
cdef double _FLOW_EPS = 1e-15
cdef double _MASS_TOL = 1e-9


def solve_transport(cost, a, b):
    """Min-cost transport of marginal ``a`` onto ``b`` under ``cost``.

    Returns ``(value, plan)``; see the pure-python kernel for the contract.
    """
    cost_arr = np.ascontiguousarray(cost, dtype=np.float64)
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t m = cost_arr.shape[0]
    cdef Py_ssize_t n = cost_arr.shape[1]
    if a_arr.shape[0] != m or b_arr.shape[0] != n:
        raise InvalidDistributionError("marginal lengths do not match cost matrix")
    if np.any(a_arr < -_MASS_TOL) or np.any(b_arr < -_MASS_TOL):
        raise InvalidDistributionError("negative marginal mass")
    if abs(float(a_arr.sum()) - float(b_arr.sum())) > _MASS_TOL:
        raise InvalidDistributionError(
            "marginals carry different total mass (%s vs %s)"
            % (a_arr.sum(), b_arr.sum()))
    if np.any(cost_arr < 0):
        raise InvalidDistributionError("cost matrix must be nonnegative")

    cdef double[:, ::1] c = cost_arr
    rem_a_arr = np.maximum(a_arr, 0.0)
    rem_b_arr = np.maximum(b_arr, 0.0)
    flow_arr = np.zeros((m, n), dtype=np.float64)
    cdef double[::1] rem_a = rem_a_arr
    cdef double[::1] rem_b = rem_b_arr
    cdef double[:, ::1] flow = flow_arr

    cdef Py_ssize_t nv = m + n
    pot_arr = np.zeros(nv, dtype=np.float64)
    dist_arr = np.empty(nv, dtype=np.float64)
    parent_arr = np.empty(nv, dtype=np.intp)
    done_arr = np.empty(nv, dtype=np.uint8)
    cdef double[::1] pot = pot_arr
    cdef double[::1] dist = dist_arr
    cdef Py_ssize_t[::1] parent = parent_arr
    cdef cnp.uint8_t[::1] done = done_arr

    cdef Py_ssize_t it, v, u, i, j, target, root, pu, pv
    cdef double best, nd, dt, delta, total, rem
    cdef Py_ssize_t max_iter = 50 * nv * nv + 64

    for it in range(max_iter):
        rem = 0.0
        for i in range(m):
            rem += rem_a[i]
        if rem <= 1e-12:
            value = float(np.sum(flow_arr * cost_arr))
            return value, flow_arr

        for v in range(nv):
            dist[v] = _INF
            parent[v] = -1
            done[v] = 0
        for i in range(m):
            if rem_a[i] > 1e-12:
                dist[i] = 0.0

        target = -1
        while True:
            u = -1
            best = _INF
            for v in range(nv):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u < 0:
                break
            done[u] = 1
            if u >= m and rem_b[u - m] > 1e-12:
                target = u
                break
            if u < m:
                for j in range(n):
                    nd = dist[u] + c[u, j] + pot[u] - pot[m + j]
                    if nd < dist[m + j] - 1e-15:
                        dist[m + j] = nd
                        parent[m + j] = u
            else:
                j = u - m
                for i in range(m):
                    if flow[i, j] > _FLOW_EPS:
                        nd = dist[u] - c[i, j] + pot[u] - pot[i]
                        if nd < dist[i] - 1e-15:
                            dist[i] = nd
                            parent[i] = u
        if target < 0:
            raise NumericError("transportation problem: no augmenting path")

        dt = dist[target]
        for v in range(nv):
            if dist[v] < dt:
                pot[v] += dist[v]
            else:
                pot[v] += dt

        v = target
        while parent[v] >= 0:
            v = parent[v]
        root = v
        delta = rem_a[root]
        if rem_b[target - m] < delta:
            delta = rem_b[target - m]
        v = target
        while parent[v] >= 0:
            pu = parent[v]
            if pu >= m:  # backward arc (sink -> source)
                if flow[v, pu - m] < delta:
                    delta = flow[v, pu - m]
            v = pu
        v = target
        while parent[v] >= 0:
            pu = parent[v]
            if pu < m:
                flow[pu, v - m] += delta
            else:
                flow[v, pu - m] -= delta
            v = pu
        rem_a[root] -= delta
        rem_b[target - m] -= delta
    raise NumericError("transportation solver failed to converge")
