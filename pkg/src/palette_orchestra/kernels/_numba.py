"""numba-compiled counterparts of the kernels in ``_numpy``.

Explicit loops, no temporaries: the broadcasted numpy versions allocate
O(N*M*K^2) intermediates, which dominates the sort recursion on large sets.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def directed_avg_min_dist(p, q):
    total = 0.0
    for i in range(p.shape[0]):
        best = np.inf
        for j in range(q.shape[0]):
            d = 0.0
            for c in range(p.shape[1]):
                t = p[i, c] - q[j, c]
                d += t * t
            if d < best:
                best = d
        total += np.sqrt(best)
    return total / p.shape[0]


@njit(cache=True)
def mhd_pair(p, q):
    a = directed_avg_min_dist(p, q)
    b = directed_avg_min_dist(q, p)
    return a if a > b else b


@njit(cache=True)
def pairwise_mhd(x):
    n = x.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = mhd_pair(x[i], x[j])
            out[i, j] = v
            out[j, i] = v
    return out


@njit(cache=True)
def mhd_to_set(obs, x):
    n = x.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = mhd_pair(obs, x[i])
    return out


@njit(cache=True)
def row_set_cost(p, q):
    k = p.shape[1]
    cost = np.empty((k, k))
    for a in range(k):
        for b in range(k):
            cost[a, b] = mhd_pair(p[:, a, :], q[:, b, :])
    return cost


@njit(cache=True)
def solve_assignment(cost):
    """Hungarian algorithm (see the numpy backend for the reference form)."""
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.intp)
    way = np.zeros(n + 1, dtype=np.intp)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=np.bool_)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.intp)
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    return perm, u[1:].copy(), v[1:].copy()


@njit(cache=True)
def nearest_slot(points, centers):
    n = points.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = np.inf
        arg = 0
        for j in range(centers.shape[0]):
            d = 0.0
            for c in range(points.shape[1]):
                t = points[i, c] - centers[j, c]
                d += t * t
            if d < best:
                best = d
                arg = j
        out[i] = arg
    return out
