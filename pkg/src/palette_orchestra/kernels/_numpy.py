"""Vectorized numpy implementations of the hot kernels.

Shapes follow one convention throughout the package: a color is a length-3
float64 vector (normalized Lab), a color set is ``(n, 3)``, a palette set is
``(N, K, 3)``.
"""

from __future__ import annotations

import numpy as np


def directed_avg_min_dist(p: np.ndarray, q: np.ndarray) -> float:
    """Average over rows of p of the distance to the nearest row of q."""
    d2 = ((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.min(axis=1)).mean())


def mhd_pair(p: np.ndarray, q: np.ndarray) -> float:
    """Modified Hausdorff distance between two color sets."""
    d = np.sqrt(((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=2))
    return float(max(d.min(axis=1).mean(), d.min(axis=0).mean()))


def pairwise_mhd(x: np.ndarray) -> np.ndarray:
    """Symmetric (N, N) matrix of palette-to-palette MHD values."""
    n = x.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        # row i against rows i+1..N-1 in one broadcast
        rest = x[i + 1 :]
        if rest.size == 0:
            continue
        d = np.sqrt(((x[i][None, :, None, :] - rest[:, None, :, :]) ** 2).sum(axis=3))
        row = np.maximum(d.min(axis=2).mean(axis=1), d.min(axis=1).mean(axis=1))
        out[i, i + 1 :] = row
        out[i + 1 :, i] = row
    return out


def mhd_to_set(obs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """MHD between one color set ``obs`` (m, 3) and every palette in ``x``."""
    d = np.sqrt(((obs[None, :, None, :] - x[:, None, :, :]) ** 2).sum(axis=3))
    return np.maximum(d.min(axis=2).mean(axis=1), d.min(axis=1).mean(axis=1))


def row_set_cost(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """(K, K) matrix of MHD between color-slot rows of two palette blocks.

    ``cost[k, h]`` is the MHD between the set of k-th colors across the
    palettes of ``p`` and the set of h-th colors across the palettes of ``q``.
    """
    k = p.shape[1]
    cost = np.empty((k, k))
    for i in range(k):
        # p-row i (N, 3) against all q-rows at once: (N, M, K) distances
        d = np.sqrt(((p[:, i, :][:, None, None, :] - q[None, :, :, :]) ** 2).sum(axis=3))
        cost[i] = np.maximum(d.min(axis=1).mean(axis=0), d.min(axis=0).mean(axis=0))
    return cost


def nearest_slot(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Index of the nearest center per point (squared Euclidean, first wins)."""
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def solve_assignment(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hungarian algorithm, O(K^3) row-augmentation form.

    Returns (perm, u, v): perm[k] is the column matched to row k and (u, v)
    the final dual potentials. Column scans resolve ties toward the lowest
    index, so the result is deterministic.
    """
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.intp)
    way = np.zeros(n + 1, dtype=np.intp)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            free = ~used[1:]
            upd = free & (cur < minv[1:])
            minv[1:][upd] = cur[upd]
            way[1:][upd] = j0
            masked = np.where(used[1:], np.inf, minv[1:])
            j1 = int(masked.argmin()) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
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
