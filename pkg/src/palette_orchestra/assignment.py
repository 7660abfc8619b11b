"""Optimal linear assignment and row-set alignment between palette blocks.

The Hungarian solver is the inner engine of the palette sort: every merge
step aligns the color-slot rows of two palette blocks by solving a K x K
assignment over modified-Hausdorff costs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .color import PaletteSet


@dataclass(frozen=True)
class AssignmentResult:
    """A bijection on {0..K-1} and its total cost under the matrix solved."""

    perm: np.ndarray  # perm[k] = assigned column for row k
    total_cost: float

    def __post_init__(self):
        p = np.asarray(self.perm, dtype=np.intp)
        if sorted(p.tolist()) != list(range(len(p))):
            raise ValueError("assignment is not a permutation")
        object.__setattr__(self, "perm", p)


def _perm_cost(cost: np.ndarray, perm: np.ndarray) -> float:
    total = 0.0
    for k in range(len(perm)):
        total += float(cost[k, perm[k]])
    return total


def _lex_refine(
    cost: np.ndarray, perm: np.ndarray, u: np.ndarray, v: np.ndarray, opt: float
) -> np.ndarray:
    """Lexicographically smallest permutation among equal-cost optima.

    Complementary slackness: every optimal assignment uses only cells whose
    reduced cost under the solver's final duals is zero, and that certificate
    survives fixing such cells. Candidate sets are therefore singletons away
    from ties, and the refinement costs nothing in the common case; actual
    ties are confirmed by solving the remaining subproblem.
    """
    n = cost.shape[0]
    tol = 1e-9 * max(1.0, float(np.abs(cost).max()))
    reduced = cost - u[:, None] - v[None, :]
    completion = {i: perm[i] for i in range(n)}  # valid optimal tail
    out = np.empty(n, dtype=np.intp)
    free = list(range(n))
    acc = 0.0
    for i in range(n):
        chosen = completion[i]
        for j in sorted(free):
            if j == completion[i]:
                chosen = j
                break  # feasible by construction, and lex-smallest so far
            if reduced[i, j] > tol:
                continue
            rest_rows = np.arange(i + 1, n)
            rest_cols = np.array([c for c in free if c != j], dtype=np.intp)
            if len(rest_rows) == 0:
                tail_perm = np.empty(0, dtype=np.intp)
                tail_cost = 0.0
            else:
                sub = np.ascontiguousarray(cost[np.ix_(rest_rows, rest_cols)])
                tail_perm, _, _ = kernels.solve_assignment(sub)
                tail_cost = _perm_cost(sub, tail_perm)
            if acc + cost[i, j] + tail_cost <= opt + tol:
                chosen = j
                for a, r in enumerate(rest_rows):
                    completion[r] = rest_cols[tail_perm[a]]
                break
        out[i] = chosen
        free.remove(chosen)
        acc += cost[i, chosen]
    return out


def hungarian(cost) -> AssignmentResult:
    """Minimum-cost assignment for a square cost matrix.

    Negative entries are shifted out internally; the permutation is invariant
    to constant shifts and the reported cost always refers to the original
    matrix. Equal-cost optima resolve to the lexicographically smallest
    permutation.
    """
    c = np.ascontiguousarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("cost matrix must be square")
    if c.size == 0:
        raise ValueError("cost matrix must be non-empty")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix must be finite")
    cmin = float(c.min())
    shifted = c - cmin if cmin < 0 else c
    perm, u, v = kernels.solve_assignment(shifted)
    best = _perm_cost(shifted, perm)
    refined = _lex_refine(shifted, perm, u, v, best)
    if _perm_cost(shifted, refined) <= best:
        perm = refined
    return AssignmentResult(perm=perm, total_cost=_perm_cost(c, perm))


def align_row_sets(p: PaletteSet, q: PaletteSet) -> AssignmentResult:
    """Best bijection g between the color-slot rows of two palette blocks.

    Minimizes the summed MHD between the set of k-th colors across ``p`` and
    the set of g(k)-th colors across ``q``.
    """
    if p.k != q.k:
        raise ValueError(f"palette sets disagree on K ({p.k} != {q.k})")
    cost = kernels.row_set_cost(
        np.ascontiguousarray(p.colors), np.ascontiguousarray(q.colors)
    )
    return hungarian(cost)
