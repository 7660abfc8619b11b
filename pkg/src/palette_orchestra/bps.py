"""Binary Palette Sort: divide-and-conquer color ordering for palette sets.

The sort recursively partitions a palette set into halves (a kernel-PCA
projection onto a line, split at the median), sorts each half, and merges
them back by aligning their color-slot rows with an optimal assignment over
modified-Hausdorff costs. The result permutes colors *within* each palette
so corresponding colors share slot indices across the whole set; the palette
sequence itself is left in input order.

Brightness and hue orderings ship as baselines, along with the global
pairwise-distance objective and the consecutive-palette error used to score
orderings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .assignment import hungarian
from .color import PaletteSet


@dataclass(frozen=True)
class PartitionResult:
    left: PaletteSet
    right: PaletteSet
    membership: np.ndarray  # 1 for palettes in the left half, 0 otherwise


@dataclass(frozen=True)
class SortedPaletteSet:
    """A palette set plus the per-palette permutation that ordered it.

    ``provenance[n, k]`` is the input slot whose color now sits at slot k of
    palette n, so each row is a bijection on 0..K-1 and sorting never gains
    or loses colors.
    """

    palettes: PaletteSet
    provenance: np.ndarray

    def __post_init__(self):
        prov = np.asarray(self.provenance, dtype=np.intp)
        if prov.shape != (self.palettes.n, self.palettes.k):
            raise ValueError("provenance shape must be (N, K)")
        ref = np.arange(self.palettes.k)
        if not np.all(np.sort(prov, axis=1) == ref[None, :]):
            raise ValueError("every provenance row must be a permutation")
        object.__setattr__(self, "provenance", prov)

    @property
    def n(self) -> int:
        return self.palettes.n

    @property
    def k(self) -> int:
        return self.palettes.k

    @property
    def colors(self) -> np.ndarray:
        return self.palettes.colors

    @classmethod
    def identity(cls, ps: PaletteSet) -> "SortedPaletteSet":
        prov = np.tile(np.arange(ps.k), (ps.n, 1))
        return cls(palettes=ps, provenance=prov)


def _kpca_scores(dist: np.ndarray) -> np.ndarray:
    """First kernel-PC coordinate per palette from a pairwise MHD matrix.

    Kernel k(P,Q) = exp(-mhd^2 / sigma^2) with sigma the median pairwise
    MHD (scale-free bandwidth). The kernel may be indefinite, so negative
    eigenvalues of the centered matrix are clipped before projecting.
    """
    n = dist.shape[0]
    if n == 1:
        return np.zeros(1)
    off = dist[np.triu_indices(n, k=1)]
    sigma = float(np.median(off))
    if sigma <= 0:
        return np.zeros(n)
    gram = np.exp(-((dist / sigma) ** 2))
    ones = np.full((n, n), 1.0 / n)
    centered = gram - ones @ gram - gram @ ones + ones @ gram @ ones
    centered = 0.5 * (centered + centered.T)
    eigvals, eigvecs = np.linalg.eigh(centered)
    lead = int(np.argmax(np.clip(eigvals, 0.0, None)))
    lam = max(float(eigvals[lead]), 0.0)
    if lam <= 1e-12:
        return np.zeros(n)
    vec = eigvecs[:, lead]
    pivot = int(np.argmax(np.abs(vec)))
    if vec[pivot] < 0:
        vec = -vec
    return vec * np.sqrt(lam)


def _stable_order(scores: np.ndarray) -> np.ndarray:
    return np.argsort(scores, kind="stable")


def kpca_order(x: PaletteSet) -> PaletteSet:
    """Palette sequence reordered by its coordinate on the first kernel PC."""
    dist = kernels.pairwise_mhd(np.ascontiguousarray(x.colors))
    return x.subset(_stable_order(_kpca_scores(dist)))


def partition(x: PaletteSet) -> PartitionResult:
    """Median split of the KPCA-ordered sequence; left = lower coordinates."""
    if x.n < 2:
        raise ValueError("cannot partition fewer than two palettes")
    dist = kernels.pairwise_mhd(np.ascontiguousarray(x.colors))
    order = _stable_order(_kpca_scores(dist))
    half = (x.n + 1) // 2
    left_idx = np.sort(order[:half])
    right_idx = np.sort(order[half:])
    membership = np.zeros(x.n, dtype=np.intp)
    membership[left_idx] = 1
    return PartitionResult(
        left=x.subset(left_idx), right=x.subset(right_idx), membership=membership
    )


def merge(p: SortedPaletteSet, q: SortedPaletteSet) -> SortedPaletteSet:
    """Align q's color-slot rows to p and concatenate; p passes unchanged."""
    if p.n == 0:
        return q
    if q.n == 0:
        return p
    if p.k != q.k:
        raise ValueError(f"palette sets disagree on K ({p.k} != {q.k})")
    cost = kernels.row_set_cost(
        np.ascontiguousarray(p.colors), np.ascontiguousarray(q.colors)
    )
    g = hungarian(cost).perm
    q_colors = q.colors[:, g, :]
    q_prov = q.provenance[:, g]
    return SortedPaletteSet(
        palettes=PaletteSet(np.concatenate([p.colors, q_colors])),
        provenance=np.concatenate([p.provenance, q_prov]),
    )


def _empty_sorted(k: int) -> SortedPaletteSet:
    # bypass PaletteSet's N >= 1 check: merge's Eq-style base cases need it
    ps = object.__new__(PaletteSet)
    arr = np.empty((0, k, 3))
    arr.flags.writeable = False
    object.__setattr__(ps, "colors", arr)
    sp = object.__new__(SortedPaletteSet)
    object.__setattr__(sp, "palettes", ps)
    object.__setattr__(sp, "provenance", np.empty((0, k), dtype=np.intp))
    return sp


def empty_sorted_set(k: int) -> SortedPaletteSet:
    """An empty sorted set (merge identity element)."""
    return _empty_sorted(k)


def bps_sort(x: PaletteSet) -> SortedPaletteSet:
    """Binary Palette Sort over a whole set.

    The output keeps the input palette sequence; only colors move. The full
    pairwise MHD matrix is computed once and sliced through the recursion.
    """
    colors = np.ascontiguousarray(x.colors)
    dist = kernels.pairwise_mhd(colors)

    def rec(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # returns (palette indices in working order, per-palette permutations)
        if len(idx) == 1:
            return idx, np.arange(x.k, dtype=np.intp)[None, :]
        scores = _kpca_scores(dist[np.ix_(idx, idx)])
        order = _stable_order(scores)
        half = (len(idx) + 1) // 2
        li, lp = rec(idx[np.sort(order[:half])])
        ri, rp = rec(idx[np.sort(order[half:])])
        left_cols = _apply_perms(colors[li], lp)
        right_cols = _apply_perms(colors[ri], rp)
        cost = kernels.row_set_cost(
            np.ascontiguousarray(left_cols), np.ascontiguousarray(right_cols)
        )
        g = hungarian(cost).perm
        rp = rp[:, g]
        return np.concatenate([li, ri]), np.concatenate([lp, rp])

    work_idx, perms = rec(np.arange(x.n, dtype=np.intp))
    provenance = np.empty((x.n, x.k), dtype=np.intp)
    provenance[work_idx] = perms
    sorted_colors = _apply_perms(colors, provenance)
    return SortedPaletteSet(palettes=PaletteSet(sorted_colors), provenance=provenance)


def _apply_perms(colors: np.ndarray, perms: np.ndarray) -> np.ndarray:
    return np.take_along_axis(colors, perms[:, :, None], axis=1)


def objective(x: PaletteSet | SortedPaletteSet) -> float:
    """Global ordering objective: summed slot-wise distance over all pairs."""
    colors = x.colors
    n = colors.shape[0]
    total = 0.0
    for i in range(n):
        d = np.sqrt(((colors[i][None, :, :] - colors) ** 2).sum(axis=2))
        total += float(d.sum())
    return total  # both (n, m) and (m, n) are counted, diagonal adds zero


def brightness_sort(x: PaletteSet) -> SortedPaletteSet:
    """Each palette independently sorted ascending by L."""
    prov = np.argsort(x.colors[:, :, 0], axis=1, kind="stable").astype(np.intp)
    return SortedPaletteSet(
        palettes=PaletteSet(_apply_perms(x.colors, prov)), provenance=prov
    )


def hue_sort(x: PaletteSet) -> SortedPaletteSet:
    """Each palette independently sorted ascending by hue angle.

    Hue is atan2(b - 0.5, a - 0.5) in the normalized ab plane; gray colors
    (zero chroma) keep their original relative order via the stable sort.
    """
    hue = np.arctan2(x.colors[:, :, 2] - 0.5, x.colors[:, :, 1] - 0.5)
    prov = np.argsort(hue, axis=1, kind="stable").astype(np.intp)
    return SortedPaletteSet(
        palettes=PaletteSet(_apply_perms(x.colors, prov)), provenance=prov
    )


def consecutive_distance(x: PaletteSet | SortedPaletteSet) -> float:
    """Mean slot-wise color distance between consecutive palettes."""
    colors = x.colors
    if colors.shape[0] < 2:
        raise ValueError("need at least two palettes")
    d = np.sqrt(((colors[:-1] - colors[1:]) ** 2).sum(axis=2))
    return float(d.mean())
