"""Partially observed palettes and slot alignment against a sorted set.

Completion inputs arrive as an unordered handful of colors. Before a model
can fill in the gaps, each observed color needs a slot index consistent with
the training ordering; this module finds it by aligning the colors against
the few most similar training palettes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .assignment import hungarian
from .bps import SortedPaletteSet
from .color import PaletteSet


@dataclass(frozen=True)
class PartialPalette:
    """K color slots with an observed mask; at least one slot observed."""

    colors: np.ndarray  # (K, 3); rows at unobserved slots are ignored
    observed: np.ndarray  # (K,) bool

    def __post_init__(self):
        colors = np.asarray(self.colors, dtype=np.float64)
        observed = np.asarray(self.observed, dtype=bool)
        if colors.ndim != 2 or colors.shape[1] != 3:
            raise ValueError("colors must have shape (K, 3)")
        if observed.shape != (colors.shape[0],):
            raise ValueError("observed mask must have one entry per slot")
        if not observed.any():
            raise ValueError("at least one color must be observed")
        colors = colors.copy()
        colors[~observed] = 0.0
        colors.flags.writeable = False
        observed.flags.writeable = False
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "observed", observed)

    @property
    def k(self) -> int:
        return self.colors.shape[0]

    @property
    def n_observed(self) -> int:
        return int(self.observed.sum())

    def observed_colors(self) -> np.ndarray:
        return self.colors[self.observed]

    def observed_dims(self) -> np.ndarray:
        """Boolean mask over the flattened 3K feature dimensions."""
        return np.repeat(self.observed, 3)

    @classmethod
    def from_colors(cls, colors, k: int) -> "PartialPalette":
        """Unordered observed colors placed in the first slots of a K palette."""
        obs = np.asarray(colors, dtype=np.float64).reshape(-1, 3)
        if not 1 <= len(obs) <= k:
            raise ValueError("observed color count must be in 1..K")
        full = np.zeros((k, 3))
        full[: len(obs)] = obs
        mask = np.zeros(k, dtype=bool)
        mask[: len(obs)] = True
        return cls(colors=full, observed=mask)


def nearest_palettes(obs: np.ndarray, s: SortedPaletteSet | PaletteSet, count: int) -> np.ndarray:
    """Indices of the MHD-nearest palettes to an observed color set."""
    d = kernels.mhd_to_set(
        np.ascontiguousarray(obs, dtype=np.float64), np.ascontiguousarray(s.colors)
    )
    return np.argsort(d, kind="stable")[:count]


def align_partial(
    p: PartialPalette | np.ndarray,
    s: SortedPaletteSet | PaletteSet,
    exemplars: int = 3,
) -> PartialPalette:
    """Assign slot indices to unordered observed colors.

    Takes the (up to 3) MHD-nearest training palettes as exemplars and solves
    an assignment between slots and observed colors, where the cost of giving
    slot k to a color is its mean distance to the exemplars' slot-k colors.
    Slots that receive no color are marked missing.
    """
    obs = p.observed_colors() if isinstance(p, PartialPalette) else np.asarray(p, dtype=np.float64).reshape(-1, 3)
    k = s.k
    if not 1 <= len(obs) <= k:
        raise ValueError("observed color count must be in 1..K")
    idx = nearest_palettes(obs, s, min(exemplars, s.colors.shape[0]))
    ex = s.colors[idx]  # (E, K, 3)

    # cost[k, j]: mean distance from exemplar slot-k colors to observed color j
    d = np.sqrt(((ex[:, :, None, :] - obs[None, None, :, :]) ** 2).sum(axis=3))
    cost = np.zeros((k, k))
    cost[:, : len(obs)] = d.mean(axis=0)
    g = hungarian(cost).perm  # slot -> observed index (or dummy >= len(obs))

    colors = np.zeros((k, 3))
    mask = np.zeros(k, dtype=bool)
    for slot in range(k):
        j = g[slot]
        if j < len(obs):
            colors[slot] = obs[j]
            mask[slot] = True
    return PartialPalette(colors=colors, observed=mask)
