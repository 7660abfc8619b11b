"""Synthetic palette datasets with known structure.

Two families: planted-correspondence sets for scoring orderings (each
palette scrambles the same K anchor colors plus noise, so a perfect sort
recovers the anchors' slots), and smooth-manifold sets for completion
benchmarks (palettes traced from a 2-D latent parameter, then shuffled, so
consistent ordering genuinely helps downstream models).
"""

from __future__ import annotations

import numpy as np

from .color import PaletteSet


def planted_anchor_colors(k: int) -> np.ndarray:
    """K anchor colors designed to separate the ordering baselines.

    Luminance comes in near-tied pairs (brightness sorting swaps them under
    noise) while chroma walks outward along a single hue ray (hue angle is
    pure noise, full-Lab distances stay well separated).
    """
    pairs = -(-k // 2)
    pair_idx = np.arange(k) // 2
    within = np.arange(k) % 2
    span = max(pairs - 1, 1)
    lum = 0.2 + 0.6 * pair_idx / span + 0.01 * within
    theta = 0.7
    radius = 0.05 + 0.03 * np.arange(k)
    a = 0.5 + radius * np.cos(theta)
    b = 0.5 + radius * np.sin(theta)
    return np.clip(np.stack([lum, a, b], axis=1), 0.02, 0.98)


def planted_ordering_dataset(
    n: int, k: int, seed: int, noise_l: float = 0.015, noise_ab: float = 0.004
) -> PaletteSet:
    """n palettes of the K anchors plus noise, colors shuffled per palette."""
    rng = np.random.default_rng(seed)
    anchors = planted_anchor_colors(k)
    colors = np.tile(anchors, (n, 1, 1))
    colors[:, :, 0] += rng.normal(scale=noise_l, size=(n, k))
    colors[:, :, 1:] += rng.normal(scale=noise_ab, size=(n, k, 2))
    for i in range(n):
        colors[i] = colors[i][rng.permutation(k)]
    return PaletteSet(np.clip(colors, 0.0, 1.0))


def manifold_palette_dataset(
    n: int, k: int = 5, seed: int = 0, noise: float = 0.008, shuffle: bool = True
) -> PaletteSet:
    """Palettes traced from a smooth 2-D latent parameter, optionally shuffled.

    Slot i follows its own smooth trajectory of the shared latent (t1, t2),
    so observing a few colors pins down the latent and the rest of the
    palette is predictable -- provided the slots have been made consistent
    again by sorting.
    """
    rng = np.random.default_rng(seed)
    t = rng.random((n, 2))
    phases = 2.0 * np.pi * np.arange(k) / k
    base_l = 0.3 + 0.4 * np.arange(k) / max(k - 1, 1)
    colors = np.empty((n, k, 3))
    for i in range(k):
        lum = base_l[i] + 0.22 * (t[:, 0] - 0.5) + 0.06 * np.sin(2 * np.pi * t[:, 1] + phases[i])
        ang = phases[i] + 0.9 * (t[:, 1] - 0.5)
        rad = 0.16 + 0.06 * np.sin(2 * np.pi * t[:, 0] + phases[i])
        colors[:, i, 0] = lum
        colors[:, i, 1] = 0.5 + rad * np.cos(ang)
        colors[:, i, 2] = 0.5 + rad * np.sin(ang)
    colors += rng.normal(scale=noise, size=colors.shape)
    colors = np.clip(colors, 0.02, 0.98)
    if shuffle:
        for i in range(n):
            colors[i] = colors[i][rng.permutation(k)]
    return PaletteSet(colors)


def two_cluster_dataset(per_cluster: int, k: int, seed: int, separation: float = 0.3) -> tuple[PaletteSet, np.ndarray]:
    """Two tight palette clusters; returns the set and its cluster labels."""
    rng = np.random.default_rng(seed)
    base = rng.random((2, k, 3)) * 0.3 + 0.2
    base[1] += separation
    colors = []
    labels = []
    for c in range(2):
        for _ in range(per_cluster):
            colors.append(np.clip(base[c] + rng.normal(scale=0.01, size=(k, 3)), 0, 1))
            labels.append(c)
    order = rng.permutation(len(colors))
    colors = np.asarray(colors)[order]
    labels = np.asarray(labels)[order]
    return PaletteSet(colors), labels
