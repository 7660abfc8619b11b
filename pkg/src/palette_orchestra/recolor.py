"""Palette-driven image recolorization.

Single-palette mode shifts each pixel's chroma by the (target - source)
delta of its nearest source-palette slot, optionally preserving per-pixel
luminance exactly. Enriched mode extracts a palette per image segment,
completes it against a trained latent model, and recolors each segment with
its own predicted palette, so regions keep local shade variation instead of
collapsing to a single hue.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import kernels
from .color import Palette, lab_array_to_srgb, srgb_array_to_lab
from .extract import hash_seed, kmeans_palette
from .gplvm import GplvmModel, gplvm_complete
from .partial import align_partial

log = logging.getLogger(__name__)

MIN_GRID_CELL = 8


@dataclass(frozen=True)
class SegmentMap:
    labels: np.ndarray  # (H, W) int, contiguous 0..count-1
    count: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.intp)
        if labels.ndim != 2:
            raise ValueError("labels must be a 2-D map")
        if labels.min() < 0 or labels.max() >= self.count:
            raise ValueError("labels must be contiguous in 0..count-1")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class RecolorSpec:
    source: Palette
    target: Palette
    preserve_luminance: bool = True
    blend: float = 1.0

    def __post_init__(self):
        if self.source.k != self.target.k:
            raise ValueError("source and target palettes must share K")
        if not 0.0 <= self.blend <= 1.0:
            raise ValueError("blend weight must be in [0, 1]")


def segment_grid(shape_or_image, cell: int) -> SegmentMap:
    """Regular grid labeling; cells are cell x cell except at the borders."""
    if cell < MIN_GRID_CELL:
        raise ValueError(f"grid cell must be at least {MIN_GRID_CELL} px")
    if isinstance(shape_or_image, Image.Image):
        w, h = shape_or_image.size
    else:
        arr = np.asarray(shape_or_image)
        if arr.ndim >= 2:
            h, w = arr.shape[:2]
        else:
            h, w = int(shape_or_image[0]), int(shape_or_image[1])
    cols = -(-w // cell)
    rows = -(-h // cell)
    yy, xx = np.mgrid[0:h, 0:w]
    labels = (yy // cell) * cols + (xx // cell)
    return SegmentMap(labels=labels, count=rows * cols)


def _to_rgb01(image) -> tuple[np.ndarray, bool]:
    if isinstance(image, Image.Image):
        return np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0, True
    arr = np.asarray(image)
    if arr.dtype == np.uint8:
        return arr.astype(np.float64) / 255.0, False
    return arr.astype(np.float64), False


def _from_rgb(arr: np.ndarray, as_pil: bool):
    return Image.fromarray(arr) if as_pil else arr


def recolor_lab(lab: np.ndarray, spec: RecolorSpec) -> np.ndarray:
    """Recolor a normalized-Lab image array; returns a new Lab array.

    With luminance preservation the L channel is carried over bit-for-bit.
    """
    h, w = lab.shape[:2]
    flat = lab.reshape(-1, 3)
    if spec.preserve_luminance:
        feat = np.ascontiguousarray(flat[:, 1:3])
        ref = np.ascontiguousarray(spec.source.colors[:, 1:3])
    else:
        feat = np.ascontiguousarray(flat)
        ref = np.ascontiguousarray(spec.source.colors)
    slots = kernels.nearest_slot(feat, ref)
    delta = spec.target.colors - spec.source.colors
    if spec.preserve_luminance:
        delta = delta.copy()
        delta[:, 0] = 0.0
    recolored = flat + delta[slots]
    out = (1.0 - spec.blend) * flat + spec.blend * recolored
    out = np.clip(out, 0.0, 1.0)
    if spec.preserve_luminance:
        out[:, 0] = flat[:, 0]
    return out.reshape(h, w, 3)


def recolor_single(image, spec: RecolorSpec):
    """Recolor a whole image with one palette pair. PNG-friendly I/O.

    Accepts a PIL image or an RGB array; returns the same kind. When target
    equals source the output equals the input up to sRGB re-quantization.
    """
    rgb01, as_pil = _to_rgb01(image)
    lab = srgb_array_to_lab(rgb01)
    out_lab = recolor_lab(lab, spec)
    rgb, _ = lab_array_to_srgb(out_lab)
    return _from_rgb(rgb, as_pil)


def match_palette(source: Palette, pool) -> Palette:
    """Pool palette closest to ``source`` after optimal slot alignment.

    Every pool palette is aligned to the source with a color-to-color
    assignment; the palette with the smallest post-alignment summed slot
    distance wins (ties to the lowest index) and is returned in aligned
    order.
    """
    from .assignment import hungarian

    pool_colors = pool.colors if hasattr(pool, "colors") else np.asarray(pool)
    if pool_colors.ndim != 3 or len(pool_colors) == 0:
        raise ValueError("palette pool must be a non-empty (N, K, 3) collection")
    if pool_colors.shape[1] != source.k:
        raise ValueError("pool palettes must share K with the source")
    best = None
    best_cost = np.inf
    for cand in pool_colors:
        cost = np.sqrt(((source.colors[:, None, :] - cand[None, :, :]) ** 2).sum(axis=2))
        res = hungarian(cost)
        if res.total_cost < best_cost:
            best_cost = res.total_cost
            best = cand[res.perm]
    return Palette(best)


def recolor_enriched(
    image,
    segments: SegmentMap,
    model: GplvmModel,
    sim_iters: int = 20,
    seed: int = 0,
    max_pixels_per_segment: int = 1000,
    preserve_luminance: bool = True,
    blend: float = 1.0,
):
    """Per-segment palette extraction, completion, and recolorization.

    Each segment gets its own k-means palette, aligned into the model's slot
    ordering and completed against the manifold; segments smaller than K
    pixels pass through unmodified with a warning.
    """
    rgb01, as_pil = _to_rgb01(image)
    lab = srgb_array_to_lab(rgb01)
    h, w = lab.shape[:2]
    if segments.labels.shape != (h, w):
        raise ValueError("segment map does not match the image size")
    flat = lab.reshape(-1, 3)
    seg_flat = segments.labels.reshape(-1)
    out = flat.copy()
    training = model.training_palettes()
    for s in range(segments.count):
        mask = seg_flat == s
        pix = flat[mask]
        if len(pix) < model.k:
            log.warning("segment %d has %d px < K=%d; passing through", s, len(pix), model.k)
            continue
        seg_seed = hash_seed(seed, s)
        if len(pix) > max_pixels_per_segment:
            rng = np.random.default_rng(seg_seed)
            pix = pix[rng.choice(len(pix), size=max_pixels_per_segment, replace=False)]
        source = kmeans_palette(pix, model.k, seg_seed).palette
        partial = align_partial(source.colors, training)
        slotted_source = Palette(_slotted(partial, source))
        target = gplvm_complete(model, partial, sim_iters=sim_iters)
        spec = RecolorSpec(
            source=slotted_source,
            target=target,
            preserve_luminance=preserve_luminance,
            blend=blend,
        )
        seg_lab = flat[mask].reshape(-1, 1, 3)
        out[mask] = recolor_lab(seg_lab, spec).reshape(-1, 3)
    rgb, _ = lab_array_to_srgb(out.reshape(h, w, 3))
    return _from_rgb(rgb, as_pil)


def _slotted(partial, source: Palette) -> np.ndarray:
    """Slot-ordered copy of the source palette for a fully observed partial."""
    if partial.observed.all():
        return partial.colors
    colors = partial.colors.copy()
    colors[~partial.observed] = source.colors[: (~partial.observed).sum()]
    return colors
