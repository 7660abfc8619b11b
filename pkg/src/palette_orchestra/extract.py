"""Build palette datasets from image collections.

Pipeline per image: rescale so the larger dimension is 500 px, slide a
200x200 window with a 100 px step, sample 1000 pixels per patch, and cluster
them to K colors in normalized Lab. A manifest fixes the inputs, K, the
target dataset size, and the seed, making dataset construction a pure
function of (manifest, seed).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import kernels
from .color import MAX_PALETTE_SIZE, Palette, PaletteSet, srgb_array_to_lab

log = logging.getLogger(__name__)

TARGET_LARGE_DIM = 500


@dataclass(frozen=True)
class PatchSpec:
    patch_size: int = 200
    step: int = 100
    samples_per_patch: int = 1000

    def __post_init__(self):
        if not self.patch_size >= self.step >= 1:
            raise ValueError("need patch_size >= step >= 1")
        if self.samples_per_patch < 1:
            raise ValueError("samples_per_patch must be positive")


@dataclass(frozen=True)
class DatasetManifest:
    images: tuple[str, ...]
    k: int = 5
    palettes_per_set: int = 400
    seed: int = 0
    patch: PatchSpec = field(default_factory=PatchSpec)

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(str(p) for p in self.images))
        if not 1 <= self.k <= MAX_PALETTE_SIZE:
            raise ValueError(f"k must be in 1..{MAX_PALETTE_SIZE}")
        if self.palettes_per_set < 1:
            raise ValueError("palettes_per_set must be positive")
        if self.patch.samples_per_patch < self.k:
            raise ValueError("samples_per_patch must be at least k")

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetManifest":
        patch = PatchSpec(**doc["patch"]) if "patch" in doc else PatchSpec()
        return cls(
            images=tuple(doc["images"]),
            k=int(doc.get("k", 5)),
            palettes_per_set=int(doc.get("palettes_per_set", 400)),
            seed=int(doc.get("seed", 0)),
            patch=patch,
        )


def rescale_image(image: Image.Image) -> Image.Image:
    """Resize so max(width, height) == 500, aspect preserved, bilinear."""
    w, h = image.size
    if w == 0 or h == 0:
        raise ValueError("cannot rescale a zero-dimension image")
    if max(w, h) == TARGET_LARGE_DIM:
        return image
    scale = TARGET_LARGE_DIM / max(w, h)
    nw = max(1, round(w * scale))
    nh = max(1, round(h * scale))
    return image.resize((nw, nh), Image.Resampling.BILINEAR)


def extract_patches(image: Image.Image, spec: PatchSpec = PatchSpec()) -> list[np.ndarray]:
    """Grid of patches as float arrays in [0,1], shape (ph, pw, 3).

    Images smaller than the patch in either dimension yield one centered
    patch cropped to the image bounds.
    """
    arr = np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0
    h, w = arr.shape[:2]
    p, s = spec.patch_size, spec.step
    if w < p or h < p:
        pw, ph = min(w, p), min(h, p)
        x0 = (w - pw) // 2
        y0 = (h - ph) // 2
        return [arr[y0 : y0 + ph, x0 : x0 + pw]]
    xs = range(0, (w - p) // s * s + 1, s)
    ys = range(0, (h - p) // s * s + 1, s)
    return [arr[y : y + p, x : x + p] for y in ys for x in xs]


def sample_pixels(patch: np.ndarray, n: int, seed) -> np.ndarray:
    """n pixels sampled uniformly with replacement, as normalized Lab (n, 3)."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    flat = patch.reshape(-1, patch.shape[-1])
    idx = rng.integers(0, flat.shape[0], size=n)
    return srgb_array_to_lab(flat[idx])


@dataclass(frozen=True)
class KmeansResult:
    palette: Palette
    degenerate: bool
    inertia_log: tuple[float, ...]


def kmeans_palette(pixels: np.ndarray, k: int, seed) -> KmeansResult:
    """Lloyd's algorithm with k-means++ seeding over Lab pixels.

    At most 100 iterations, stopping when centers move less than 1e-6. If the
    input has fewer distinct colors than k, the missing centers duplicate the
    nearest existing ones and the result is flagged degenerate.
    """
    pts = np.asarray(pixels, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("pixels must have shape (n, 3)")
    if pts.shape[0] < k:
        raise ValueError("need at least k pixels")
    rng = np.random.default_rng(seed)
    distinct = np.unique(pts, axis=0)
    if distinct.shape[0] < k:
        centers = _pad_duplicates(distinct, k)
        return KmeansResult(Palette(centers), degenerate=True, inertia_log=())

    centers = _kmeans_pp_init(pts, k, rng)
    log_inertia: list[float] = []
    for _ in range(100):
        labels = kernels.nearest_slot(pts, np.ascontiguousarray(centers))
        inertia = float(((pts - centers[labels]) ** 2).sum())
        log_inertia.append(inertia)
        new_centers = centers.copy()
        for j in range(k):
            members = pts[labels == j]
            if len(members):
                new_centers[j] = members.mean(axis=0)
            else:  # recenter empty cluster on the farthest point
                far = int(((pts - centers[labels]) ** 2).sum(axis=1).argmax())
                new_centers[j] = pts[far]
        moved = float(np.abs(new_centers - centers).max())
        centers = new_centers
        if moved < 1e-6:
            break
    order = np.lexsort((centers[:, 2], centers[:, 1], centers[:, 0]))
    return KmeansResult(
        Palette(np.clip(centers[order], 0.0, 1.0)),
        degenerate=False,
        inertia_log=tuple(log_inertia),
    )


def _pad_duplicates(distinct: np.ndarray, k: int) -> np.ndarray:
    centers = [c for c in distinct]
    while len(centers) < k:
        centers.append(centers[(len(centers) - len(distinct)) % len(distinct)])
    return np.asarray(centers[:k])


def _kmeans_pp_init(pts: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty((k, 3))
    centers[0] = pts[rng.integers(0, len(pts))]
    d2 = ((pts - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = pts[rng.integers(0, len(pts))]
            continue
        probs = d2 / total
        centers[j] = pts[rng.choice(len(pts), p=probs)]
        d2 = np.minimum(d2, ((pts - centers[j]) ** 2).sum(axis=1))
    return centers


def image_palettes(image: Image.Image, k: int, patch: PatchSpec, base_seed: int) -> list[Palette]:
    """All patch palettes of one (already opened) image."""
    patches = extract_patches(rescale_image(image), patch)
    out = []
    for i, pt in enumerate(patches):
        seed = hash_seed(base_seed, i)
        pixels = sample_pixels(pt, patch.samples_per_patch, seed)
        out.append(kmeans_palette(pixels, k, seed).palette)
    return out


def build_dataset(manifest: DatasetManifest) -> PaletteSet:
    """Run the full extraction pipeline for every readable manifest image.

    Palettes are pooled in manifest order and uniformly subsampled (without
    replacement) to ``palettes_per_set`` when there are more.
    """
    palettes: list[Palette] = []
    usable = 0
    for img_idx, path in enumerate(manifest.images):
        try:
            with Image.open(path) as img:
                img.load()
                palettes.extend(
                    image_palettes(
                        img, manifest.k, manifest.patch, hash_seed(manifest.seed, img_idx)
                    )
                )
            usable += 1
        except (OSError, ValueError) as exc:
            log.warning("skipping unreadable image %s: %s", path, exc)
    if usable == 0:
        raise ValueError("no usable images in manifest")
    if len(palettes) > manifest.palettes_per_set:
        sub_rng = np.random.default_rng(hash_seed(manifest.seed, 0x5AB5E7))
        keep = np.sort(
            sub_rng.choice(len(palettes), size=manifest.palettes_per_set, replace=False)
        )
        palettes = [palettes[i] for i in keep]
    return PaletteSet.from_palettes(palettes)


def hash_seed(*parts: int) -> int:
    """Stable derived seed for a (dataset seed, image, patch) combination."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h ^= p & 0xFFFFFFFFFFFFFFFF
        h = (h * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        h ^= h >> 31
    return h & 0x7FFFFFFF
