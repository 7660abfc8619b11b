"""Color representations, sRGB<->CIELAB conversion, and set distances.

All colors in this package live in *normalized* CIELAB: L/100, (a+128)/255,
(b+128)/255, each component in [0, 1]. The unit range keeps feature scaling
sane for the latent models and makes a 0.05 step correspond to a visible
color difference in both the L and a channels.

Colorimetry is D65 / 2-degree observer, the sRGB convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels

MAX_PALETTE_SIZE = 16

# sRGB (linear) -> XYZ, D65 white, Bruce Lindbloom's matrix
_M_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_M_XYZ_TO_RGB = np.linalg.inv(_M_RGB_TO_XYZ)
_WHITE = np.array([0.95047, 1.0, 1.08883])

_EPSILON = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0


class LabColor(NamedTuple):
    """A color in normalized CIELAB; every component in [0, 1]."""

    l: float
    a: float
    b: float

    def to_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)

    def denormalize(self) -> tuple[float, float, float]:
        """Back to conventional CIELAB units (L in 0..100, a/b in -128..127)."""
        return (self.l * 100.0, self.a * 255.0 - 128.0, self.b * 255.0 - 128.0)

    @classmethod
    def from_cielab(cls, L: float, a: float, b: float) -> "LabColor":
        return cls(L / 100.0, (a + 128.0) / 255.0, (b + 128.0) / 255.0)


class SrgbColor(NamedTuple):
    r: int
    g: int
    b: int
    clipped: bool = False


def _check_lab01(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite components")
    if arr.size and (arr.min() < -1e-9 or arr.max() > 1 + 1e-9):
        raise ValueError(f"{what} components must lie in [0, 1]")


@dataclass(frozen=True)
class Palette:
    """An ordered tuple of exactly K colors, stored as a (K, 3) array."""

    colors: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.colors, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError("palette colors must have shape (K, 3)")
        if not 1 <= arr.shape[0] <= MAX_PALETTE_SIZE:
            raise ValueError(f"palette size must be in 1..{MAX_PALETTE_SIZE}")
        _check_lab01(arr, "palette")
        arr = np.clip(arr, 0.0, 1.0)
        arr.flags.writeable = False
        object.__setattr__(self, "colors", arr)

    @property
    def k(self) -> int:
        return self.colors.shape[0]

    def color(self, i: int) -> LabColor:
        return LabColor(*self.colors[i])

    def permuted(self, perm: Sequence[int]) -> "Palette":
        """New palette whose slot k holds the old color at ``perm[k]``."""
        return Palette(self.colors[np.asarray(perm, dtype=np.intp)])


@dataclass(frozen=True)
class PaletteSet:
    """N palettes sharing a common K, stored as an (N, K, 3) array."""

    colors: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.colors, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError("palette set must have shape (N, K, 3)")
        if arr.shape[0] < 1:
            raise ValueError("palette set needs at least one palette")
        if not 1 <= arr.shape[1] <= MAX_PALETTE_SIZE:
            raise ValueError(f"palette size must be in 1..{MAX_PALETTE_SIZE}")
        _check_lab01(arr, "palette set")
        arr = np.clip(arr, 0.0, 1.0)
        arr.flags.writeable = False
        object.__setattr__(self, "colors", arr)

    @classmethod
    def from_palettes(cls, palettes: Iterable[Palette]) -> "PaletteSet":
        stacked = [p.colors for p in palettes]
        if not stacked:
            raise ValueError("palette set needs at least one palette")
        ks = {c.shape[0] for c in stacked}
        if len(ks) != 1:
            raise ValueError("all member palettes must share the same K")
        return cls(np.stack(stacked))

    @property
    def n(self) -> int:
        return self.colors.shape[0]

    @property
    def k(self) -> int:
        return self.colors.shape[1]

    @property
    def palettes(self) -> tuple[Palette, ...]:
        return tuple(Palette(c) for c in self.colors)

    def palette(self, i: int) -> Palette:
        return Palette(self.colors[i])

    def subset(self, idx: Sequence[int]) -> "PaletteSet":
        return PaletteSet(self.colors[np.asarray(idx, dtype=np.intp)])


def _srgb_channel_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_channel_to_srgb(c: np.ndarray) -> np.ndarray:
    c = np.clip(c, 0.0, None)
    return np.where(c <= 0.0031308, c * 12.92, 1.055 * c ** (1.0 / 2.4) - 0.055)


def srgb_array_to_lab(rgb01: np.ndarray) -> np.ndarray:
    """Vectorized sRGB (floats in [0,1], shape (...,3)) to normalized Lab."""
    rgb01 = np.asarray(rgb01, dtype=np.float64)
    linear = _srgb_channel_to_linear(rgb01)
    xyz = linear @ _M_RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _EPSILON, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)
    L = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    out = np.stack([L / 100.0, (a + 128.0) / 255.0, (b + 128.0) / 255.0], axis=-1)
    return np.clip(out, 0.0, 1.0)


def lab_array_to_srgb(lab01: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized normalized Lab to 8-bit sRGB.

    Returns the uint8 array and a boolean mask marking colors that fell
    outside the sRGB gamut and were clamped.
    """
    lab01 = np.asarray(lab01, dtype=np.float64)
    L = lab01[..., 0] * 100.0
    a = lab01[..., 1] * 255.0 - 128.0
    b = lab01[..., 2] * 255.0 - 128.0

    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0

    def f_inv(f: np.ndarray) -> np.ndarray:
        f3 = f**3
        return np.where(f3 > _EPSILON, f3, (116.0 * f - 16.0) / _KAPPA)

    x = f_inv(fx)
    y = np.where(L > _KAPPA * _EPSILON, ((L + 16.0) / 116.0) ** 3, L / _KAPPA)
    z = f_inv(fz)
    xyz = np.stack([x, y, z], axis=-1) * _WHITE
    linear = xyz @ _M_XYZ_TO_RGB.T
    clipped = np.any((linear < -1e-6) | (linear > 1.0 + 1e-6), axis=-1)
    srgb = _linear_channel_to_srgb(np.clip(linear, 0.0, 1.0))
    out = np.clip(np.round(srgb * 255.0), 0, 255).astype(np.uint8)
    return out, clipped


def srgb_to_lab(r: int, g: int, b: int) -> LabColor:
    """Convert one 8-bit sRGB color to normalized CIELAB."""
    for v in (r, g, b):
        if not 0 <= v <= 255:
            raise ValueError("sRGB channels must be in 0..255")
    lab = srgb_array_to_lab(np.array([r, g, b], dtype=np.float64) / 255.0)
    return LabColor(*lab)


def lab_to_srgb(c: LabColor | Sequence[float]) -> SrgbColor:
    """Convert one normalized Lab color to 8-bit sRGB, clamping out-of-gamut."""
    arr = np.asarray(c, dtype=np.float64)
    _check_lab01(arr, "color")
    rgb, clipped = lab_array_to_srgb(arr)
    return SrgbColor(int(rgb[0]), int(rgb[1]), int(rgb[2]), bool(clipped))


def color_dist(c1, c2) -> float:
    """Euclidean distance in normalized Lab space."""
    a = np.asarray(c1, dtype=np.float64)
    b = np.asarray(c2, dtype=np.float64)
    return float(np.linalg.norm(a - b))


def _as_color_set(colors) -> np.ndarray:
    if isinstance(colors, Palette):
        arr = colors.colors
    else:
        arr = np.asarray(colors, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
    if arr.size == 0:
        raise ValueError("empty color set")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("a color set must have shape (n, 3)")
    return np.ascontiguousarray(arr)


def mhd(p, q) -> float:
    """Modified Hausdorff distance between two color sets.

    Max of the two directed average nearest-neighbor distances; each directed
    average divides by the size of its own source set, so sets of different
    cardinality are handled symmetrically.
    """
    return float(kernels.mhd_pair(_as_color_set(p), _as_color_set(q)))
