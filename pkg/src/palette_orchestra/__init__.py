"""Palette extraction, globally consistent ordering, latent-space palette
models, recolorization, benchmarking, and an interactive explorer service."""

import os as _os

_blas_limit = None


def _limit_blas_threads() -> None:
    """Pin BLAS to few threads; our matrices are small enough that OpenBLAS
    thread synchronization costs far more than it buys (set
    PALETTE_ORCHESTRA_BLAS_THREADS to override)."""
    global _blas_limit
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return
    n = int(_os.environ.get("PALETTE_ORCHESTRA_BLAS_THREADS", "1"))
    _blas_limit = threadpool_limits(limits=n, user_api="blas")


_limit_blas_threads()

from .color import LabColor, Palette, PaletteSet, color_dist, lab_to_srgb, mhd, srgb_to_lab

__version__ = "0.1.0"

__all__ = [
    "LabColor",
    "Palette",
    "PaletteSet",
    "color_dist",
    "lab_to_srgb",
    "mhd",
    "srgb_to_lab",
    "__version__",
]
