"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is selected once at import time from the environment variable
``PALETTE_ORCHESTRA_NUMBA``:

* ``auto`` (default) -- use numba if it is importable, else numpy.
* ``1`` / ``true`` / ``on`` -- require numba; raise if unavailable.
* ``0`` / ``false`` / ``off`` -- force the pure-numpy path.

Both backends expose the same functions and are kept numerically
interchangeable (see tests/test_kernels.py); ``benchmarks/bench_kernels.py``
compares their throughput.
"""

from __future__ import annotations

import os
import warnings

from . import _numpy as numpy_backend

__all__ = [
    "ACTIVE_BACKEND",
    "numpy_backend",
    "directed_avg_min_dist",
    "mhd_pair",
    "pairwise_mhd",
    "mhd_to_set",
    "row_set_cost",
    "nearest_slot",
    "solve_assignment",
]

_ENV_VAR = "PALETTE_ORCHESTRA_NUMBA"


def _select_backend():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice in ("0", "false", "off", "no"):
        return numpy_backend, "numpy"
    if choice in ("1", "true", "on", "yes"):
        from . import _numba as numba_backend  # hard requirement

        return numba_backend, "numba"
    try:
        from . import _numba as numba_backend
    except ImportError:
        warnings.warn(
            "numba is not available; falling back to the pure-numpy kernels "
            f"(set {_ENV_VAR}=0 to silence this warning)",
            stacklevel=2,
        )
        return numpy_backend, "numpy"
    return numba_backend, "numba"


_backend, ACTIVE_BACKEND = _select_backend()

directed_avg_min_dist = _backend.directed_avg_min_dist
mhd_pair = _backend.mhd_pair
pairwise_mhd = _backend.pairwise_mhd
mhd_to_set = _backend.mhd_to_set
row_set_cost = _backend.row_set_cost
nearest_slot = _backend.nearest_slot
solve_assignment = _backend.solve_assignment
