#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends on realistic workloads.

Run: python3 benchmarks/bench_kernels.py [--repeat N]

Covers the shapes the sort recursion and recolorizer actually hit:
pairwise MHD over a full dataset, row-set cost matrices at merge time,
the assignment solver, nearest-palette lookups, and per-pixel slot maps.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from palette_orchestra.kernels import _numpy as numpy_backend

try:
    from palette_orchestra.kernels import _numba as numba_backend
except ImportError:
    numba_backend = None


CASES = [
    ("pairwise_mhd  N=400 K=5", "pairwise_mhd", lambda r: (r.random((400, 5, 3)),)),
    ("pairwise_mhd  N=100 K=10", "pairwise_mhd", lambda r: (r.random((100, 10, 3)),)),
    ("row_set_cost  200x200 K=7", "row_set_cost", lambda r: (r.random((200, 7, 3)), r.random((200, 7, 3)))),
    ("mhd_to_set    obs=4 N=400 K=7", "mhd_to_set", lambda r: (r.random((4, 3)), r.random((400, 7, 3)))),
    ("solve_assign  K=16", "solve_assignment", lambda r: (r.random((16, 16)),)),
    ("nearest_slot  64k px K=7", "nearest_slot", lambda r: (r.random((65536, 3)), r.random((7, 3)))),
]


def run(repeat: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'case':34s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}")
    for label, fn_name, make_args in CASES:
        args = make_args(rng)
        np_fn = getattr(numpy_backend, fn_name)
        t_np = min(timeit.repeat(lambda: np_fn(*args), number=1, repeat=repeat))
        if numba_backend is None:
            print(f"{label:34s} {t_np * 1e3:10.2f}ms {'n/a':>12s} {'n/a':>9s}")
            continue
        nb_fn = getattr(numba_backend, fn_name)
        nb_fn(*args)  # compile outside the timed region
        t_nb = min(timeit.repeat(lambda: nb_fn(*args), number=1, repeat=repeat))
        print(f"{label:34s} {t_np * 1e3:10.2f}ms {t_nb * 1e3:10.2f}ms {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    run(parser.parse_args().repeat)
