"""Quantitative harnesses: ordering quality vs palette size, and palette
completion error across the method matrix.

Both benchmarks emit a report with per-condition aggregates plus the raw
per-item records, so every reported mean is recomputable from the record
dump. Fold assignment and color dropping are pure functions of the seed.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .bps import (
    SortedPaletteSet,
    bps_sort,
    brightness_sort,
    consecutive_distance,
    hue_sort,
    kpca_order,
)
from .color import Palette, PaletteSet, mhd
from .dataio import load_dataset
from .extract import hash_seed
from .gmm import gmm_complete, train_pca_gmm
from .gplvm import gplvm_complete, train_gplvm
from .partial import PartialPalette, align_partial
from .synth import manifold_palette_dataset

log = logging.getLogger(__name__)

ORDERING_METHODS: dict[str, Callable[[PaletteSet], SortedPaletteSet]] = {
    "bps": bps_sort,
    "brightness": brightness_sort,
    "hue": hue_sort,
}

COMPLETION_METHODS = (
    "gplvm+spf",
    "gplvm+brightness",
    "gplvm+none",
    "gmm+spf",
    "gmm+none",
    "retrieval+spf",
    "retrieval+none",
    "mean",
)


@dataclass(frozen=True)
class BenchConfig:
    datasets: tuple[str, ...] = ()
    palette_sizes: tuple[int, ...] = (5, 7, 10)
    train_ratio: float = 0.6
    repeats: int = 5
    seed: int = 0
    methods: tuple[str, ...] = ()
    sample_palettes: int = 20
    observed_counts: tuple[int, ...] = (4, 3, 2, 1)
    synthetic_palettes: int = 0  # fall back to a generated dataset if no files
    latent_q: int = 4
    gplvm_iters: int = 150
    sim_iters: int = 15
    pca_dims: int = 8
    gmm_components: int = 10

    def __post_init__(self):
        if not 0.0 < self.train_ratio < 1.0:
            raise ValueError("train ratio must be in (0, 1)")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchConfig":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in doc.items() if k in known}
        for key in ("datasets", "palette_sizes", "methods", "observed_counts"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass
class BenchReport:
    kind: str
    conditions: list[dict]
    records: list[dict]
    config: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "conditions": self.conditions,
            "records": self.records,
            "config": self.config,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    def save_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["method", "condition", "mean", "std", "count", "runtime_per_prediction"]
            )
            writer.writeheader()
            for row in self.conditions:
                writer.writerow(row)

    def save_chart(self, path) -> None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        methods = sorted({c["method"] for c in self.conditions})
        fig, ax = plt.subplots(figsize=(6, 4))
        for m in methods:
            rows = sorted(
                (c for c in self.conditions if c["method"] == m),
                key=lambda c: c["condition"],
            )
            xs = [c["condition"] for c in rows]
            ys = [c["mean"] for c in rows]
            ax.plot(xs, ys, marker="o", label=m)
        xlabel = "palette size K" if self.kind == "ordering" else "observed colors"
        ax.set_xlabel(xlabel)
        ax.set_ylabel("mean error")
        ax.set_title(f"{self.kind} benchmark")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg")
        plt.close(fig)

    def mean_for(self, method: str, condition=None) -> float:
        vals = [
            c["mean"]
            for c in self.conditions
            if c["method"] == method and (condition is None or c["condition"] == condition)
        ]
        if not vals:
            raise KeyError(f"no condition for {method!r} / {condition!r}")
        return float(np.mean(vals))


def _load_bench_datasets(cfg: BenchConfig, default_k: int = 10) -> list[tuple[str, PaletteSet]]:
    out = []
    for path in cfg.datasets:
        ps, _ = load_dataset(path)
        out.append((str(path), ps))
    if not out and cfg.synthetic_palettes:
        ps = manifold_palette_dataset(cfg.synthetic_palettes, k=default_k, seed=cfg.seed)
        out.append(("synthetic", ps))
    if not out:
        raise ValueError("benchmark config lists no datasets")
    return out


def _aggregate(records: list[dict]) -> list[dict]:
    keys = sorted({(r["method"], r["condition"]) for r in records})
    conditions = []
    for method, cond in keys:
        vals = [r["value"] for r in records if r["method"] == method and r["condition"] == cond]
        times = [r["runtime"] for r in records if r["method"] == method and r["condition"] == cond]
        conditions.append(
            {
                "method": method,
                "condition": cond,
                "mean": float(np.mean(vals)),
                "std": float(np.std(vals)),
                "count": len(vals),
                "runtime_per_prediction": float(np.mean(times)),
            }
        )
    return conditions


def ordering_benchmark(cfg: BenchConfig) -> BenchReport:
    """Consecutive-palette error of each ordering method across palette sizes.

    Per trial: sample ``sample_palettes`` palettes (subsampling colors when
    the dataset palettes are larger than the requested K), pre-order the
    sequence with KPCA, sort with each method, score consecutive distance.
    """
    methods = cfg.methods or tuple(ORDERING_METHODS)
    for m in methods:
        if m not in ORDERING_METHODS:
            raise ValueError(f"unknown ordering method {m!r}")
    records: list[dict] = []
    for ds_idx, (name, ps) in enumerate(_load_bench_datasets(cfg)):
        for k in cfg.palette_sizes:
            if ps.n < cfg.sample_palettes:
                log.warning("dataset %s has %d < %d palettes; skipping K=%d", name, ps.n, cfg.sample_palettes, k)
                continue
            if ps.k < k:
                log.warning("dataset %s palettes have K=%d < requested %d; skipping", name, ps.k, k)
                continue
            for rep in range(cfg.repeats):
                rng = np.random.default_rng(hash_seed(cfg.seed, ds_idx, k, rep))
                pick = rng.choice(ps.n, size=cfg.sample_palettes, replace=False)
                colors = ps.colors[np.sort(pick)]
                if ps.k > k:
                    cols = np.stack([c[rng.choice(ps.k, size=k, replace=False)] for c in colors])
                else:
                    cols = colors
                trial = kpca_order(PaletteSet(cols))
                for m in methods:
                    t0 = time.perf_counter()
                    val = consecutive_distance(ORDERING_METHODS[m](trial))
                    dt = time.perf_counter() - t0
                    records.append(
                        {"method": m, "condition": int(k), "dataset": name,
                         "repeat": rep, "value": float(val), "runtime": dt}
                    )
    return BenchReport(
        kind="ordering", conditions=_aggregate(records), records=records,
        config=cfg.__dict__ | {"methods": list(methods)},
    )


def retrieval_predict(p: PartialPalette, s: SortedPaletteSet | PaletteSet) -> Palette:
    """Training palette nearest to the observed slots (Euclidean, slot-wise)."""
    obs = p.observed
    diff = s.colors[:, obs, :] - p.colors[obs][None, :, :]
    d = (diff**2).sum(axis=(1, 2))
    return Palette(s.colors[int(d.argmin())])


def mean_predict(p: PartialPalette) -> Palette:
    """Observed colors kept; every missing slot takes the observed mean."""
    colors = p.colors.copy()
    colors[~p.observed] = p.observed_colors().mean(axis=0)
    return Palette(colors)


def _split_indices(n: int, ratio: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    order = rng.permutation(n)
    cut = int(round(n * ratio))
    cut = min(max(cut, 1), n - 1)
    return np.sort(order[:cut]), np.sort(order[cut:])


def completion_benchmark(cfg: BenchConfig) -> BenchReport:
    """Palette completion error across the configured method matrix.

    Per split: sort the training fold per method family, train the models,
    then for every test palette and observed-count drop colors at random and
    score MHD between the prediction and the ground truth.
    """
    methods = cfg.methods or COMPLETION_METHODS
    for m in methods:
        if m not in COMPLETION_METHODS:
            raise ValueError(f"unknown completion method {m!r}")
    records: list[dict] = []
    for ds_idx, (name, ps) in enumerate(_load_bench_datasets(cfg, default_k=5)):
        for split in range(cfg.repeats):
            rng = np.random.default_rng(hash_seed(cfg.seed, ds_idx, split))
            train_idx, test_idx = _split_indices(ps.n, cfg.train_ratio, rng)
            train = ps.subset(train_idx)
            test = ps.subset(test_idx)
            arms = _train_arms(train, methods, cfg, hash_seed(cfg.seed, ds_idx, split, 7))
            for ti, truth in enumerate(test.colors):
                for oc in cfg.observed_counts:
                    if not 1 <= oc <= ps.k:
                        continue
                    drop_rng = np.random.default_rng(hash_seed(cfg.seed, ds_idx, split, ti, oc))
                    keep = np.sort(drop_rng.choice(ps.k, size=oc, replace=False))
                    observed = truth[keep]
                    for m in methods:
                        t0 = time.perf_counter()
                        pred = _predict_one(m, observed, arms, ps.k, cfg)
                        dt = time.perf_counter() - t0
                        err = mhd(pred.colors, truth)
                        records.append(
                            {"method": m, "condition": int(oc), "dataset": name,
                             "split": split, "item": int(test_idx[ti]),
                             "value": float(err), "runtime": dt}
                        )
    return BenchReport(
        kind="completion", conditions=_aggregate(records), records=records,
        config=cfg.__dict__ | {"methods": list(methods)},
    )


def _train_arms(train: PaletteSet, methods, cfg: BenchConfig, seed: int) -> dict:
    """Per-ordering sorted sets and the trained models each method needs."""
    orderings_needed = {m.split("+")[1] for m in methods if "+" in m}
    arms: dict[str, dict] = {"orderings": {}, "models": {}}
    for ordering in orderings_needed:
        if ordering == "spf":
            sorted_set = bps_sort(train)
        elif ordering == "brightness":
            sorted_set = brightness_sort(train)
        else:
            sorted_set = SortedPaletteSet.identity(train)
        arms["orderings"][ordering] = sorted_set
    for m in methods:
        if m == "mean":
            continue
        family, ordering = m.split("+")
        sorted_set = arms["orderings"][ordering]
        if family == "gplvm":
            arms["models"][m] = train_gplvm(
                sorted_set, q=cfg.latent_q, iters=cfg.gplvm_iters, seed=seed
            )
        elif family == "gmm":
            arms["models"][m] = train_pca_gmm(
                sorted_set, d=cfg.pca_dims, components=cfg.gmm_components, seed=seed
            )
    return arms


def _predict_one(method: str, observed: np.ndarray, arms: dict, k: int, cfg: BenchConfig) -> Palette:
    if method == "mean":
        return mean_predict(PartialPalette.from_colors(observed, k))
    family, ordering = method.split("+")
    sorted_set = arms["orderings"][ordering]
    partial = align_partial(observed, sorted_set)
    if family == "gplvm":
        return gplvm_complete(arms["models"][method], partial, sim_iters=cfg.sim_iters)
    if family == "gmm":
        return gmm_complete(arms["models"][method], partial)
    return retrieval_predict(partial, sorted_set)
