"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. The completion-ordinal criterion trains full-size models and takes
a couple of minutes; everything else is fast.
"""

import itertools
import math
import time

import numpy as np
import pytest

from palette_orchestra.assignment import hungarian
from palette_orchestra.bench import BenchConfig, completion_benchmark
from palette_orchestra.bps import (
    SortedPaletteSet,
    bps_sort,
    brightness_sort,
    consecutive_distance,
    hue_sort,
    kpca_order,
    objective,
)
from palette_orchestra.color import Palette, PaletteSet
from palette_orchestra.dataio import save_dataset
from palette_orchestra.gplvm import _nll_and_grad, spf_matrix, train_gplvm
from palette_orchestra.recolor import RecolorSpec, recolor_lab, recolor_single
from palette_orchestra.synth import manifold_palette_dataset, planted_ordering_dataset


def report(name: str, detail: str = ""):
    print(f"\n[PASS] {name}" + (f" -- {detail}" if detail else ""))


def perms_array(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.intp)


class TestAcceptance:
    def test_assignment_optimality(self):
        """1000 random cost matrices, K in 2..7: exact brute-force agreement."""
        rng = np.random.default_rng(202401)
        t0 = time.perf_counter()
        count_per_k = 1000 // 6 + 1
        checked = 0
        perm_cache = {k: perms_array(k) for k in range(2, 8)}
        for k in range(2, 8):
            perms = perm_cache[k]
            rows = np.arange(k)
            for _ in range(count_per_k):
                if checked >= 1000:
                    break
                cost = rng.random((k, k))
                res = hungarian(cost)
                brute = cost[rows, perms].sum(axis=1).min()
                assert res.total_cost == brute, f"K={k}: {res.total_cost} != {brute}"
                checked += 1
        elapsed = time.perf_counter() - t0
        assert checked == 1000
        assert elapsed < 5.0, f"took {elapsed:.2f}s"
        report("assignment-optimality", f"1000 matrices exact in {elapsed:.2f}s")

    def test_bps_pairwise_optimality(self):
        """N=2, K in 3..6, 200 pairs: sort reaches the brute-force optimum."""
        rng = np.random.default_rng(202402)
        for k in (3, 4, 5, 6):
            perms = perms_array(k)
            for _ in range(50):
                colors = rng.random((2, k, 3))
                got = objective(bps_sort(PaletteSet(colors)))
                d = np.sqrt(((colors[0][:, None, :] - colors[1][None, :, :]) ** 2).sum(axis=2))
                rows = np.arange(k)
                best = d[rows, perms].sum(axis=1).min()
                assert abs(got - 2.0 * best) <= 1e-9
        report("bps-pairwise-optimality", "200 pairs, tolerance 1e-9")

    def test_color_conservation(self):
        """100 random datasets: sorted color multisets equal input multisets."""
        rng = np.random.default_rng(202403)
        for _ in range(100):
            n = int(rng.integers(2, 15))
            k = int(rng.integers(2, 9))
            ps = PaletteSet(rng.random((n, k, 3)))
            out = bps_sort(ps)
            for i in range(n):
                got = out.colors[i][np.lexsort(out.colors[i].T)]
                want = ps.colors[i][np.lexsort(ps.colors[i].T)]
                assert np.array_equal(got, want)
        report("color-conservation", "100 datasets, exact multiset equality")

    def test_ordering_trend(self):
        """Planted sets, 20 palettes, 5 repeats: BPS <= Brightness for
        K in {9,10,12}; Hue worst at every K."""
        means = {}
        for k in (9, 10, 12):
            vals = {"bps": [], "brightness": [], "hue": []}
            for rep in range(5):
                ds = kpca_order(planted_ordering_dataset(20, k, seed=9000 + 31 * k + rep))
                vals["bps"].append(consecutive_distance(bps_sort(ds)))
                vals["brightness"].append(consecutive_distance(brightness_sort(ds)))
                vals["hue"].append(consecutive_distance(hue_sort(ds)))
            means[k] = {m: float(np.mean(v)) for m, v in vals.items()}
        for k, m in means.items():
            assert m["bps"] <= m["brightness"], f"K={k}: {m}"
            assert m["hue"] >= m["brightness"] and m["hue"] >= m["bps"], f"K={k}: {m}"
        detail = "; ".join(
            f"K={k}: bps={v['bps']:.4f} bri={v['brightness']:.4f} hue={v['hue']:.4f}"
            for k, v in means.items()
        )
        report("ordering-trend", detail)

    def test_gplvm_gradient_check(self):
        """20 random small models: analytic vs central FD within 1e-4 rel."""
        rng = np.random.default_rng(202405)
        t0 = time.perf_counter()
        n, q, k = 6, 2, 3
        h = 1e-5
        for _ in range(20):
            yc = rng.normal(size=(n, 3 * k)) * 0.2
            theta = np.concatenate(
                [rng.normal(size=n * q), np.log(rng.uniform(0.3, 3.0, size=3))]
            )
            _, analytic = _nll_and_grad(theta, yc, n, q)
            numeric = np.empty_like(theta)
            for i in range(len(theta)):
                tp, tm = theta.copy(), theta.copy()
                tp[i] += h
                tm[i] -= h
                numeric[i] = (_nll_and_grad(tp, yc, n, q)[0] - _nll_and_grad(tm, yc, n, q)[0]) / (2 * h)
            rel = np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1e-8)
            assert rel.max() < 1e-4, f"max rel err {rel.max():.2e}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0
        report("gplvm-gradient-check", f"20 models in {elapsed:.2f}s")

    def test_gplvm_training_contract(self):
        """Training log non-increasing; training latents reproduce SPF
        within 2x predictive std."""
        for seed in (0, 1, 2):
            ds = manifold_palette_dataset(40, k=5, seed=500 + seed, shuffle=False)
            model = train_gplvm(SortedPaletteSet.identity(ds), q=4, iters=150, seed=seed)
            log = np.asarray(model.train_log)
            assert np.all(np.diff(log) <= 1e-10), "training log increased"
            y = spf_matrix(ds)
            for i in range(0, ds.n, 7):
                mean, var = model.predict(model.x_latent[i])
                # per-dimension RMS: a max over N*D near-Gaussian residuals
                # exceeds 2 std by construction, the vector error must not
                rms = float(np.sqrt(np.mean((mean - y[i]) ** 2)))
                assert rms <= 2.0 * math.sqrt(var)
        report("gplvm-training", "3 runs monotone; reconstruction RMS within 2 std")

    def test_completion_ordinal(self, tmp_path):
        """500-palette dataset, 5 splits at 0.6: gplvm+spf <= gplvm+none,
        gmm+spf <= gmm+none, gplvm+spf <= retrieval+none (split-averaged)."""
        ds = manifold_palette_dataset(500, k=5, seed=77)
        path = tmp_path / "accept_completion.json"
        save_dataset(path, ds)
        cfg = BenchConfig(
            datasets=(str(path),),
            repeats=5,
            train_ratio=0.6,
            seed=7,
            methods=("gplvm+spf", "gplvm+none", "gmm+spf", "gmm+none", "retrieval+none", "mean"),
            gplvm_iters=120,
            sim_iters=12,
        )
        rep = completion_benchmark(cfg)
        g_spf = rep.mean_for("gplvm+spf")
        g_none = rep.mean_for("gplvm+none")
        m_spf = rep.mean_for("gmm+spf")
        m_none = rep.mean_for("gmm+none")
        r_none = rep.mean_for("retrieval+none")
        assert g_spf <= g_none, f"gplvm+spf {g_spf:.4f} > gplvm+none {g_none:.4f}"
        assert m_spf <= m_none, f"gmm+spf {m_spf:.4f} > gmm+none {m_none:.4f}"
        assert g_spf <= r_none, f"gplvm+spf {g_spf:.4f} > retrieval+none {r_none:.4f}"
        # directional note only (the original t-tests were inconclusive here)
        mean_1 = rep.mean_for("mean", 4)
        best_other_1 = min(
            rep.mean_for(m, 4) for m in cfg.methods if m != "mean"
        )
        note = "mean wins at 1 missing" if mean_1 <= best_other_1 else "mean does not win at 1 missing"
        report(
            "completion-ordinal",
            f"gplvm+spf={g_spf:.4f} gplvm+none={g_none:.4f} gmm+spf={m_spf:.4f} "
            f"gmm+none={m_none:.4f} retrieval+none={r_none:.4f} ({note}, report-only)",
        )

    def test_latency(self):
        """/palette and /suggest under 1s hard fail (target 500 ms) on a
        K=7, N=400 model."""
        from fastapi.testclient import TestClient

        from palette_orchestra.server import create_app

        ds = manifold_palette_dataset(400, k=7, seed=88, shuffle=False)
        model = train_gplvm(SortedPaletteSet.identity(ds), q=4, iters=30, seed=0)
        client = TestClient(create_app(models={"big": model}))
        observed = ds.colors[3, :3].tolist()
        client.get("/models/big/palette?x=0.1&y=0.2")  # warm caches
        client.post("/suggest", json={"model": "big", "observed": observed, "count": 3})

        t0 = time.perf_counter()
        r1 = client.get("/models/big/palette?x=0.3&y=-0.1")
        palette_ms = (time.perf_counter() - t0) * 1000
        t0 = time.perf_counter()
        r2 = client.post("/suggest", json={"model": "big", "observed": observed, "count": 3})
        suggest_ms = (time.perf_counter() - t0) * 1000
        assert r1.status_code == 200 and r2.status_code == 200
        assert palette_ms < 1000, f"/palette took {palette_ms:.0f} ms"
        assert suggest_ms < 1000, f"/suggest took {suggest_ms:.0f} ms"
        report("latency", f"/palette {palette_ms:.0f} ms, /suggest {suggest_ms:.0f} ms (budget 500/1000)")

    def test_recolor_identity(self):
        """target=source is identity within +-1 sRGB; luminance untouched."""
        rng = np.random.default_rng(202409)
        img = (rng.random((48, 64, 3)) * 255).astype(np.uint8)
        pal = Palette(rng.random((5, 3)))
        out = recolor_single(img, RecolorSpec(source=pal, target=pal))
        assert np.abs(out.astype(int) - img.astype(int)).max() <= 1
        lab = rng.random((32, 32, 3))
        spec = RecolorSpec(source=pal, target=Palette(rng.random((5, 3))), preserve_luminance=True)
        out_lab = recolor_lab(lab, spec)
        assert np.array_equal(out_lab[:, :, 0], lab[:, :, 0])
        report("recolor-identity", "identity within +-1; L channel bit-exact")
