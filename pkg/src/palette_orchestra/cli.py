"""Command-line interface: dataset extraction, sorting, model training,
recolorization, benchmarks, and the explorer service."""

from __future__ import annotations

import json
import os
from pathlib import Path

import click

from .bps import SortedPaletteSet, bps_sort, brightness_sort, hue_sort
from .color import Palette
from .dataio import load_dataset, load_model, save_dataset, save_model
from .extract import DatasetManifest, build_dataset


@click.group()
def main():
    """Palette extraction, ordering, latent models, and recolorization."""


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def extract(manifest_path, out_path):
    """Build a palette dataset from the images listed in a manifest."""
    doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    manifest = DatasetManifest.from_dict(doc)
    ps = build_dataset(manifest)
    save_dataset(out_path, ps)
    click.echo(f"wrote {ps.n} palettes (K={ps.k}) to {out_path}")


@main.group()
def bps():
    """Palette ordering commands."""


@bps.command("sort")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["bps", "brightness", "hue"]), default="bps")
@click.option("--seed", type=int, default=0, help="accepted for interface stability; sorting is deterministic")
def bps_sort_cmd(in_path, out_path, method, seed):
    """Sort the colors of every palette in a dataset consistently."""
    ps, _ = load_dataset(in_path)
    sorter = {"bps": bps_sort, "brightness": brightness_sort, "hue": hue_sort}[method]
    result = sorter(ps)
    save_dataset(out_path, result.palettes, provenance=result.provenance)
    click.echo(f"sorted {result.n} palettes with {method} -> {out_path}")


@main.group()
def model():
    """Latent model commands."""


@model.command("train")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["gplvm", "gmm"]), default="gplvm")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=0)
@click.option("--iters", type=int, default=200)
@click.option("--latent-dims", "q", type=int, default=4, help="gplvm latent dimensions")
@click.option("--pca-dims", type=int, default=8, help="gmm PCA dimensions")
@click.option("--components", type=int, default=10, help="gmm mixture size")
def model_train(in_path, method, out_path, seed, iters, q, pca_dims, components):
    """Train a density/interpolation model on a (sorted) dataset."""
    ps, provenance = load_dataset(in_path)
    sorted_set = (
        SortedPaletteSet(palettes=ps, provenance=provenance)
        if provenance is not None
        else SortedPaletteSet.identity(ps)
    )
    if method == "gplvm":
        from .gplvm import train_gplvm

        trained = train_gplvm(sorted_set, q=q, iters=iters, seed=seed)
        final = trained.train_log[-1] if trained.train_log else float("nan")
        click.echo(f"gplvm trained: N={trained.n} D={trained.dim} q={q} final NLL={final:.3f}")
    else:
        from .gmm import train_pca_gmm

        trained = train_pca_gmm(ps, d=pca_dims, components=components, seed=seed, iters=iters)
        click.echo(f"gmm trained: C={trained.components} d={trained.d} final LL={trained.train_log[-1]:.3f}")
    save_model(out_path, trained)
    click.echo(f"wrote model to {out_path}")


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--segments", default="grid:100", help="segmentation, e.g. grid:100")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--palette", "palette_path", type=click.Path(exists=True))
@click.option("--sim-iters", type=int, default=20)
@click.option("--seed", type=int, default=0)
def recolor(image_path, model_path, segments, out_path, palette_path, sim_iters, seed):
    """Recolor an image from a trained model (enriched) or a fixed palette."""
    import numpy as np
    from PIL import Image

    from .color import PaletteSet, srgb_array_to_lab
    from .extract import kmeans_palette
    from .recolor import RecolorSpec, match_palette, recolor_enriched, recolor_single, segment_grid

    with Image.open(image_path) as img:
        img = img.convert("RGB").copy()
    if palette_path:
        pal_doc = json.loads(Path(palette_path).read_text(encoding="utf-8"))
        target_set, _ = (
            load_dataset(palette_path)
            if "palettes" in pal_doc
            else (PaletteSet(np.asarray([pal_doc["colors"]], dtype=np.float64)), None)
        )
        lab = srgb_array_to_lab(np.asarray(img, dtype=np.float64) / 255.0).reshape(-1, 3)
        rng = np.random.default_rng(seed)
        if len(lab) > 5000:
            lab = lab[rng.choice(len(lab), size=5000, replace=False)]
        source = kmeans_palette(lab, target_set.k, seed).palette
        target = match_palette(source, target_set)
        out = recolor_single(img, RecolorSpec(source=source, target=target))
    else:
        if not model_path:
            raise click.UsageError("either --model or --palette is required")
        trained = load_model(model_path)
        if not segments.startswith("grid:"):
            raise click.UsageError(f"unknown segmentation {segments!r}")
        seg = segment_grid(img, int(segments.split(":", 1)[1]))
        out = recolor_enriched(img, seg, trained, sim_iters=sim_iters, seed=seed)
    out.save(out_path, format="PNG")
    click.echo(f"wrote {out_path}")


@main.group()
def bench():
    """Benchmark harnesses."""


def _run_bench(kind, config_path, out_path):
    from .bench import BenchConfig, completion_benchmark, ordering_benchmark

    doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
    cfg = BenchConfig.from_dict(doc)
    report = ordering_benchmark(cfg) if kind == "ordering" else completion_benchmark(cfg)
    out = Path(out_path)
    report.save(out)
    report.save_csv(out.with_suffix(".csv"))
    report.save_chart(out.with_suffix(".svg"))
    click.echo(f"wrote {out}, {out.with_suffix('.csv')}, {out.with_suffix('.svg')}")
    for row in report.conditions:
        click.echo(
            f"  {row['method']:18s} cond={row['condition']:<4} "
            f"mean={row['mean']:.5f} std={row['std']:.5f} n={row['count']}"
        )


@bench.command("ordering")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_ordering(config_path, out_path):
    """Consecutive-distance comparison of the ordering methods."""
    _run_bench("ordering", config_path, out_path)


@bench.command("completion")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_completion(config_path, out_path):
    """Palette completion error across the method matrix."""
    _run_bench("completion", config_path, out_path)


@main.command()
@click.option("--models", "models_dir", required=True, type=click.Path(exists=True))
@click.option("--images", "images_dir", type=click.Path(exists=True))
@click.option("--port", type=int, default=8080)
@click.option("--host", default="127.0.0.1")
def serve(models_dir, images_dir, port, host):
    """Run the explorer HTTP service (PALETTE_ORCHESTRA_PORT overrides --port)."""
    from .server import run_server

    env_port = os.environ.get("PALETTE_ORCHESTRA_PORT")
    if env_port:
        port = int(env_port)
    run_server(models_dir, images_dir=images_dir, port=port, host=host)


if __name__ == "__main__":
    main()
