"""File formats: palette datasets, manifests, and trained models.

The dataset file is the repo's canonical palette exchange format::

    {"k": K, "colors_space": "lab01", "palettes": [[[l, a, b] * K], ...]}

Sorted datasets additionally carry ``"provenance"``, the per-palette color
permutation that produced the ordering. Models serialize to a versioned JSON
container dispatched on ``"type"``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .color import PaletteSet

FORMAT_VERSION = 1


def dataset_to_dict(ps: PaletteSet, provenance: np.ndarray | None = None) -> dict:
    doc: dict[str, Any] = {
        "k": ps.k,
        "colors_space": "lab01",
        "palettes": [[[float(v) for v in c] for c in pal] for pal in ps.colors],
    }
    if provenance is not None:
        doc["provenance"] = np.asarray(provenance, dtype=int).tolist()
    return doc


def dataset_from_dict(doc: dict) -> tuple[PaletteSet, np.ndarray | None]:
    if doc.get("colors_space", "lab01") != "lab01":
        raise ValueError(f"unsupported colors_space {doc.get('colors_space')!r}")
    arr = np.asarray(doc["palettes"], dtype=np.float64)
    ps = PaletteSet(arr)
    if int(doc.get("k", ps.k)) != ps.k:
        raise ValueError("dataset k field disagrees with palette shapes")
    prov = doc.get("provenance")
    return ps, (np.asarray(prov, dtype=np.intp) if prov is not None else None)


def save_dataset(path, ps: PaletteSet, provenance: np.ndarray | None = None) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(ps, provenance)), encoding="utf-8")


def load_dataset(path) -> tuple[PaletteSet, np.ndarray | None]:
    return dataset_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_model(path, model) -> None:
    doc = model.to_dict()
    doc["format_version"] = FORMAT_VERSION
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_model(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}")
    kind = doc.get("type")
    if kind == "gplvm":
        from .gplvm import GplvmModel

        return GplvmModel.from_dict(doc)
    if kind == "pca-gmm":
        from .gmm import GmmModel

        return GmmModel.from_dict(doc)
    raise ValueError(f"unknown model type {kind!r}")
