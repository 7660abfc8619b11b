"""HTTP service exposing trained palette models to interactive clients.

Serves density maps over 2-D latent slices, point-to-palette back-projection,
recolorized previews, and adaptive palette suggestion. Models are loaded once
at startup and never mutated; the only shared mutable state is the recolor
cache, whose entries are deterministic so concurrent overwrites are benign.
"""

from __future__ import annotations

import io
import itertools
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from PIL import Image

from .assignment import hungarian
from .color import Palette, lab_array_to_srgb, srgb_array_to_lab
from .dataio import load_model
from .extract import kmeans_palette
from .gplvm import GplvmModel, gplvm_complete, gplvm_density, pick_display_dims
from .partial import PartialPalette, align_partial
from .recolor import RecolorSpec, recolor_enriched, recolor_single, segment_grid

PREVIEW_MAX_DIM = 256
SUGGEST_ITERS_LADDER = (60, 25, 10, 4, 1, 0)


def _error(code: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=code, content={"error": message, "code": code})


@dataclass
class SessionState:
    models: dict[str, GplvmModel] = field(default_factory=dict)
    images: dict[str, Image.Image] = field(default_factory=dict)
    source_palettes: dict[tuple, Palette] = field(default_factory=dict)
    png_cache: dict[tuple, bytes] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    _next_id: "itertools.count" = field(default_factory=lambda: itertools.count(1))

    def new_image_id(self) -> str:
        with self.lock:
            return f"img-{next(self._next_id)}"


def _palette_payload(p: Palette) -> dict:
    rgb, _ = lab_array_to_srgb(p.colors)
    return {
        "k": p.k,
        "colors": [[float(v) for v in c] for c in p.colors],
        "srgb": [[int(v) for v in c] for c in rgb],
    }


def _parse_dims(raw: str | None, model: GplvmModel) -> tuple[int, int]:
    if raw is None:
        return pick_display_dims(model)
    try:
        i, j = (int(t) for t in raw.split(","))
    except ValueError as exc:
        raise ValueError(f"dims must be 'i,j' integers: {exc}") from None
    if i == j or not (0 <= i < model.q and 0 <= j < model.q):
        raise ValueError("dims must be two distinct latent dimensions in range")
    return i, j


def _load_models_dir(models_dir) -> dict[str, GplvmModel]:
    models = {}
    for path in sorted(Path(models_dir).glob("*.json")):
        models[path.stem] = load_model(path)
    return models


def _load_images_dir(images_dir) -> dict[str, Image.Image]:
    images = {}
    for path in sorted(Path(images_dir).glob("*.png")):
        with Image.open(path) as img:
            images[path.stem] = img.convert("RGB").copy()
    return images


def create_app(
    models_dir=None,
    images_dir=None,
    models: dict[str, GplvmModel] | None = None,
    images: dict[str, Image.Image] | None = None,
) -> FastAPI:
    state = SessionState()
    if models_dir:
        state.models.update(_load_models_dir(models_dir))
    if models:
        state.models.update(models)
    if images_dir:
        state.images.update(_load_images_dir(images_dir))
    if images:
        state.images.update(images)

    app = FastAPI(title="palette-orchestra")
    app.state.session = state

    @app.exception_handler(ValueError)
    async def on_value_error(_req: Request, exc: ValueError):
        return _error(400, str(exc))

    @app.get("/models")
    def list_models():
        out = []
        for name in sorted(state.models):
            m = state.models[name]
            q = getattr(m, "q", None)
            out.append({"name": name, "k": m.k, "q": q})
        return out

    def _get_model(name: str) -> GplvmModel | None:
        return state.models.get(name)

    @app.get("/models/{name}/density")
    def density(name: str, dims: str | None = None, res: int = 64):
        model = _get_model(name)
        if model is None:
            return _error(404, f"unknown model {name!r}")
        if not isinstance(model, GplvmModel):
            return _error(400, "density requires a gplvm model")
        if not 2 <= res <= 512:
            return _error(400, "res must be in 2..512")
        try:
            dpair = _parse_dims(dims, model)
        except ValueError as exc:
            return _error(400, str(exc))
        grid = gplvm_density(model, dims=dpair, resolution=res)
        xmin, xmax, ymin, ymax = grid.extents
        return {
            "values": grid.values.tolist(),
            "extents": {"x_min": xmin, "x_max": xmax, "y_min": ymin, "y_max": ymax},
            "dims": list(grid.dims),
            "resolution": grid.resolution,
            "training_points": model.x_latent[:, list(grid.dims)].tolist(),
        }

    @app.get("/models/{name}/palette")
    def palette_at(name: str, x: float, y: float, dims: str | None = None):
        model = _get_model(name)
        if model is None:
            return _error(404, f"unknown model {name!r}")
        if not isinstance(model, GplvmModel):
            return _error(400, "palette lookup requires a gplvm model")
        if not (np.isfinite(x) and np.isfinite(y)):
            return _error(400, "coordinates must be finite")
        try:
            i, j = _parse_dims(dims, model)
        except ValueError as exc:
            return _error(400, str(exc))
        point = np.zeros(model.q)
        point[i] = x
        point[j] = y
        pal, _var = model.predict_palette(point)
        return _palette_payload(pal)

    @app.post("/images")
    async def upload_image(file: UploadFile):
        blob = await file.read()
        if blob[:8] != b"\x89PNG\r\n\x1a\n":
            return _error(415, "only PNG uploads are accepted")
        img = Image.open(io.BytesIO(blob)).convert("RGB")
        image_id = state.new_image_id()
        state.images[image_id] = img
        return {"image_id": image_id}

    def _source_palette(image_id: str, model_name: str, model: GplvmModel) -> Palette:
        key = (image_id, model_name)
        cached = state.source_palettes.get(key)
        if cached is not None:
            return cached
        img = state.images[image_id]
        rgb01 = np.asarray(img, dtype=np.float64) / 255.0
        lab = srgb_array_to_lab(rgb01).reshape(-1, 3)
        rng = np.random.default_rng(0)
        if len(lab) > 5000:
            lab = lab[rng.choice(len(lab), size=5000, replace=False)]
        pal = kmeans_palette(lab, model.k, 0).palette
        with state.lock:
            state.source_palettes[key] = pal
        return pal

    @app.post("/recolor")
    async def recolor(request: Request, full: int = 0):
        body = await request.json()
        model_name = body.get("model")
        model = _get_model(model_name) if model_name else None
        if model is None:
            return _error(404, f"unknown model {model_name!r}")
        image_id = body.get("image_id")
        if image_id not in state.images:
            return _error(404, f"unknown image {image_id!r}")
        segments = str(body.get("segments", "grid:64"))
        x = body.get("x")
        y = body.get("y")
        auto = x is None or y is None
        key = (image_id, model_name, segments, auto, None if auto else (float(x), float(y)), bool(full))
        cached = state.png_cache.get(key)
        if cached is not None:
            return Response(content=cached, media_type="image/png")

        img = state.images[image_id]
        if not full:
            img = img.copy()
            img.thumbnail((PREVIEW_MAX_DIM, PREVIEW_MAX_DIM))
        if auto:
            if not segments.startswith("grid:"):
                return _error(400, f"unknown segmentation {segments!r}")
            cell = int(segments.split(":", 1)[1])
            seg = segment_grid(img, cell)
            out = recolor_enriched(img, seg, model, sim_iters=10, seed=0)
        else:
            source = _source_palette(image_id, model_name, model)
            point = np.zeros(model.q)
            i, j = pick_display_dims(model)
            point[i] = float(x)
            point[j] = float(y)
            target, _ = model.predict_palette(point)
            cost = np.sqrt(
                ((source.colors[:, None, :] - target.colors[None, :, :]) ** 2).sum(axis=2)
            )
            aligned = Palette(target.colors[hungarian(cost).perm])
            out = recolor_single(img, RecolorSpec(source=source, target=aligned))
        buf = io.BytesIO()
        out.save(buf, format="PNG")
        blob = buf.getvalue()
        with state.lock:
            state.png_cache[key] = blob
        return Response(content=blob, media_type="image/png")

    @app.post("/suggest")
    async def suggest(request: Request):
        body = await request.json()
        model_name = body.get("model")
        model = _get_model(model_name) if model_name else None
        if model is None:
            return _error(404, f"unknown model {model_name!r}")
        observed = body.get("observed") or []
        if not observed:
            return _error(400, "observed colors must be non-empty")
        if len(observed) > model.k:
            return _error(400, f"at most {model.k} observed colors")
        count = int(body.get("count", 3))
        if not 1 <= count <= len(SUGGEST_ITERS_LADDER):
            return _error(400, f"count must be in 1..{len(SUGGEST_ITERS_LADDER)}")
        obs = np.asarray(observed, dtype=np.float64).reshape(-1, 3)
        if obs.min() < 0 or obs.max() > 1:
            return _error(400, "observed colors must be normalized Lab in [0,1]")
        partial = align_partial(obs, model.training_palettes())
        suggestions = []
        for iters in SUGGEST_ITERS_LADDER[:count]:
            pal = gplvm_complete(model, partial, sim_iters=iters, clamp_observed=True)
            display = Palette(pal.colors[np.argsort(pal.colors[:, 0], kind="stable")])
            suggestions.append(_palette_payload(display) | {"sim_iters": iters})
        return {"suggestions": suggestions}

    return app


def run_server(models_dir, images_dir=None, port: int = 8080, host: str = "127.0.0.1"):
    import uvicorn

    app = create_app(models_dir=models_dir, images_dir=images_dir)
    uvicorn.run(app, host=host, port=port)
