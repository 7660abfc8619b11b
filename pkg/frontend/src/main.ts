/** DOM wiring for the explorer: density canvas with training-point dots and
 * a pointer marker, palette strip, live preview, error banner, snapshot. */

import { ApiClient } from "./api.js";
import { heatmapRgba, projectPoints } from "./heatmap.js";
import { ExplorerController } from "./state.js";
import type { ViewState } from "./types.js";

const CANVAS_SIZE = 480;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const baseUrl = (window as unknown as { EXPLORER_BASE_URL?: string }).EXPLORER_BASE_URL ?? "";
  const api = new ApiClient(baseUrl);
  const canvas = el<HTMLCanvasElement>("density");
  canvas.width = CANVAS_SIZE;
  canvas.height = CANVAS_SIZE;
  const ctx = canvas.getContext("2d")!;
  const strip = el<HTMLDivElement>("palette-strip");
  const preview = el<HTMLImageElement>("preview");
  const banner = el<HTMLDivElement>("error-banner");
  const snapshotBtn = el<HTMLButtonElement>("snapshot");
  const modelSelect = el<HTMLSelectElement>("model-select");
  const fileInput = el<HTMLInputElement>("image-file");

  const controller = new ExplorerController({
    api,
    canvasWidth: CANVAS_SIZE,
    canvasHeight: CANVAS_SIZE,
    makeObjectUrl: (bytes) =>
      URL.createObjectURL(new Blob([bytes.buffer as ArrayBuffer], { type: "image/png" })),
  });

  let lastPreviewUrl: string | null = null;

  function drawBase(): void {
    const grid = controller.getGrid();
    if (!grid) return;
    const { data, width, height } = heatmapRgba(grid);
    const off = document.createElement("canvas");
    off.width = width;
    off.height = height;
    off.getContext("2d")!.putImageData(new ImageData(data, width, height), 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, CANVAS_SIZE, CANVAS_SIZE);
    ctx.drawImage(off, 0, 0, CANVAS_SIZE, CANVAS_SIZE);
    ctx.fillStyle = "rgba(80, 160, 255, 0.9)";
    for (const { px, py } of projectPoints(grid, CANVAS_SIZE, CANVAS_SIZE)) {
      ctx.beginPath();
      ctx.arc(px, py, 2.5, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  function render(state: ViewState): void {
    banner.textContent = state.error ?? "";
    banner.style.display = state.error ? "block" : "none";

    drawBase();
    if (state.pointer && controller.getTransform()) {
      const { px, py } = controller.getTransform()!.latentToPixel(state.pointer.x, state.pointer.y);
      ctx.strokeStyle = "red";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(px, py, 6, 0, 2 * Math.PI);
      ctx.stroke();
    }

    strip.replaceChildren(
      ...(state.palette?.srgb ?? []).map(([r, g, b]) => {
        const cell = document.createElement("div");
        cell.className = "swatch";
        cell.style.background = `rgb(${r},${g},${b})`;
        return cell;
      }),
    );

    if (state.preview?.url && state.preview.url !== lastPreviewUrl) {
      if (lastPreviewUrl) URL.revokeObjectURL(lastPreviewUrl);
      lastPreviewUrl = state.preview.url;
      preview.src = state.preview.url;
    }
    snapshotBtn.disabled = !controller.canSnapshot;
  }

  controller.onChange(render);

  const models = await api.listModels();
  modelSelect.replaceChildren(
    ...models.map((m) => {
      const opt = document.createElement("option");
      opt.value = m.name;
      opt.textContent = `${m.name} (K=${m.k})`;
      return opt;
    }),
  );

  async function activate(name: string): Promise<void> {
    await controller.start(name, null);
    drawBase();
  }
  modelSelect.addEventListener("change", () => void activate(modelSelect.value));
  if (models.length) await activate(models[0].name);

  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    const imageId = await api.uploadImage(file);
    controller.setImage(imageId);
  });

  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    void controller.pointerMove(ev.clientX - rect.left, ev.clientY - rect.top);
  });

  snapshotBtn.addEventListener("click", async () => {
    const shot = await controller.snapshot();
    if (!shot) return;
    const a = document.createElement("a");
    a.href = URL.createObjectURL(new Blob([shot.png.buffer as ArrayBuffer], { type: "image/png" }));
    a.download = shot.filename;
    a.click();
    URL.revokeObjectURL(a.href);
    const pal = document.createElement("a");
    pal.href = URL.createObjectURL(new Blob([shot.paletteJson], { type: "application/json" }));
    pal.download = shot.filename.replace(/\.png$/, ".json");
    pal.click();
    URL.revokeObjectURL(pal.href);
  });
}

void boot();
