/** Explorer state machine, independent of the DOM.
 *
 * Pointer moves map through the pixel-to-latent transform, fetch the
 * palette immediately, and schedule the recolor preview on a 150 ms
 * trailing window. Responses apply latest-wins: a stale response never
 * overwrites a newer one, so the final state is a pure function of the
 * pointer history and the (deterministic) server responses.
 */

import type { PaletteApi } from "./api.js";
import { TrailingWindow, type Clock, realClock } from "./debounce.js";
import { GridTransform } from "./transform.js";
import type { DensityGridDoc, ViewState } from "./types.js";
import { initialViewState } from "./types.js";

export const PREVIEW_DEBOUNCE_MS = 150;

export interface ControllerOptions {
  api: PaletteApi;
  canvasWidth: number;
  canvasHeight: number;
  clock?: Clock;
  previewDelayMs?: number;
  segments?: string;
  densityResolution?: number;
  makeObjectUrl?: (bytes: Uint8Array) => string | null;
}

export type Listener = (state: ViewState) => void;

export class ExplorerController {
  private readonly api: PaletteApi;
  private readonly previewWindow: TrailingWindow;
  private readonly segments: string;
  private readonly densityResolution: number;
  private readonly makeObjectUrl: (bytes: Uint8Array) => string | null;
  private readonly listeners: Listener[] = [];

  private state: ViewState = initialViewState();
  private grid: DensityGridDoc | null = null;
  private transform: GridTransform | null = null;
  private imageId: string | null = null;

  private paletteSeq = 0;
  private previewSeq = 0;
  private pendingPreview: Promise<void> = Promise.resolve();
  private pendingPalette: Promise<void> = Promise.resolve();

  constructor(private readonly opts: ControllerOptions) {
    this.api = opts.api;
    this.previewWindow = new TrailingWindow(opts.previewDelayMs ?? PREVIEW_DEBOUNCE_MS, opts.clock ?? realClock);
    this.segments = opts.segments ?? "grid:64";
    this.densityResolution = opts.densityResolution ?? 64;
    this.makeObjectUrl = opts.makeObjectUrl ?? (() => null);
  }

  getState(): ViewState {
    return this.state;
  }

  getGrid(): DensityGridDoc | null {
    return this.grid;
  }

  getTransform(): GridTransform | null {
    return this.transform;
  }

  get previewRequestCount(): number {
    return this.previewWindow.fireCount;
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const l of this.listeners) l(this.state);
  }

  /** Load a model's density grid and make it the active view. */
  async start(modelName: string, imageId: string | null = null): Promise<void> {
    this.imageId = imageId;
    try {
      const models = await this.api.listModels();
      const model = models.find((m) => m.name === modelName);
      if (!model) throw new Error(`unknown model ${modelName}`);
      const grid = await this.api.density(modelName, this.densityResolution);
      this.grid = grid;
      this.transform = new GridTransform(grid.extents, this.opts.canvasWidth, this.opts.canvasHeight);
      this.update({
        model,
        dims: grid.dims,
        extents: grid.extents,
        pointer: null,
        palette: null,
        preview: null,
        error: null,
      });
    } catch (err) {
      // stale layers are retained; only the banner changes
      this.update({ error: String(err) });
      throw err;
    }
  }

  setImage(imageId: string | null): void {
    this.imageId = imageId;
  }

  /**
   * Handle a pointer move in canvas pixels. Resolves when the palette
   * request settles; the preview request stays on its trailing window.
   * Unchanged (clamped) positions are ignored entirely.
   */
  async pointerMove(px: number, py: number): Promise<void> {
    if (!this.transform || !this.state.model) return;
    const latent = this.transform.pixelToLatent(px, py);
    const prev = this.state.pointer;
    if (prev && prev.x === latent.x && prev.y === latent.y) return;
    this.update({ pointer: latent });

    const modelName = this.state.model.name;
    const seq = ++this.paletteSeq;
    this.pendingPalette = this.api
      .paletteAt(modelName, latent.x, latent.y, this.state.dims)
      .then((palette) => {
        if (seq === this.paletteSeq) this.update({ palette, error: null });
      })
      .catch((err) => {
        if (seq === this.paletteSeq) this.update({ error: String(err) });
      });

    if (this.imageId !== null) {
      this.previewWindow.schedule(() => this.firePreview(latent.x, latent.y));
    }
    await this.pendingPalette;
  }

  private firePreview(x: number, y: number): void {
    if (this.imageId === null || !this.state.model) return;
    const modelName = this.state.model.name;
    const imageId = this.imageId;
    const seq = ++this.previewSeq;
    this.pendingPreview = this.api
      .recolor(imageId, modelName, x, y, { segments: this.segments })
      .then((blob) => {
        if (seq === this.previewSeq) {
          this.update({ preview: { blob, url: this.makeObjectUrl(blob) }, error: null });
        }
      })
      .catch((err) => {
        if (seq === this.previewSeq) this.update({ error: String(err) });
      });
  }

  /** Resolves once the most recently issued requests have settled. */
  async settle(): Promise<void> {
    await this.pendingPalette;
    await this.pendingPreview;
  }

  get canSnapshot(): boolean {
    return this.state.preview !== null && this.state.pointer !== null;
  }

  /** Full-resolution render plus the palette, named after the view. */
  async snapshot(): Promise<{ filename: string; png: Uint8Array; paletteJson: string } | null> {
    if (!this.canSnapshot || !this.state.model || !this.state.pointer || this.imageId === null) {
      return null;
    }
    const { x, y } = this.state.pointer;
    const png = await this.api.recolor(this.imageId, this.state.model.name, x, y, {
      full: true,
      segments: this.segments,
    });
    const filename = `${this.state.model.name}_x${x.toFixed(4)}_y${y.toFixed(4)}.png`;
    return { filename, png, paletteJson: JSON.stringify(this.state.palette) };
  }
}

/** FNV-1a, for comparing preview bytes across replays. */
export function checksum(bytes: Uint8Array): number {
  let h = 0x811c9dc5;
  for (const b of bytes) {
    h ^= b;
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export interface TraceEvent {
  /** milliseconds since the previous event */
  dtMs: number;
  px: number;
  py: number;
}

/**
 * Deterministically replay a recorded pointer trace against a controller
 * driven by a manual clock. Returns the final state after all requests
 * settle.
 */
export async function replayPointerTrace(
  controller: ExplorerController,
  clock: ManualClock,
  trace: TraceEvent[],
): Promise<ViewState> {
  for (const ev of trace) {
    clock.advance(ev.dtMs);
    await controller.pointerMove(ev.px, ev.py);
  }
  clock.advance(PREVIEW_DEBOUNCE_MS + 1);
  await controller.settle();
  return controller.getState();
}

/** Virtual-time clock for tests and trace replay. */
export class ManualClock implements Clock {
  private now = 0;
  private nextId = 1;
  private timers = new Map<number, { at: number; fn: () => void }>();

  setTimeout(fn: () => void, ms: number): unknown {
    const id = this.nextId++;
    this.timers.set(id, { at: this.now + ms, fn });
    return id;
  }

  clearTimeout(handle: unknown): void {
    this.timers.delete(handle as number);
  }

  advance(ms: number): void {
    const target = this.now + ms;
    for (;;) {
      let nextId: number | null = null;
      let nextAt = Infinity;
      for (const [id, t] of this.timers) {
        if (t.at <= target && t.at < nextAt) {
          nextAt = t.at;
          nextId = id;
        }
      }
      if (nextId === null) break;
      const timer = this.timers.get(nextId)!;
      this.timers.delete(nextId);
      this.now = timer.at;
      timer.fn();
    }
    this.now = target;
  }
}
