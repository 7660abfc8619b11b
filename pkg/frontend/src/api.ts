/** Thin typed client for the palette service. One base-URL setting; the
 * fetch implementation is injectable so tests can fake the server. */

import type { DensityGridDoc, ModelInfo, PalettePayload, SuggestionPayload } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

/** The service surface the explorer consumes; mockable in tests. */
export interface PaletteApi {
  listModels(): Promise<ModelInfo[]>;
  density(model: string, res: number, dims?: [number, number]): Promise<DensityGridDoc>;
  paletteAt(model: string, x: number, y: number, dims?: [number, number]): Promise<PalettePayload>;
  uploadImage(png: Uint8Array | Blob): Promise<string>;
  recolor(
    imageId: string,
    model: string,
    x: number,
    y: number,
    opts?: { full?: boolean; segments?: string },
  ): Promise<Uint8Array>;
  suggest(model: string, observed: number[][], count: number): Promise<SuggestionPayload[]>;
}

export class ApiClient implements PaletteApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async json<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as T;
  }

  listModels(): Promise<ModelInfo[]> {
    return this.json<ModelInfo[]>("/models");
  }

  density(model: string, res: number, dims?: [number, number]): Promise<DensityGridDoc> {
    const dimsArg = dims ? `&dims=${dims[0]},${dims[1]}` : "";
    return this.json<DensityGridDoc>(`/models/${encodeURIComponent(model)}/density?res=${res}${dimsArg}`);
  }

  paletteAt(model: string, x: number, y: number, dims?: [number, number]): Promise<PalettePayload> {
    const dimsArg = dims ? `&dims=${dims[0]},${dims[1]}` : "";
    return this.json<PalettePayload>(
      `/models/${encodeURIComponent(model)}/palette?x=${x}&y=${y}${dimsArg}`,
    );
  }

  async uploadImage(png: Uint8Array | Blob): Promise<string> {
    const form = new FormData();
    const blob = png instanceof Blob ? png : new Blob([png.buffer as ArrayBuffer], { type: "image/png" });
    form.append("file", blob, "upload.png");
    const resp = await this.fetchImpl(`${this.baseUrl}/images`, { method: "POST", body: form });
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    const doc = (await resp.json()) as { image_id: string };
    return doc.image_id;
  }

  async recolor(
    imageId: string,
    model: string,
    x: number,
    y: number,
    opts: { full?: boolean; segments?: string } = {},
  ): Promise<Uint8Array> {
    const qs = opts.full ? "?full=1" : "";
    const resp = await this.fetchImpl(`${this.baseUrl}/recolor${qs}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ image_id: imageId, model, x, y, segments: opts.segments ?? "grid:64" }),
    });
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return new Uint8Array(await resp.arrayBuffer());
  }

  async suggest(model: string, observed: number[][], count: number): Promise<SuggestionPayload[]> {
    const resp = await this.fetchImpl(`${this.baseUrl}/suggest`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model, observed, count }),
    });
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    const doc = (await resp.json()) as { suggestions: SuggestionPayload[] };
    return doc.suggestions;
  }
}
