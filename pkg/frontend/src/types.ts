/** Wire types of the palette service plus the explorer's view state. */

export interface ModelInfo {
  name: string;
  k: number;
  q: number | null;
}

export interface DensityExtents {
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
}

export interface DensityGridDoc {
  values: number[][];
  extents: DensityExtents;
  dims: [number, number];
  resolution: number;
  training_points: [number, number][];
}

export interface PalettePayload {
  k: number;
  colors: [number, number, number][];
  srgb: [number, number, number][];
}

export interface SuggestionPayload extends PalettePayload {
  sim_iters: number;
}

/** Everything the UI needs to render one frame. */
export interface ViewState {
  model: ModelInfo | null;
  dims: [number, number];
  extents: DensityExtents | null;
  /** pointer position in latent coordinates, clamped to the extents */
  pointer: { x: number; y: number } | null;
  palette: PalettePayload | null;
  /** opaque handle for the latest preview image */
  preview: { blob: Uint8Array; url: string | null } | null;
  error: string | null;
}

export function initialViewState(): ViewState {
  return {
    model: null,
    dims: [0, 1],
    extents: null,
    pointer: null,
    palette: null,
    preview: null,
    error: null,
  };
}
