/** Invertible mapping between canvas pixels and latent coordinates.
 *
 * Pixel (0, 0) is the canvas top-left and maps to (x_min, y_min); the
 * bottom-right pixel maps to (x_max, y_max). Out-of-canvas positions clamp
 * to the extents, so the pointer's latent position always stays inside the
 * viewport.
 */

import type { DensityExtents } from "./types.js";

export class GridTransform {
  constructor(
    readonly extents: DensityExtents,
    readonly widthPx: number,
    readonly heightPx: number,
  ) {
    if (widthPx < 2 || heightPx < 2) throw new Error("canvas must be at least 2x2");
    if (!(extents.x_max > extents.x_min) || !(extents.y_max > extents.y_min)) {
      throw new Error("degenerate extents");
    }
  }

  pixelToLatent(px: number, py: number): { x: number; y: number } {
    const cx = Math.min(Math.max(px, 0), this.widthPx - 1);
    const cy = Math.min(Math.max(py, 0), this.heightPx - 1);
    const { x_min, x_max, y_min, y_max } = this.extents;
    return {
      x: x_min + (cx / (this.widthPx - 1)) * (x_max - x_min),
      y: y_min + (cy / (this.heightPx - 1)) * (y_max - y_min),
    };
  }

  latentToPixel(x: number, y: number): { px: number; py: number } {
    const { x_min, x_max, y_min, y_max } = this.extents;
    return {
      px: ((x - x_min) / (x_max - x_min)) * (this.widthPx - 1),
      py: ((y - y_min) / (y_max - y_min)) * (this.heightPx - 1),
    };
  }
}
