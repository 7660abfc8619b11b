/** Grayscale rendering of a density grid into a raw RGBA buffer.
 *
 * Pure array-in, array-out so it is testable without a DOM; main.ts blits
 * the buffer into a canvas via ImageData. Minimum value maps to black,
 * maximum to white; a constant grid renders mid-gray.
 */

import type { DensityGridDoc } from "./types.js";

export function heatmapRgba(grid: DensityGridDoc): {
  data: Uint8ClampedArray<ArrayBuffer>;
  width: number;
  height: number;
} {
  const rows = grid.values.length;
  const cols = rows > 0 ? grid.values[0].length : 0;
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of grid.values) {
    for (const v of row) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const span = hi - lo;
  const data = new Uint8ClampedArray(new ArrayBuffer(rows * cols * 4));
  let o = 0;
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const g = span > 0 ? Math.round(((grid.values[r][c] - lo) / span) * 255) : 128;
      data[o] = g;
      data[o + 1] = g;
      data[o + 2] = g;
      data[o + 3] = 255;
      o += 4;
    }
  }
  return { data, width: cols, height: rows };
}

/** Training-point latent coordinates projected onto heatmap pixels. */
export function projectPoints(
  grid: DensityGridDoc,
  widthPx: number,
  heightPx: number,
): { px: number; py: number }[] {
  const { x_min, x_max, y_min, y_max } = grid.extents;
  return grid.training_points.map(([x, y]) => ({
    px: ((x - x_min) / (x_max - x_min)) * (widthPx - 1),
    py: ((y - y_min) / (y_max - y_min)) * (heightPx - 1),
  }));
}
