import { describe, expect, it } from "vitest";

import { heatmapRgba, projectPoints } from "../src/heatmap.js";
import type { DensityGridDoc } from "../src/types.js";

function grid(values: number[][], points: [number, number][] = []): DensityGridDoc {
  return {
    values,
    extents: { x_min: 0, x_max: 1, y_min: 0, y_max: 1 },
    dims: [0, 1],
    resolution: values.length,
    training_points: points,
  };
}

describe("heatmapRgba", () => {
  it("renders a constant grid as uniform mid-gray", () => {
    const { data } = heatmapRgba(grid([[3, 3], [3, 3]]));
    for (let i = 0; i < data.length; i += 4) {
      expect(data[i]).toBe(128);
      expect(data[i + 1]).toBe(128);
      expect(data[i + 2]).toBe(128);
      expect(data[i + 3]).toBe(255);
    }
  });

  it("maps the maximum cell to white and minimum to black", () => {
    const { data, width } = heatmapRgba(grid([[0, 5], [2, 1]]));
    expect(data[0]).toBe(0); // (0,0) is the minimum
    const maxOffset = (0 * width + 1) * 4; // (0,1) is the maximum
    expect(data[maxOffset]).toBe(255);
  });

  it("keeps the grid resolution as the buffer dimensions", () => {
    const values = Array.from({ length: 16 }, (_, r) => Array.from({ length: 16 }, (_, c) => r + c));
    const { width, height, data } = heatmapRgba(grid(values));
    expect(width).toBe(16);
    expect(height).toBe(16);
    expect(data.length).toBe(16 * 16 * 4);
  });
});

describe("projectPoints", () => {
  it("puts extents corners on canvas corners", () => {
    const g = grid([[0, 1], [2, 3]], [[0, 0], [1, 1]]);
    const pts = projectPoints(g, 200, 100);
    expect(pts[0]).toEqual({ px: 0, py: 0 });
    expect(pts[1]).toEqual({ px: 199, py: 99 });
  });
});
