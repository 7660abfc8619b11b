import { describe, expect, it } from "vitest";

import { GridTransform } from "../src/transform.js";
import type { DensityExtents } from "../src/types.js";

const extents: DensityExtents = { x_min: -2.5, x_max: 3.1, y_min: -1.2, y_max: 2.4 };

describe("GridTransform", () => {
  it("round-trips pixel -> latent -> pixel within 0.5 px", () => {
    const t = new GridTransform(extents, 480, 360);
    for (let px = 0; px < 480; px += 7) {
      for (let py = 0; py < 360; py += 11) {
        const latent = t.pixelToLatent(px, py);
        const back = t.latentToPixel(latent.x, latent.y);
        expect(Math.abs(back.px - px)).toBeLessThan(0.5);
        expect(Math.abs(back.py - py)).toBeLessThan(0.5);
      }
    }
  });

  it("round-trips latent -> pixel -> latent", () => {
    const t = new GridTransform(extents, 256, 256);
    const { px, py } = t.latentToPixel(0.37, 1.02);
    const latent = t.pixelToLatent(px, py);
    expect(latent.x).toBeCloseTo(0.37, 9);
    expect(latent.y).toBeCloseTo(1.02, 9);
  });

  it("maps corners to extents", () => {
    const t = new GridTransform(extents, 100, 100);
    expect(t.pixelToLatent(0, 0)).toEqual({ x: extents.x_min, y: extents.y_min });
    const br = t.pixelToLatent(99, 99);
    expect(br.x).toBeCloseTo(extents.x_max, 9);
    expect(br.y).toBeCloseTo(extents.y_max, 9);
  });

  it("clamps out-of-canvas positions to the extents", () => {
    const t = new GridTransform(extents, 100, 100);
    const neg = t.pixelToLatent(-50, -10);
    expect(neg).toEqual({ x: extents.x_min, y: extents.y_min });
    const big = t.pixelToLatent(1000, 1000);
    expect(big.x).toBeCloseTo(extents.x_max, 9);
    expect(big.y).toBeCloseTo(extents.y_max, 9);
  });

  it("rejects degenerate setups", () => {
    expect(() => new GridTransform(extents, 1, 100)).toThrow();
    expect(() => new GridTransform({ ...extents, x_max: extents.x_min }, 100, 100)).toThrow();
  });
});
