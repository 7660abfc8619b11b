import { describe, expect, it } from "vitest";

import type { PaletteApi } from "../src/api.js";
import {
  ExplorerController,
  ManualClock,
  checksum,
  replayPointerTrace,
  type TraceEvent,
} from "../src/state.js";
import type { PalettePayload } from "../src/types.js";
import { MockApi } from "./mock_api.js";

function makeController(api: PaletteApi, clock: ManualClock): ExplorerController {
  return new ExplorerController({
    api,
    canvasWidth: 320,
    canvasHeight: 320,
    clock,
    previewDelayMs: 150,
  });
}

const TRACE: TraceEvent[] = [
  { dtMs: 0, px: 10, py: 20 },
  { dtMs: 40, px: 60, py: 80 },
  { dtMs: 40, px: 120, py: 90 },
  { dtMs: 40, px: 180, py: 140 },
  { dtMs: 40, px: 200, py: 200 },
  { dtMs: 200, px: 240, py: 260 },
  { dtMs: 60, px: 280, py: 280 },
];

describe("ExplorerController", () => {
  it("replays a pointer trace deterministically (palette strip + preview checksum)", async () => {
    async function run(): Promise<{ palette: string; preview: number }> {
      const api = new MockApi();
      const clock = new ManualClock();
      const c = makeController(api, clock);
      await c.start("mock", "img-1");
      const final = await replayPointerTrace(c, clock, TRACE);
      return {
        palette: JSON.stringify(final.palette),
        preview: checksum(final.preview!.blob),
      };
    }
    const a = await run();
    const b = await run();
    expect(a.palette).toBe(b.palette);
    expect(a.preview).toBe(b.preview);
  });

  it("issues at most one preview request per debounce window during a drag", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", "img-1");
    const durationMs = 900;
    let t = 0;
    let px = 0;
    while (t < durationMs) {
      await c.pointerMove(px, px);
      clock.advance(15);
      t += 15;
      px += 3;
    }
    clock.advance(151);
    await c.settle();
    expect(api.calls.recolor).toBeLessThanOrEqual(Math.ceil(durationMs / 150) + 1);
    expect(api.calls.recolor).toBeGreaterThan(0);
  });

  it("skips duplicate pointer positions entirely", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", "img-1");
    await c.pointerMove(50, 50);
    const after = api.calls.palette;
    await c.pointerMove(50, 50);
    await c.pointerMove(50, 50);
    expect(api.calls.palette).toBe(after);
    // out-of-canvas clamps to the same latent point as the canvas corner
    await c.pointerMove(-20, -20);
    const corner = api.calls.palette;
    await c.pointerMove(-400, -1);
    expect(api.calls.palette).toBe(corner);
  });

  it("keeps pointer latent coordinates inside the extents", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", null);
    await c.pointerMove(-999, 9999);
    const p = c.getState().pointer!;
    expect(p.x).toBeGreaterThanOrEqual(-2);
    expect(p.x).toBeLessThanOrEqual(2);
    expect(p.y).toBeGreaterThanOrEqual(-2);
    expect(p.y).toBeLessThanOrEqual(2);
  });

  it("applies latest-wins to out-of-order palette responses", async () => {
    const api = new MockApi();
    const resolvers: ((p: PalettePayload) => void)[] = [];
    const real = api.paletteAt.bind(api);
    api.paletteAt = (model, x, y) => {
      void real;
      void model;
      return new Promise<PalettePayload>((resolve) => {
        resolvers.push((p) => resolve(p ?? api.paletteFor(x, y)));
      });
    };
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", null);
    const p1 = c.pointerMove(10, 10);
    const p2 = c.pointerMove(200, 200);
    expect(resolvers.length).toBe(2);
    const newer = api.paletteFor(99, 99);
    const older = api.paletteFor(1, 1);
    resolvers[1](newer); // newer request resolves first
    resolvers[0](older); // stale response must not overwrite
    await Promise.all([p1, p2]);
    expect(JSON.stringify(c.getState().palette)).toBe(JSON.stringify(newer));
  });

  it("shows the training palette when the pointer lands on its marker", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", null);
    const [tx, ty] = api.trainingPoints[1];
    const { px, py } = c.getTransform()!.latentToPixel(tx, ty);
    await c.pointerMove(px, py);
    expect(JSON.stringify(c.getState().palette)).toBe(JSON.stringify(api.paletteFor(tx, ty)));
  });

  it("surfaces fetch failures in the banner and keeps stale state", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", null);
    await c.pointerMove(40, 40);
    const palette = c.getState().palette;
    expect(palette).not.toBeNull();
    api.paletteAt = async () => {
      throw new Error("boom");
    };
    await c.pointerMove(240, 240);
    expect(c.getState().error).toContain("boom");
    expect(c.getState().palette).toBe(palette); // stale strip retained
  });

  it("disables snapshot before a preview exists and names files by view", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", "img-1");
    expect(c.canSnapshot).toBe(false);
    expect(await c.snapshot()).toBeNull();
    await c.pointerMove(100, 100);
    clock.advance(151);
    await c.settle();
    expect(c.canSnapshot).toBe(true);
    const shot = await c.snapshot();
    expect(shot).not.toBeNull();
    expect(shot!.filename).toMatch(/^mock_x-?\d+\.\d{4}_y-?\d+\.\d{4}\.png$/);
    const again = await c.snapshot();
    expect(checksum(shot!.png)).toBe(checksum(again!.png)); // server purity
  });

  it("reports errors on start but keeps the old layer", async () => {
    const api = new MockApi();
    const clock = new ManualClock();
    const c = makeController(api, clock);
    await c.start("mock", null);
    const grid = c.getGrid();
    api.density = async () => {
      throw new Error("density down");
    };
    await expect(c.start("mock", null)).rejects.toThrow();
    expect(c.getState().error).toContain("density down");
    expect(c.getGrid()).toBe(grid); // stale heatmap retained
  });
});
