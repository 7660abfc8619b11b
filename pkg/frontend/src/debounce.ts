/** Trailing-window scheduler: at most one fire per window, always with the
 * latest payload.
 *
 * The first call opens a window that fires after `delayMs`; calls landing
 * inside an open window replace the pending payload instead of resetting
 * the timer, so a continuous drag fires once per window rather than being
 * starved (and never more than ceil(duration / delayMs) times in total).
 * The clock is injectable for deterministic tests.
 */

export interface Clock {
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
}

export const realClock: Clock = {
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
};

export class TrailingWindow {
  private pending: (() => void) | null = null;
  private timer: unknown = null;
  private fired = 0;

  constructor(
    private readonly delayMs: number,
    private readonly clock: Clock = realClock,
  ) {}

  get fireCount(): number {
    return this.fired;
  }

  schedule(fn: () => void): void {
    this.pending = fn;
    if (this.timer === null) {
      this.timer = this.clock.setTimeout(() => {
        this.timer = null;
        const run = this.pending;
        this.pending = null;
        if (run) {
          this.fired += 1;
          run();
        }
      }, this.delayMs);
    }
  }

  cancel(): void {
    if (this.timer !== null) {
      this.clock.clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
  }
}
