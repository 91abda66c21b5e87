/**
 * Drag-frame coalescing: the 3D view produces pointer moves far faster than
 * the send budget, so intermediate positions overwrite a pending slot and a
 * frame goes out at most once per interval. The browser therefore never
 * back-pressures the control loop.
 */

export class FrameCoalescer<T> {
  private pending: T | null = null;
  private lastSend = -Infinity;

  constructor(
    private readonly intervalS: number,
    private readonly send: (value: T) => void,
  ) {
    if (!(intervalS > 0)) throw new Error("interval must be > 0");
  }

  /** Offer a new value; sends now if the budget allows, else keeps latest. */
  offer(value: T, nowS: number): void {
    if (nowS - this.lastSend >= this.intervalS) {
      this.lastSend = nowS;
      this.pending = null;
      this.send(value);
    } else {
      this.pending = value;
    }
  }

  /** Called periodically (e.g. per animation tick) to flush a held value. */
  tick(nowS: number): void {
    if (this.pending !== null && nowS - this.lastSend >= this.intervalS) {
      const value = this.pending;
      this.pending = null;
      this.lastSend = nowS;
      this.send(value);
    }
  }

  /** Drop held state (connection loss, drag cancel). */
  reset(): void {
    this.pending = null;
    this.lastSend = -Infinity;
  }

  get hasPending(): boolean {
    return this.pending !== null;
  }
}
