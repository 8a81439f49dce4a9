/** Rate limiter for intent messages.
 *
 * Pointer events can arrive at hundreds of hertz; the wire carries at most
 * maxRateHz sends. An event inside the dead time is held as the pending
 * value and flushed when the interval elapses, so the newest position always
 * reaches the server (trailing edge), just never faster than the cap.
 */

type Send = (gapMm: number, rigidity: number) => void;
type Schedule = (fn: () => void, ms: number) => void;

export class IntentThrottle {
  private readonly intervalMs: number;
  private lastSentAt = -Infinity;
  private pending: [number, number] | null = null;
  private timerArmed = false;

  constructor(
    private readonly send: Send,
    maxRateHz = 60,
    private readonly now: () => number = () => performance.now(),
    private readonly schedule: Schedule = (fn, ms) => {
      setTimeout(fn, ms);
    },
  ) {
    if (!(maxRateHz > 0)) throw new RangeError("rate cap must be positive");
    this.intervalMs = 1000 / maxRateHz;
  }

  push(gapMm: number, rigidity: number): void {
    const t = this.now();
    if (t - this.lastSentAt >= this.intervalMs) {
      this.lastSentAt = t;
      this.send(gapMm, rigidity);
      return;
    }
    this.pending = [gapMm, rigidity];
    if (!this.timerArmed) {
      this.timerArmed = true;
      this.schedule(() => this.flush(), this.lastSentAt + this.intervalMs - t);
    }
  }

  private flush(): void {
    this.timerArmed = false;
    if (this.pending === null) return;
    const t = this.now();
    const wait = this.lastSentAt + this.intervalMs - t;
    if (wait > 0) {
      // timer fired early; keep the cap honest
      this.timerArmed = true;
      this.schedule(() => this.flush(), wait);
      return;
    }
    const [gapMm, rigidity] = this.pending;
    this.pending = null;
    this.lastSentAt = t;
    this.send(gapMm, rigidity);
  }
}
