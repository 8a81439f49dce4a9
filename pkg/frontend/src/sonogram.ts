/** Scrolling sonogram: one power-spectrum column per telemetry frame,
 *  newest at the right edge, log frequency axis. */

export class Sonogram {
  private readonly ctx: CanvasRenderingContext2D | null;
  private readonly fMin: number;
  private readonly fMax: number;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly rateHz: number,
    fMinHz = 100,
  ) {
    this.ctx = canvas.getContext("2d");
    this.fMin = fMinHz;
    this.fMax = rateHz / 2;
  }

  clear(): void {
    this.ctx?.clearRect(0, 0, this.canvas.width, this.canvas.height);
  }

  /** Scroll one pixel left and paint power (bins 0..n/2 over 0..rate/2). */
  pushColumn(power: Float64Array): void {
    const ctx = this.ctx;
    if (!ctx) return;
    const { width: w, height: h } = this.canvas;
    ctx.drawImage(this.canvas, -1, 0);
    const col = ctx.createImageData(1, h);
    const nBins = power.length;
    const logRatio = Math.log(this.fMax / this.fMin);
    for (let y = 0; y < h; y++) {
      // y = 0 is the top of the canvas = highest frequency
      const f = this.fMin * Math.exp(logRatio * (1 - y / (h - 1)));
      const bin = Math.min(nBins - 1, Math.round((f / this.fMax) * (nBins - 1)));
      const p = power[bin]!;
      const v = Math.min(1, Math.log1p(p * 50) / 5);
      const o = y * 4;
      col.data[o] = Math.round(20 + 50 * v);
      col.data[o + 1] = Math.round(24 + 190 * v);
      col.data[o + 2] = Math.round(38 + 160 * v);
      col.data[o + 3] = 255;
    }
    ctx.putImageData(col, w - 1, 0);
  }
}
