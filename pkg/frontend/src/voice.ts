/** Band-filtered noise voice, the client-side twin of the server synth.
 *
 * White noise runs through a constant-skirt 2nd-order band-pass whose peak
 * gain equals Q = fc/bw; dividing by Q before the tanh soft clipper keeps
 * the band at unit height whatever the bandwidth. A bandwidth at or above
 * Nyquist bypasses the filter and passes the raw noise stream through.
 */

import { noiseSample } from "./noise.js";

export interface BandParams {
  centerFreqHz: number;
  bandwidthHz: number;
}

export interface BandpassCoeffs {
  b0: number;
  a1: number;
  a2: number;
  q: number;
}

export function bandpassCoeffs(fcHz: number, bwHz: number, rateHz: number): BandpassCoeffs {
  const w0 = (2 * Math.PI * fcHz) / rateHz;
  const q = fcHz / bwHz;
  const sw = Math.sin(w0);
  const al = sw / (2 * q);
  const a0 = 1 + al;
  return {
    b0: sw / 2 / a0,
    a1: (-2 * Math.cos(w0)) / a0,
    a2: (1 - al) / a0,
    q,
  };
}

export class BandNoiseVoice {
  private z1 = 0;
  private z2 = 0;
  private index = 0;
  private fc: number;
  private bw: number;
  private targetFc: number;
  private targetBw: number;

  /** smoothTimeS = 0 makes parameter changes take effect on the next block
   *  exactly, which is how the server holds them per tick. */
  constructor(
    private readonly seed: bigint,
    private readonly rateHz: number,
    private readonly gain: number,
    start: BandParams,
    private readonly smoothTimeS = 0.02,
  ) {
    if (!(rateHz > 0)) throw new RangeError("sample rate must be positive");
    this.checkParams(start);
    this.fc = this.targetFc = start.centerFreqHz;
    this.bw = this.targetBw = start.bandwidthHz;
  }

  private checkParams(p: BandParams): void {
    if (!(p.centerFreqHz > 0) || !(p.bandwidthHz > 0)) {
      throw new RangeError("band parameters must be positive");
    }
  }

  setTarget(p: BandParams): void {
    this.checkParams(p);
    this.targetFc = p.centerFreqHz;
    this.targetBw = p.bandwidthHz;
  }

  /** Fill out with the next out.length samples of the stream. Parameters
   *  move one smoothing step toward the target per call and stay constant
   *  within the block. */
  render(out: Float32Array | Float64Array): void {
    const n = out.length;
    if (n === 0) return;
    if (this.smoothTimeS <= 0) {
      this.fc = this.targetFc;
      this.bw = this.targetBw;
    } else {
      const a = 1 - Math.exp(-n / (this.rateHz * this.smoothTimeS));
      this.fc += a * (this.targetFc - this.fc);
      this.bw += a * (this.targetBw - this.bw);
    }
    if (this.bw >= 0.5 * this.rateHz) {
      for (let j = 0; j < n; j++) out[j] = noiseSample(this.seed, this.index + j);
      this.index += n;
      return;
    }
    const { b0, a1, a2, q } = bandpassCoeffs(this.fc, this.bw, this.rateHz);
    const g = this.gain;
    let z1 = this.z1;
    let z2 = this.z2;
    for (let j = 0; j < n; j++) {
      const x = noiseSample(this.seed, this.index + j);
      const y = b0 * x + z1;
      z1 = z2 - a1 * y;
      z2 = -b0 * x - a2 * y;
      out[j] = Math.tanh((g * y) / q);
    }
    this.z1 = z1;
    this.z2 = z2;
    this.index += n;
  }
}
