/** Audible output: a worklet running the same voice as the server synth.
 *
 * Synthesis is local; no PCM crosses the wire. The seed, gain, and starting
 * band come from the server's status message so the client voice and the
 * simulator agree on constants. Parameter changes are smoothed over 20 ms
 * inside the voice. If the worklet cannot start (no audio device, old
 * browser) the state reports "unavailable" and the UI stays silent.
 */

import type { ServerStatus } from "./client.js";

export type AudioState = "off" | "on" | "unavailable";

export class AudioEngine {
  state: AudioState = "off";
  private ctx: AudioContext | null = null;
  private node: AudioWorkletNode | null = null;

  async enable(status: ServerStatus, startFcHz: number, startBwHz: number): Promise<AudioState> {
    if (this.state === "on") return this.state;
    try {
      this.ctx = new AudioContext();
      await this.ctx.audioWorklet.addModule(new URL("./worklet.js", import.meta.url));
      this.node = new AudioWorkletNode(this.ctx, "band-noise", {
        numberOfInputs: 0,
        outputChannelCount: [1],
        processorOptions: {
          seed: String(status.seed),
          gain: status.render_gain,
          centerFreqHz: startFcHz,
          bandwidthHz: startBwHz,
        },
      });
      this.node.connect(this.ctx.destination);
      await this.ctx.resume();
      this.state = "on";
    } catch {
      await this.ctx?.close().catch(() => undefined);
      this.ctx = null;
      this.node = null;
      this.state = "unavailable";
    }
    return this.state;
  }

  setParams(centerFreqHz: number, bandwidthHz: number): void {
    this.node?.port.postMessage({ centerFreqHz, bandwidthHz });
  }

  async disable(): Promise<void> {
    this.node?.disconnect();
    await this.ctx?.close().catch(() => undefined);
    this.node = null;
    this.ctx = null;
    if (this.state === "on") this.state = "off";
  }
}
