/** Audio worklet processor: runs the band-noise voice at the context rate.
 *  Parameter updates arrive over the port as {centerFreqHz, bandwidthHz}. */

import { BandNoiseVoice, type BandParams } from "./voice.js";
import { toSeed } from "./noise.js";

declare const sampleRate: number;
declare class AudioWorkletProcessor {
  readonly port: MessagePort;
  constructor();
}
declare function registerProcessor(
  name: string,
  ctor: new (options: WorkletOptions) => AudioWorkletProcessor,
): void;

interface WorkletOptions {
  processorOptions: {
    seed: string;
    gain: number;
    centerFreqHz: number;
    bandwidthHz: number;
  };
}

class BandNoiseProcessor extends AudioWorkletProcessor {
  private readonly voice: BandNoiseVoice;

  constructor(options: WorkletOptions) {
    super();
    const po = options.processorOptions;
    this.voice = new BandNoiseVoice(toSeed(po.seed), sampleRate, po.gain, {
      centerFreqHz: po.centerFreqHz,
      bandwidthHz: po.bandwidthHz,
    });
    this.port.onmessage = (ev: MessageEvent<BandParams>) => {
      this.voice.setTarget(ev.data);
    };
  }

  process(_inputs: Float32Array[][], outputs: Float32Array[][]): boolean {
    const ch = outputs[0]?.[0];
    if (ch) {
      this.voice.render(ch);
      // listening trim; the voice itself is tanh-bounded to [-1, 1]
      for (let i = 0; i < ch.length; i++) ch[i]! *= 0.5;
    }
    return true;
  }
}

registerProcessor("band-noise", BandNoiseProcessor);
