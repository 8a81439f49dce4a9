/** Dashboard wiring: play area -> intent, telemetry -> charts + sonogram,
 *  status -> local synth constants. Rendering happens on animation ticks;
 *  WebSocket callbacks only append data. */

import { AudioEngine } from "./audio.js";
import { drawStrip } from "./charts.js";
import { LoopClient, type ServerStatus, type Telemetry } from "./client.js";
import { powerSpectrum } from "./fft.js";
import { pointerToIntent } from "./intent.js";
import { Sonogram } from "./sonogram.js";
import { IntentThrottle } from "./throttle.js";
import { BandNoiseVoice } from "./voice.js";
import { toSeed } from "./noise.js";

const SONO_BLOCK = 512;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

const banner = $("banner");
const playArea = $("playarea");
const dot = $("dot");
const nearCanvas = $("chart-near") as HTMLCanvasElement;
const ampCanvas = $("chart-amp") as HTMLCanvasElement;
const rigCanvas = $("chart-rig") as HTMLCanvasElement;
const sonoCanvas = $("sonogram") as HTMLCanvasElement;
const urlInput = $("ws-url") as HTMLInputElement;
const connectBtn = $("btn-connect") as HTMLButtonElement;
const startBtn = $("btn-start") as HTMLButtonElement;
const stopBtn = $("btn-stop") as HTMLButtonElement;
const audioBtn = $("btn-audio") as HTMLButtonElement;
const noticeEl = $("notice");

const readouts = {
  gap: $("ro-gap"),
  nearness: $("ro-nearness"),
  amplitude: $("ro-amplitude"),
  rigidity: $("ro-rigidity"),
  temp: $("ro-temp"),
  fc: $("ro-fc"),
  bw: $("ro-bw"),
  rms: $("ro-rms"),
};

let client: LoopClient | null = null;
let throttle: IntentThrottle | null = null;
let vizVoice: BandNoiseVoice | null = null;
let sonogram: Sonogram | null = null;
let audio: AudioEngine = new AudioEngine();
const sonoScratch = new Float64Array(SONO_BLOCK);
let dirty = false;
let lastIntent = { gap_mm: 0, rigidity: 0 };

const defaultUrl = () => {
  const q = new URLSearchParams(location.search).get("ws");
  if (q) return q;
  const host = location.hostname || "127.0.0.1";
  return `ws://${host}:8000/ws`;
};

function setBanner(text: string | null): void {
  banner.textContent = text ?? "";
  banner.style.display = text === null ? "none" : "block";
}

function notice(text: string): void {
  noticeEl.textContent = text;
}

function onStatus(status: ServerStatus): void {
  // local synth mirrors the server's constants; fetched, never hardcoded
  const fc0 = Math.sqrt(status.freq_lo_hz * status.freq_hi_hz);
  const bw0 = Math.sqrt(status.bw_lo_hz * status.bw_hi_hz);
  vizVoice = new BandNoiseVoice(
    toSeed(status.seed),
    status.audio_rate_hz,
    status.render_gain,
    { centerFreqHz: fc0, bandwidthHz: bw0 },
    0,
  );
  sonogram = new Sonogram(sonoCanvas, status.audio_rate_hz);
  lastIntent = { gap_mm: status.sensor_range_mm, rigidity: 0 };
  notice(
    `session ready: noise=${status.noise_algorithm} seed=${status.seed} ` +
      `telemetry ${status.telemetry_hz.toFixed(1)} Hz` +
      (status.has_table ? "" : " (no calibration table: rigidity is raw amplitude)"),
  );
  dirty = true;
}

function onFrame(frame: Telemetry): void {
  if (vizVoice && sonogram) {
    vizVoice.setTarget({ centerFreqHz: frame.center_freq_hz, bandwidthHz: frame.bandwidth_hz });
    vizVoice.render(sonoScratch);
    sonogram.pushColumn(powerSpectrum(sonoScratch));
  }
  audio.setParams(frame.center_freq_hz, frame.bandwidth_hz);
  dirty = true;
}

function connect(): void {
  client?.close();
  setBanner("connecting…");
  const c = new LoopClient(urlInput.value);
  client = c;
  throttle = new IntentThrottle((gapMm, rigidity) => c.sendIntent(gapMm, rigidity));
  c.onConnection = (s) => {
    if (s === "open") setBanner(null);
    else if (s === "closed") setBanner("disconnected — plots frozen");
  };
  c.onStatus = onStatus;
  c.onFrame = onFrame;
  c.onNotice = notice;
}

function pointerUpdate(ev: PointerEvent): void {
  const rect = playArea.getBoundingClientRect();
  if (rect.width === 0 || rect.height === 0) return;
  const range = client?.status?.sensor_range_mm ?? 17;
  const intent = pointerToIntent(
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    rect.width,
    rect.height,
    range,
  );
  lastIntent = intent;
  dot.style.left = `${(intent.rigidity * 100).toFixed(2)}%`;
  dot.style.top = `${((1 - intent.gap_mm / range) * 100).toFixed(2)}%`;
  $("ro-intent").textContent = `${intent.gap_mm.toFixed(2)} mm / ${intent.rigidity.toFixed(2)}`;
  throttle?.push(intent.gap_mm, intent.rigidity);
}

playArea.addEventListener("pointermove", pointerUpdate);
playArea.addEventListener("pointerdown", pointerUpdate);

connectBtn.addEventListener("click", connect);
startBtn.addEventListener("click", () => client?.start());
stopBtn.addEventListener("click", () => client?.stop());
audioBtn.addEventListener("click", () => {
  void (async () => {
    if (audio.state === "on") {
      await audio.disable();
    } else if (client?.status) {
      const lastFrame = client.frames.latest;
      await audio.enable(
        client.status,
        lastFrame?.center_freq_hz ?? Math.sqrt(client.status.freq_lo_hz * client.status.freq_hi_hz),
        lastFrame?.bandwidth_hz ?? Math.sqrt(client.status.bw_lo_hz * client.status.bw_hi_hz),
      );
    }
    audioBtn.textContent = `audio: ${audio.state}`;
  })();
});

function render(): void {
  requestAnimationFrame(render);
  if (!dirty || !client) return;
  dirty = false;
  const frames = client.frames.toArray();
  const span = client.frames.capacity;
  const range = client.status?.sensor_range_mm ?? 17;
  drawStrip(nearCanvas, frames.map((f) => f.nearness_mm), span, {
    min: 0, max: range, color: "#53b4ff", label: "nearness (mm)",
  });
  drawStrip(ampCanvas, frames.map((f) => f.amplitude_mm), span, {
    min: 0, max: 1.2, color: "#ffc553", label: "vibration amplitude (mm)",
  });
  drawStrip(rigCanvas, frames.map((f) => f.rigidity), span, {
    min: 0, max: 1, color: "#7dff8a", label: "rigidity",
  });
  const f = client.frames.latest;
  if (f) {
    readouts.gap.textContent = f.gap_mm.toFixed(3);
    readouts.nearness.textContent = f.nearness_mm.toFixed(3);
    readouts.amplitude.textContent = f.amplitude_mm.toFixed(3);
    readouts.rigidity.textContent = f.rigidity.toFixed(3);
    readouts.temp.textContent = f.coil_temp_c.toFixed(2);
    readouts.fc.textContent = f.center_freq_hz.toFixed(1);
    readouts.bw.textContent = f.bandwidth_hz.toFixed(1);
    readouts.rms.textContent = f.audio_rms.toFixed(4);
  }
}

urlInput.value = defaultUrl();
connect();
requestAnimationFrame(render);

export { lastIntent };
