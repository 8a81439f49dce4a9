/** WebSocket client for the live-session service.
 *
 * Holds the connection state, the server-announced session parameters, and
 * the last 600 telemetry frames (about 20 s at the service's ~30 Hz). The
 * buffer is append-only from received frames; a disconnect freezes it in
 * place rather than clearing, so the last seconds stay on screen.
 */

import { RingBuffer } from "./ring.js";

export interface ServerStatus {
  type: "status";
  running: boolean;
  seed: number;
  noise_algorithm: string;
  sensor_rate_hz: number;
  sensor_range_mm: number;
  audio_rate_hz: number;
  audio_per_tick: number;
  render_gain: number;
  freq_lo_hz: number;
  freq_hi_hz: number;
  bw_lo_hz: number;
  bw_hi_hz: number;
  telemetry_hz: number;
  has_table: boolean;
  stream_pcm: boolean;
}

export interface Telemetry {
  type: "telemetry";
  t: number;
  gap_mm: number;
  nearness_mm: number;
  amplitude_mm: number;
  rigidity: number;
  coil_temp_c: number;
  center_freq_hz: number;
  bandwidth_hz: number;
  audio_rms: number;
  audio_seq: number;
}

export type ConnectionState = "connecting" | "open" | "closed";

export class LoopClient {
  readonly frames = new RingBuffer<Telemetry>(600);
  status: ServerStatus | null = null;
  connection: ConnectionState = "connecting";
  running = false;

  onStatus: ((s: ServerStatus) => void) | null = null;
  onFrame: ((f: Telemetry) => void) | null = null;
  onConnection: ((s: ConnectionState) => void) | null = null;
  onNotice: ((text: string) => void) | null = null;

  private ws: WebSocket;

  constructor(url: string) {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => this.setConnection("open");
    this.ws.onclose = () => this.setConnection("closed");
    this.ws.onerror = () => this.setConnection("closed");
    this.ws.onmessage = (ev) => this.dispatch(String(ev.data));
  }

  private setConnection(s: ConnectionState): void {
    this.connection = s;
    if (s === "closed") this.running = false;
    this.onConnection?.(s);
  }

  private dispatch(raw: string): void {
    let msg: Record<string, unknown>;
    try {
      msg = JSON.parse(raw) as Record<string, unknown>;
    } catch {
      this.onNotice?.("unparseable message from server");
      return;
    }
    switch (msg["type"]) {
      case "status":
        this.status = msg as unknown as ServerStatus;
        this.running = Boolean(msg["running"]);
        this.onStatus?.(this.status);
        break;
      case "telemetry": {
        const frame = msg as unknown as Telemetry;
        this.frames.push(frame);
        this.onFrame?.(frame);
        break;
      }
      case "started":
        this.running = true;
        this.onNotice?.("session running");
        break;
      case "stopped":
        this.running = false;
        this.onNotice?.("session stopped");
        break;
      case "fault":
        this.running = false;
        this.onNotice?.(`fault: ${String(msg["message"])}`);
        break;
      case "error":
        this.onNotice?.(`rejected: ${String(msg["message"])}`);
        break;
      case "notice":
        this.onNotice?.(String(msg["message"]));
        break;
      default:
        this.onNotice?.(`unknown message type ${String(msg["type"])}`);
    }
  }

  private sendJson(obj: unknown): void {
    if (this.ws.readyState === WebSocket.OPEN) this.ws.send(JSON.stringify(obj));
  }

  sendIntent(gapMm: number, rigidity: number): void {
    this.sendJson({ type: "finger", gap_mm: gapMm, rigidity });
  }

  start(): void {
    this.sendJson({ type: "start" });
  }

  stop(): void {
    this.sendJson({ type: "stop" });
  }

  close(): void {
    this.ws.close();
  }
}
