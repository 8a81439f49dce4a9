"""Live-session WebSocket service.

One kernel state per started session, advanced in telemetry-sized spans
and paced against the wall clock (the simulation never runs ahead of real
time). Every span is recorded per tick, so a finished session can be
replayed through the batch path and must match bit for bit.

Client messages (JSON): finger, start, stop, set_config, plus anything
else, which earns an error reply. The server pushes a status message on
connect, telemetry frames while running, and fault/notice messages as
they happen.
"""

from __future__ import annotations

import asyncio
import base64
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import synth
from .config import DeviceConfig
from .demux import CalibrationTable
from .errors import ConfigError, DeviceFault, SimulationFault
from .harness import LoopState, advance

MAX_SPANS_PER_PUMP = 8
LAG_NOTICE_S = 0.5
SPECTRO_WINDOW = 512


@dataclass
class Recording:
    """Per-tick record of a session, sufficient to replay it offline."""
    seed: int
    gap0_mm: float
    temp0_c: float
    gaps: list[float] = field(default_factory=list)
    rigidities: list[float] = field(default_factory=list)


class Session:
    def __init__(self, cfg: DeviceConfig, table: CalibrationTable | None,
                 seed: int, recordings: list[Recording]):
        self.cfg = cfg
        self.table = table
        self.seed = seed
        self.recordings = recordings
        self.intent_gap = cfg.sensor_range_mm
        self.intent_rig = 0.0
        self.running = False
        self.state: LoopState | None = None
        self.recording: Recording | None = None
        self.start_time = 0.0
        self.last_notice = 0.0

    def status(self) -> dict:
        cfg = self.cfg
        return {
            "type": "status",
            "running": self.running,
            "seed": self.seed,
            "noise_algorithm": cfg.noise_algorithm,
            "sensor_rate_hz": cfg.sensor_rate_hz,
            "sensor_range_mm": cfg.sensor_range_mm,
            "audio_rate_hz": cfg.audio_rate_hz,
            "audio_per_tick": cfg.audio_per_tick,
            "render_gain": cfg.render_gain,
            "freq_lo_hz": cfg.freq_lo_hz,
            "freq_hi_hz": cfg.freq_hi_hz,
            "bw_lo_hz": cfg.bw_lo_hz,
            "bw_hi_hz": cfg.bw_hi_hz,
            "telemetry_hz": cfg.sensor_rate_hz / cfg.telemetry_decimation,
            "has_table": self.table is not None,
            "stream_pcm": cfg.stream_pcm,
        }

    def handle(self, msg) -> list[dict]:
        if not isinstance(msg, dict) or "type" not in msg:
            return [_err("message must be a JSON object with a 'type' field")]
        kind = msg["type"]
        if kind == "finger":
            return self._handle_finger(msg)
        if kind == "start":
            return self._handle_start()
        if kind == "stop":
            return self._handle_stop()
        if kind == "set_config":
            return self._handle_set_config(msg)
        return [_err(f"unknown message type {kind!r}")]

    def _handle_finger(self, msg) -> list[dict]:
        try:
            gap = float(msg["gap_mm"])
            rig = float(msg["rigidity"])
        except (KeyError, TypeError, ValueError):
            return [_err("finger message needs numeric gap_mm and rigidity")]
        if not (np.isfinite(gap) and np.isfinite(rig)):
            return [_err("finger values must be finite")]
        if not 0.0 <= gap <= self.cfg.sensor_range_mm:
            return [_err(f"gap_mm must be within [0, {self.cfg.sensor_range_mm:g}]")]
        if not 0.0 <= rig <= 1.0:
            return [_err("rigidity must be within [0, 1]")]
        self.intent_gap = gap
        self.intent_rig = rig
        return []

    def _handle_start(self) -> list[dict]:
        if self.running:
            return [_err("session already running")]
        self.state = LoopState(self.cfg, self.intent_gap)
        self.recording = Recording(self.seed, self.intent_gap, self.cfg.ambient_c)
        self.recordings.append(self.recording)
        self.running = True
        self.start_time = time.monotonic()
        self.last_notice = 0.0
        return [{"type": "started"}]

    def _handle_stop(self) -> list[dict]:
        if not self.running:
            return [_err("session is not running")]
        self.running = False
        t = self.state.tick / self.cfg.sensor_rate_hz
        return [{"type": "stopped", "t": t}]

    def _handle_set_config(self, msg) -> list[dict]:
        if self.running:
            return [_err("set_config requires a stopped session")]
        fields = msg.get("fields")
        if not isinstance(fields, dict):
            return [_err("set_config needs a 'fields' object")]
        try:
            self.cfg = self.cfg.replace(**fields)
        except (ConfigError, TypeError, ValueError) as exc:
            return [_err(f"rejected config change: {exc}")]
        self.intent_gap = min(self.intent_gap, self.cfg.sensor_range_mm)
        return [self.status()]

    def pump(self) -> list[dict]:
        """Advance toward the wall clock; returns frames to send."""
        cfg = self.cfg
        n = cfg.telemetry_decimation
        frames: list[dict] = []
        now = time.monotonic()
        target = int((now - self.start_time) * cfg.sensor_rate_hz)
        spans = 0
        while self.state.tick + n <= target and spans < MAX_SPANS_PER_PUMP:
            span_start = self.state.tick
            gaps = np.full(n, self.intent_gap)
            rigs = np.full(n, self.intent_rig)
            try:
                out, audio = advance(self.state, gaps, rigs, self.table, self.seed)
            except (SimulationFault, DeviceFault) as exc:
                self.running = False
                frames.append({"type": "fault", "message": str(exc)})
                return frames
            self.recording.gaps.extend([self.intent_gap] * n)
            self.recording.rigidities.extend([self.intent_rig] * n)
            frames.append(self._frame(span_start, n, out, audio))
            spans += 1
        lag = (target - self.state.tick) / cfg.sensor_rate_hz
        if lag > LAG_NOTICE_S and now - self.last_notice > 1.0:
            self.last_notice = now
            frames.append({"type": "notice",
                           "message": f"simulation lagging wall clock by {lag:.2f} s"})
        return frames

    def _frame(self, span_start: int, n: int, out: dict,
               audio: np.ndarray) -> dict:
        cfg = self.cfg
        k = n - 1
        tick = span_start + k
        frame = {
            "type": "telemetry",
            "t": tick / cfg.sensor_rate_hz,
            "gap_mm": float(out["gap"][k]),
            "nearness_mm": float(out["near"][k]),
            "amplitude_mm": float(out["amp"][k]),
            "rigidity": float(out["rig"][k]),
            "coil_temp_c": float(out["temp"][k]),
            "center_freq_hz": float(out["fc"][k]),
            "bandwidth_hz": float(out["bw"][k]),
            "audio_rms": float(np.sqrt(np.mean(audio * audio))),
            "audio_seq": span_start * cfg.audio_per_tick,
        }
        spec = synth.spectrogram(audio, SPECTRO_WINDOW, SPECTRO_WINDOW // 2,
                                 cfg.audio_rate_hz)
        if spec.n_frames > 0:
            stats = synth.spectral_stats(spec, 0)
            if stats is not None:
                frame["centroid_hz"], frame["spread_hz"] = stats
        if cfg.stream_pcm:
            frame["pcm_f32_b64"] = base64.b64encode(
                audio.astype("<f4").tobytes()).decode("ascii")
        return frame


def _err(message: str) -> dict:
    return {"type": "error", "message": message}


def create_app(cfg: DeviceConfig | None = None,
               table: CalibrationTable | None = None,
               seed: int = 0) -> FastAPI:
    app = FastAPI(title="hapticloop live session")
    app.state.cfg = cfg or DeviceConfig()
    app.state.table = table
    app.state.seed = seed
    app.state.recordings = []

    @app.websocket("/ws")
    async def ws_session(websocket: WebSocket) -> None:
        await websocket.accept()
        sess = Session(app.state.cfg, app.state.table, app.state.seed,
                       app.state.recordings)
        await websocket.send_json(sess.status())
        try:
            while True:
                timeout = 0.001 if sess.running else 0.25
                try:
                    msg = await asyncio.wait_for(websocket.receive_json(), timeout)
                except asyncio.TimeoutError:
                    msg = None
                except ValueError:
                    msg = None
                    await websocket.send_json(_err("message is not valid JSON"))
                if msg is not None:
                    for reply in sess.handle(msg):
                        await websocket.send_json(reply)
                if sess.running:
                    for frame in sess.pump():
                        await websocket.send_json(frame)
        except WebSocketDisconnect:
            pass

    return app
