"""End-to-end conformance: one test per release criterion, each asserting
its stated tolerance and, where bounded, its runtime budget. pytest -v
prints one pass/fail line per criterion."""

import math
import time
from pathlib import Path

import numpy as np
import pytest
from starlette.testclient import TestClient

import hapticloop as hl
from hapticloop import cli, synth
from hapticloop import transducers as td
from hapticloop.latency import latency_report
from hapticloop.service import create_app

REPO = Path(__file__).resolve().parent.parent


def test_sensor_conformance(cfg):
    t0 = time.perf_counter()
    gaps = np.arange(0.0, 17.0001, 0.01)
    counts = np.array([td.sense_proximity(g, 0.0, cfg).counts for g in gaps])
    distinct = set(counts.tolist())
    assert distinct == set(range(86)), "expected exactly 86 proximity values"
    assert np.all(np.diff(counts) >= 0), "staircase must be monotone"
    assert time.perf_counter() - t0 < 1.0


def test_output_conformance(cfg):
    hot = cfg.temp_max_c
    steps = {td.compensate_and_quantize(k / 2194.0, hot, cfg) for k in range(2195)}
    assert len(steps) >= 2195, "need at least 2195 distinct drive steps"
    one_step = 1.0 / (cfg.output_steps - 1)
    for temp in (20.0, 60.0, 100.0):
        cmds = np.linspace(0.0, 1.0, 600)
        eff = np.array([td.drive_steps_to_actuation(
            td.compensate_and_quantize(c, temp, cfg), temp, cfg) for c in cmds])
        assert np.all(np.diff(eff) >= 0), "composed drive must be monotone"
        assert np.max(np.abs(eff - cmds)) <= one_step, \
            "composed drive must be linear within one step"


def test_temperature_flatness(cfg):
    one_step = 1.0 / (cfg.output_steps - 1)
    worst = 0.0
    for temp in np.arange(20.0, 100.01, 10.0):
        for cmd in np.arange(0.0, 1.001, 0.1):
            steps = td.compensate_and_quantize(float(cmd), float(temp), cfg)
            eff = td.drive_steps_to_actuation(steps, float(temp), cfg)
            worst = max(worst, abs(eff - cmd))
    assert worst <= one_step, f"flatness {worst:.3e} exceeds one step {one_step:.3e}"


def test_estimator_oracles(cfg):
    t0 = time.perf_counter()
    w = cfg.window_samples
    f, rate = cfg.wave_freq_hz, cfg.sensor_rate_hz
    bias, amp = 9.0, 0.5

    tracker = hl.demux.NearnessTracker(w)
    worst = 0.0
    for k in range(8 * w):
        out = tracker.update(bias + amp * math.sin(2 * math.pi * f * k / rate))
        if k >= w:
            worst = max(worst, abs(out - bias))
    assert worst < 1e-9, f"unquantized nearness error {worst:.2e}"

    tracker = hl.demux.NearnessTracker(w)
    res = cfg.sensor_resolution_mm
    worst = 0.0
    for k in range(8 * w):
        x = bias + amp * math.sin(2 * math.pi * f * k / rate)
        out = tracker.update(float(np.rint(x / res)) * res)
        if k >= w:
            worst = max(worst, abs(out - bias))
    assert worst <= 0.1, f"quantized nearness error {worst:.3f} mm"

    n5tau = int(5 * cfg.tau_amp_s * rate)
    est = hl.demux.AmplitudeTracker(1.0 / rate, cfg.tau_amp_s)
    want = amp / math.sqrt(2.0)
    for k in range(5 * n5tau):
        got = est.update(bias + amp * math.sin(2 * math.pi * f * k / rate), bias)
        if k >= n5tau:
            assert abs(got - want) / want <= 0.02, f"sine amplitude off at k={k}"

    est = hl.demux.AmplitudeTracker(1.0 / rate, cfg.tau_amp_s)
    for k in range(5 * n5tau):
        got = est.update(bias + (amp if (k // 4) % 2 == 0 else -amp), bias)
        if k >= n5tau:
            assert abs(got - amp) / amp <= 0.02, f"square amplitude off at k={k}"
    assert time.perf_counter() - t0 < 5.0


def test_rigidity_orthogonal_to_nearness(cfg):
    t0 = time.perf_counter()
    runner = hl.LoopSettleRunner(cfg, seed=0)
    table = hl.run_calibration(runner, cfg.calibration_grid())

    worst_dev, worst_track = 0.0, 0.0
    for rig in (0.0, 0.25, 0.5, 0.75, 1.0):
        gesture = hl.parse_gesture(f"0 16 {rig}\n20 2 {rig}\n")
        trace, _ = hl.run_scenario(cfg, gesture, table, seed=0)
        settled = trace.t >= 1.5
        r = trace.rigidity[settled]
        worst_dev = max(worst_dev, float(np.max(np.abs(r - r.mean()))))
        commanded = 16.0 + (2.0 - 16.0) * trace.t[settled] / 20.0
        worst_track = max(worst_track, float(
            np.max(np.abs(trace.nearness_mm[settled] - commanded))))
    elapsed = time.perf_counter() - t0
    assert worst_dev <= 0.08, f"rigidity deviation {worst_dev:.4f} during sweep"
    assert worst_track <= 0.3, f"nearness tracking error {worst_track:.3f} mm"
    assert elapsed < 60.0, f"orthogonality run took {elapsed:.1f} s"


def test_two_pulse_gesture_scenario(cfg, table):
    t0 = time.perf_counter()
    gesture = hl.load_gesture(REPO / "gestures" / "figure3.gesture")
    trace, audio = hl.run_scenario(cfg, gesture, table, seed=42)
    feats = hl.analyze_trace(trace, cfg)
    assert feats.peak_times_s.shape[0] == 2, \
        f"expected exactly 2 rigidity peaks, got {feats.peak_times_s.shape[0]}"
    assert np.all(feats.peak_heights > 0.6)
    assert feats.peak_times_s[1] - feats.peak_times_s[0] >= 1.0

    spec = synth.spectrogram(audio, 512, 256, cfg.audio_rate_hz)
    centers = spec.frame_times + 256.0 / cfg.audio_rate_hz
    spreads = np.array([(synth.spectral_stats(spec, i) or (0.0, np.nan))[1]
                        for i in range(spec.n_frames)])
    in_pulse = np.zeros(spec.n_frames, dtype=bool)
    near_pulse = np.zeros(spec.n_frames, dtype=bool)
    for c in (2.5, 4.0):
        in_pulse |= np.abs(centers - c) <= 0.35
        near_pulse |= np.abs(centers - c) <= 0.55
    quiet = (centers >= 0.5) & ~near_pulse
    pulse_med = float(np.nanmedian(spreads[in_pulse]))
    quiet_med = float(np.nanmedian(spreads[quiet]))
    assert pulse_med >= 1.5 * quiet_med, \
        f"pulse spread {pulse_med:.0f} Hz vs quiet {quiet_med:.0f} Hz"
    assert time.perf_counter() - t0 < 10.0


def test_latency_report_defaults(cfg):
    rep = latency_report(cfg)
    assert rep.audio_path_ms == pytest.approx(6.5)
    assert rep.tactile_path_ms == pytest.approx(7.5)
    assert rep.actuator_nyquist_hz == pytest.approx(100.0)
    verdicts = {c.name: c.passed for c in rep.constraints}
    assert verdicts["audio path latency"] is True      # 6.5 <= 10 ms
    assert verdicts["tactile path latency"] is False   # 7.5 > 2 ms
    assert verdicts["actuator Nyquist rate"] is False  # 100 < 250 Hz
    assert cli.main(["latency"]) != 0


def test_run_determinism(cfg, table, tmp_path):
    table_csv = tmp_path / "table.csv"
    table.to_csv(table_csv)
    outs = []
    for tag in ("a", "b"):
        trace = tmp_path / f"trace_{tag}.csv"
        wav = tmp_path / f"audio_{tag}.wav"
        rc = cli.main(["run",
                       "--gesture", str(REPO / "gestures" / "figure3.gesture"),
                       "--table", str(table_csv), "--seed", "42",
                       "--trace", str(trace), "--wav", str(wav)])
        assert rc == 0
        outs.append((trace.read_bytes(), wav.read_bytes()))
    assert outs[0][0] == outs[1][0], "trace CSVs differ between identical runs"
    assert outs[0][1] == outs[1][1], "WAVs differ between identical runs"


def test_service_replay_equivalence(cfg, table):
    app = create_app(cfg, table, seed=7)
    client = TestClient(app)
    frames = []
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "finger", "gap_mm": 13.0, "rigidity": 0.2})
        ws.send_json({"type": "start"})
        while ws.receive_json()["type"] != "started":
            pass
        t0 = time.monotonic()
        moved = False
        while time.monotonic() - t0 < 1.0:
            msg = ws.receive_json()
            if msg["type"] == "telemetry":
                frames.append(msg)
            if not moved and time.monotonic() - t0 > 0.4:
                ws.send_json({"type": "finger", "gap_mm": 5.0, "rigidity": 0.9})
                moved = True
        ws.send_json({"type": "stop"})
        while True:
            msg = ws.receive_json()
            if msg["type"] == "telemetry":
                frames.append(msg)
            elif msg["type"] == "stopped":
                break
    assert frames, "session produced no telemetry"

    rec = app.state.recordings[-1]
    trace, _ = hl.run_timeline(cfg, np.array(rec.gaps), np.array(rec.rigidities),
                               table, rec.seed, gap0_mm=rec.gap0_mm,
                               temp0_c=rec.temp0_c)
    for f in frames:
        k = round(f["t"] * cfg.sensor_rate_hz)
        assert f["nearness_mm"] == trace.nearness_mm[k]
        assert f["amplitude_mm"] == trace.amplitude_mm[k]
        assert f["rigidity"] == trace.rigidity[k]
        assert f["gap_mm"] == trace.gap_mm[k]
        assert f["center_freq_hz"] == trace.center_freq_hz[k]
        assert f["bandwidth_hz"] == trace.bandwidth_hz[k]
