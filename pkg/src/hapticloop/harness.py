"""Multirate loop engine: plant + transducers + demux + synth, scheduled.

Physics substeps run inside sensor ticks; the actuator holds its last
value between its own (slower) updates; audio renders per sensor tick with
parameters held across the tick. One resumable state object serves both
batch runs and the live service, which is what makes a live session
replayable through the batch path bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.signal

from . import kernels
from .config import DeviceConfig
from .demux import CalibrationTable
from .errors import (CalibrationError, ConfigError, InsufficientDataError,
                     OverTemperatureError, SimulationFault)
from .gesture import GestureScript

TRACE_HEADER = ("t,gap_mm,counts,nearness_mm,amplitude_mm,rigidity,"
                "drive_steps,coil_temp_c,center_freq_hz,bandwidth_hz")

_EMPTY = np.zeros(0)


@dataclass
class Trace:
    t: np.ndarray
    gap_mm: np.ndarray
    counts: np.ndarray
    nearness_mm: np.ndarray
    amplitude_mm: np.ndarray
    rigidity: np.ndarray
    drive_steps: np.ndarray
    coil_temp_c: np.ndarray
    center_freq_hz: np.ndarray
    bandwidth_hz: np.ndarray
    warmup_samples: int = 0
    rigidity_is_amplitude: bool = False

    @property
    def n_rows(self) -> int:
        return self.t.shape[0]

    def to_csv(self, path: str | Path) -> None:
        lines = [TRACE_HEADER]
        for i in range(self.n_rows):
            lines.append(
                f"{self.t[i]:.6g},{self.gap_mm[i]:.6g},{int(self.counts[i])},"
                f"{self.nearness_mm[i]:.6g},{self.amplitude_mm[i]:.6g},"
                f"{self.rigidity[i]:.6g},{int(self.drive_steps[i])},"
                f"{self.coil_temp_c[i]:.6g},{self.center_freq_hz[i]:.6g},"
                f"{self.bandwidth_hz[i]:.6g}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path, cfg: DeviceConfig | None = None) -> "Trace":
        cfg = cfg or DeviceConfig()
        lines = Path(path).read_text().strip().splitlines()
        if not lines or lines[0].strip() != TRACE_HEADER:
            raise InsufficientDataError(f"{path}: not a trace file (bad header)")
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]) \
            if len(lines) > 1 else np.zeros((0, 10))
        if data.size and data.shape[1] != 10:
            raise InsufficientDataError(f"{path}: expected 10 columns")
        cols = [data[:, i] if data.size else _EMPTY.copy() for i in range(10)]
        rows = cols[0].shape[0]
        return cls(cols[0], cols[1], cols[2].astype(np.int64), cols[3], cols[4],
                   cols[5], cols[6].astype(np.int64), cols[7], cols[8], cols[9],
                   warmup_samples=min(cfg.window_samples, rows))


class LoopState:
    """Resumable engine state; `tick` is the absolute sensor frame index."""

    def __init__(self, cfg: DeviceConfig, gap0_mm: float, temp0_c: float | None = None):
        self.cfg = cfg
        temp0 = cfg.ambient_c if temp0_c is None else temp0_c
        self.s_f, self.s_i, self.ring = kernels.make_state(
            gap0_mm, temp0, cfg.window_samples)
        self.tick = 0


def _table_arrays(table: CalibrationTable | None):
    if table is None:
        return 0, _EMPTY, _EMPTY, _EMPTY
    return 1, table.nearness_mm, table.a_rigid_mm, table.a_loose_mm


def advance(state: LoopState, gap_cmd: np.ndarray, rig_cmd: np.ndarray,
            table: CalibrationTable | None, seed: int,
            emit_final: bool = False) -> tuple[dict, np.ndarray]:
    """Advance len(gap_cmd) sensor frames from the current state.

    Returns (columns, audio): one output row per frame (plus the final
    settle row when emit_final), audio at audio_per_tick samples per frame.
    Raises SimulationFault / OverTemperatureError on kernel faults.
    """
    cfg = state.cfg
    n = gap_cmd.shape[0]
    rows = n + 1 if emit_final else n
    has_table, tab_n, tab_r, tab_l = _table_arrays(table)
    out = {name: np.empty(rows) for name in
           ("gap", "near", "amp", "rig", "temp", "fc", "bw")}
    out_counts = np.empty(rows, dtype=np.int64)
    out_steps = np.empty(rows, dtype=np.int64)
    audio = np.empty(n * cfg.audio_per_tick)
    a_alpha = 1.0 - math.exp(-(1.0 / cfg.sensor_rate_hz) / cfg.tau_amp_s)

    fault, fault_tick = kernels.run_span(
        state.tick, n, 1 if emit_final else 0,
        np.ascontiguousarray(gap_cmd, dtype=float),
        np.ascontiguousarray(rig_cmd, dtype=float),
        has_table, tab_n, tab_r, tab_l,
        cfg.physics_dt_s, cfg.substeps_per_tick, cfg.actuator_substeps,
        cfg.audio_per_tick,
        cfg.sensor_resolution_mm, cfg.counts_max,
        1 if cfg.sensor_dither else 0, a_alpha,
        cfg.mass_kg, cfg.k_min_n_per_m, cfg.k_max_n_per_m,
        cfg.c_min_ns_per_m, cfg.c_max_ns_per_m,
        cfg.force_gain_n_mm2, cfg.force_offset_mm,
        cfg.wave_freq_hz, cfg.wave_amp, cfg.wave_bias,
        float(cfg.output_steps - 1), cfg.alpha_cu_per_c,
        cfg.temp_min_c, cfg.temp_max_c,
        cfg.ambient_c, cfg.thermal_tau_s, cfg.thermal_res_c_per_w,
        cfg.coil_power_max_w,
        cfg.freq_lo_hz, cfg.freq_hi_hz, cfg.bw_lo_hz, cfg.bw_hi_hz,
        cfg.render_gain, float(cfg.audio_rate_hz), cfg.sensor_range_mm,
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        state.s_f, state.s_i, state.ring,
        out["gap"], out_counts, out["near"], out["amp"], out["rig"],
        out_steps, out["temp"], out["fc"], out["bw"], audio)

    if fault == kernels.FAULT_NUMERIC:
        raise SimulationFault("plant state is not finite",
                              fault_tick / cfg.sensor_rate_hz)
    if fault == kernels.FAULT_OVERTEMP:
        raise OverTemperatureError(state.s_f[kernels.SF_TEMP],
                                   cfg.temp_min_c, cfg.temp_max_c,
                                   fault_tick / cfg.sensor_rate_hz)
    state.tick += n
    out["counts"] = out_counts
    out["steps"] = out_steps
    return out, audio


def run_timeline(cfg: DeviceConfig, gap_cmd: np.ndarray, rig_cmd: np.ndarray,
                 table: CalibrationTable | None, seed: int,
                 gap0_mm: float | None = None,
                 temp0_c: float | None = None) -> tuple[Trace, np.ndarray]:
    """Batch-run a per-tick intent timeline from a fresh loop state."""
    gap_cmd = np.asarray(gap_cmd, dtype=float)
    rig_cmd = np.asarray(rig_cmd, dtype=float)
    if gap_cmd.shape != rig_cmd.shape or gap_cmd.ndim != 1:
        raise ConfigError("gap and rigidity timelines must be equal-length 1-D arrays")
    n = gap_cmd.shape[0]
    if n == 0:
        return _empty_trace(table), np.zeros(0)
    gap0 = float(gap_cmd[0]) if gap0_mm is None else gap0_mm
    state = LoopState(cfg, gap0, temp0_c)
    out, audio = advance(state, gap_cmd, rig_cmd, table, seed, emit_final=True)
    rows = n + 1
    t = np.arange(rows) / cfg.sensor_rate_hz
    return Trace(t, out["gap"], out["counts"], out["near"], out["amp"],
                 out["rig"], out["steps"], out["temp"], out["fc"], out["bw"],
                 warmup_samples=min(cfg.window_samples, rows),
                 rigidity_is_amplitude=table is None), audio


def run_scenario(cfg: DeviceConfig, gesture: GestureScript,
                 table: CalibrationTable | None, seed: int,
                 ) -> tuple[Trace, np.ndarray]:
    """Run a scripted gesture; deterministic from (config, gesture, seed).

    The trace has floor(duration * sensor_rate) + 1 rows (0 for an empty
    gesture); audio covers exactly duration * audio_rate samples.
    """
    if table is not None:
        table.validate()
    n_ticks = int(math.floor(gesture.duration_s * cfg.sensor_rate_hz + 1e-9))
    if n_ticks == 0:
        return _empty_trace(table), np.zeros(0)
    t_ticks = np.arange(n_ticks) / cfg.sensor_rate_hz
    gap_cmd, rig_cmd = gesture.sample(t_ticks)
    return run_timeline(cfg, gap_cmd, rig_cmd, table, seed)


def _empty_trace(table: CalibrationTable | None) -> Trace:
    e = _EMPTY.copy()
    return Trace(e, e.copy(), np.zeros(0, dtype=np.int64), e.copy(), e.copy(),
                 e.copy(), np.zeros(0, dtype=np.int64), e.copy(), e.copy(),
                 e.copy(), warmup_samples=0,
                 rigidity_is_amplitude=table is None)


class LoopSettleRunner:
    """Holds one intent until the amplitude estimate stops moving.

    Fresh loop state per point (cold start at the target, coil at ambient);
    the estimate is considered settled when it changes by less than
    settle_rel_tol between checks settle_check_s apart, first comparison
    after two check intervals.
    """

    def __init__(self, cfg: DeviceConfig, seed: int = 0):
        self.cfg = cfg
        self.seed = seed

    def settle_point(self, target_gap_mm: float, rigidity: float) -> tuple[float, float]:
        cfg = self.cfg
        chunk = int(round(cfg.settle_check_s * cfg.sensor_rate_hz))
        max_chunks = int(math.ceil(cfg.settle_max_s / cfg.settle_check_s))
        state = LoopState(cfg, target_gap_mm)
        gaps = np.full(chunk, target_gap_mm)
        rigs = np.full(chunk, rigidity)
        prev_amp = None
        for _ in range(max_chunks):
            out, _ = advance(state, gaps, rigs, None, self.seed)
            near_end = out["near"][-1]
            amp_end = out["amp"][-1]
            if prev_amp is not None and prev_amp > 0.0:
                if abs(amp_end - prev_amp) / prev_amp < cfg.settle_rel_tol:
                    return float(near_end), float(amp_end)
            prev_amp = amp_end
        raise CalibrationError(
            f"amplitude did not settle at grid point {target_gap_mm:g} mm "
            f"(rigidity {rigidity:g}) within {cfg.settle_max_s:g} s")


@dataclass
class TraceFeatures:
    peak_times_s: np.ndarray
    peak_heights: np.ndarray
    nearness_freq_correlation: float
    peak_threshold: float = 0.6
    peak_min_separation_s: float = 0.5

    def summary(self) -> str:
        lines = [f"rigidity peaks (> {self.peak_threshold:g}, "
                 f">= {self.peak_min_separation_s:g} s apart): {self.peak_times_s.shape[0]}"]
        for t, h in zip(self.peak_times_s, self.peak_heights):
            lines.append(f"  t = {t:.3f} s  height = {h:.3f}")
        lines.append("nearness vs log center-frequency correlation: "
                     f"{self.nearness_freq_correlation:+.6f}")
        return "\n".join(lines)


def analyze_trace(trace: Trace, cfg: DeviceConfig | None = None) -> TraceFeatures:
    """Rigidity peak list plus the nearness-to-pitch sweep correlation,
    computed on the post-warm-up region."""
    cfg = cfg or DeviceConfig()
    w = trace.warmup_samples
    if trace.n_rows <= w:
        raise InsufficientDataError(
            f"trace has {trace.n_rows} rows, needs more than the "
            f"{w}-sample warm-up")
    rig = trace.rigidity[w:]
    distance = max(1, int(round(0.5 * cfg.sensor_rate_hz)))
    idx, props = scipy.signal.find_peaks(rig, height=0.6, distance=distance)
    near = trace.nearness_mm[w:]
    logf = np.log(trace.center_freq_hz[w:])
    sx = near.std()
    sy = logf.std()
    # ptp is exact on constant input; std picks up mean-rounding noise
    if np.ptp(near) == 0.0 or np.ptp(logf) == 0.0 or sx == 0.0 or sy == 0.0:
        corr = float("nan")
    else:
        corr = float(((near - near.mean()) * (logf - logf.mean())).mean() / (sx * sy))
    return TraceFeatures(peak_times_s=trace.t[w + idx],
                         peak_heights=props["peak_heights"],
                         nearness_freq_correlation=corr)
