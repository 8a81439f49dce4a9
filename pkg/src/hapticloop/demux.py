"""Nearness/rigidity demultiplexer.

One proximity stream carries two control signals: the slow finger position
(nearness, recovered by averaging whole vibration cycles away) and the
finger's mechanical give (rigidity, recovered by normalizing the tracked
vibration amplitude between calibrated rigid and loose references).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from .config import DeviceConfig
from .errors import (CalibrationError, ContractViolation, DegenerateTableError)
from .transducers import ProximitySample, counts_to_mm

# below this rigid/loose separation (mm) normalization is meaningless
MIN_REFERENCE_SEPARATION_MM = 1e-6


@dataclass
class ControlFrame:
    time_s: float
    nearness_mm: float
    amplitude_mm: float
    rigidity: float


class NearnessTracker:
    """Windowed mean over the last W samples; W spans whole wave cycles so
    the vibration integrates to zero. During warm-up, mean of what arrived."""

    def __init__(self, window_samples: int):
        if window_samples < 1:
            raise ContractViolation(f"window must be >= 1, got {window_samples}")
        self._ring = np.zeros(window_samples)
        self._count = 0
        self._pos = 0
        self._sum = 0.0

    def update(self, sample_mm: float) -> float:
        w = self._ring.shape[0]
        if self._count < w:
            self._ring[self._pos] = sample_mm
            self._sum += sample_mm
            self._count += 1
        else:
            self._sum += sample_mm - self._ring[self._pos]
            self._ring[self._pos] = sample_mm
        self._pos = (self._pos + 1) % w
        return self._sum / self._count


class AmplitudeTracker:
    """RMS deviation from nearness via an exponential average of squared
    deviation, startup bias removed so early frames read true."""

    def __init__(self, sample_period_s: float, tau_s: float):
        if sample_period_s <= 0 or tau_s <= 0:
            raise ContractViolation("sample period and tau must be positive")
        self._alpha = 1.0 - math.exp(-sample_period_s / tau_s)
        self._ema = 0.0
        self._n = 0

    def update(self, sample_mm: float, nearness_mm: float) -> float:
        dev = sample_mm - nearness_mm
        self._ema += self._alpha * (dev * dev - self._ema)
        self._n += 1
        corr = 1.0 - (1.0 - self._alpha) ** self._n
        return math.sqrt(self._ema / corr)


@dataclass
class CalibrationTable:
    nearness_mm: np.ndarray
    a_rigid_mm: np.ndarray
    a_loose_mm: np.ndarray

    def __post_init__(self):
        self.nearness_mm = np.asarray(self.nearness_mm, dtype=float)
        self.a_rigid_mm = np.asarray(self.a_rigid_mm, dtype=float)
        self.a_loose_mm = np.asarray(self.a_loose_mm, dtype=float)
        self.validate()

    def validate(self) -> None:
        n = self.nearness_mm.shape[0]
        if n < 2:
            raise CalibrationError("calibration table needs at least 2 points")
        if self.a_rigid_mm.shape[0] != n or self.a_loose_mm.shape[0] != n:
            raise CalibrationError("calibration table columns differ in length")
        if not np.all(np.diff(self.nearness_mm) > 0):
            raise CalibrationError("calibration grid must be strictly ascending")
        if np.any(self.a_rigid_mm < 0) or np.any(self.a_loose_mm < 0):
            raise CalibrationError("calibration amplitudes must be >= 0")
        bad = np.nonzero(self.a_rigid_mm >= self.a_loose_mm)[0]
        if bad.size:
            i = int(bad[0])
            raise CalibrationError(
                f"rigid amplitude >= loose amplitude at {self.nearness_mm[i]:.3f} mm; "
                "a braced finger must vibrate less than a loose one")

    def to_csv(self, path: str | Path) -> None:
        lines = ["nearness_mm,a_rigid_mm,a_loose_mm"]
        for n, r, l in zip(self.nearness_mm, self.a_rigid_mm, self.a_loose_mm):
            lines.append(f"{n:.6f},{r:.6f},{l:.6f}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "CalibrationTable":
        lines = Path(path).read_text().strip().splitlines()
        if not lines or lines[0].strip() != "nearness_mm,a_rigid_mm,a_loose_mm":
            raise CalibrationError(f"{path}: missing calibration table header")
        rows = []
        for i, line in enumerate(lines[1:], start=2):
            parts = line.strip().split(",")
            if len(parts) != 3:
                raise CalibrationError(f"{path}:{i}: expected 3 columns")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise CalibrationError(f"{path}:{i}: {exc}") from exc
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])


def interpolate_bounds(table: CalibrationTable, nearness_mm: float) -> tuple[float, float]:
    """(a_rigid, a_loose) at a nearness, linear between knots, clamped outside."""
    a_r = float(np.interp(nearness_mm, table.nearness_mm, table.a_rigid_mm))
    a_l = float(np.interp(nearness_mm, table.nearness_mm, table.a_loose_mm))
    return a_r, a_l


def compute_rigidity(amplitude_mm: float, nearness_mm: float,
                     table: CalibrationTable) -> float:
    a_r, a_l = interpolate_bounds(table, nearness_mm)
    span = a_l - a_r
    if span < MIN_REFERENCE_SEPARATION_MM:
        raise DegenerateTableError(
            f"rigid/loose references separated by only {span:.3g} mm "
            f"at nearness {nearness_mm:.3f} mm")
    r = (a_l - amplitude_mm) / span
    return min(1.0, max(0.0, r))


class DemuxState:
    """Streaming state: one tracker pair fed one sample per sensor tick."""

    def __init__(self, cfg: DeviceConfig):
        self.cfg = cfg
        self.nearness = NearnessTracker(cfg.window_samples)
        self.amplitude = AmplitudeTracker(1.0 / cfg.sensor_rate_hz, cfg.tau_amp_s)


def process_sample(state: DemuxState, sample: ProximitySample,
                   table: CalibrationTable | None) -> ControlFrame:
    """counts -> mm -> nearness -> amplitude -> rigidity, one frame per tick.

    Without a table the rigidity slot carries the raw amplitude estimate.
    """
    mm = counts_to_mm(sample.counts, state.cfg)
    near = state.nearness.update(mm)
    amp = state.amplitude.update(mm, near)
    rig = compute_rigidity(amp, near, table) if table is not None else amp
    return ControlFrame(time_s=sample.time_s, nearness_mm=near,
                        amplitude_mm=amp, rigidity=rig)


class SettleRunner(Protocol):
    """Anything that can hold an intent until the loop settles and report
    the settled (nearness, amplitude) estimates."""

    def settle_point(self, target_gap_mm: float, rigidity: float) -> tuple[float, float]:
        ...


def run_calibration(runner: SettleRunner, grid: np.ndarray) -> CalibrationTable:
    """Measure rigid and loose amplitude references across the grid.

    Settles the loop at every grid point at rigidity 1 then 0, then resamples
    the measured (nearness, amplitude) curves onto the commanded grid so the
    table knots are the grid values themselves.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.shape[0] < 2:
        raise CalibrationError("at least 2 grid points required for interpolation")
    if not np.all(np.diff(grid) > 0):
        raise CalibrationError("calibration grid must be strictly ascending")

    near_r, amp_r, near_l, amp_l = [], [], [], []
    for g in grid:
        n1, a1 = runner.settle_point(float(g), 1.0)
        n0, a0 = runner.settle_point(float(g), 0.0)
        near_r.append(n1)
        amp_r.append(a1)
        near_l.append(n0)
        amp_l.append(a0)

    for name, xs in (("rigid", near_r), ("loose", near_l)):
        if not np.all(np.diff(xs) > 0):
            raise CalibrationError(
                f"measured nearness not strictly ascending across the grid "
                f"({name} pass); loop is not tracking the commanded points")
    a_rigid = np.interp(grid, near_r, amp_r)
    a_loose = np.interp(grid, near_l, amp_l)
    return CalibrationTable(grid, a_rigid, a_loose)
