"""Breakpoint gesture scripts standing in for the human finger.

Format: plain text, `#` comments, data lines of
`time_s target_gap_mm rigidity_intent`, linear interpolation between
breakpoints, last value held after the final breakpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GestureError


@dataclass
class GestureScript:
    times_s: np.ndarray
    gaps_mm: np.ndarray
    rigidities: np.ndarray

    @property
    def duration_s(self) -> float:
        return float(self.times_s[-1])

    def sample(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Piecewise-linear gap and rigidity at times t (ends held)."""
        t = np.asarray(t, dtype=float)
        return (np.interp(t, self.times_s, self.gaps_mm),
                np.interp(t, self.times_s, self.rigidities))


def parse_gesture(text: str, sensor_range_mm: float = 17.0) -> GestureScript:
    times: list[float] = []
    gaps: list[float] = []
    rigs: list[float] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GestureError(
                f"expected 'time_s target_gap_mm rigidity_intent', got '{raw.strip()}'",
                line_no)
        try:
            t, gap, rig = (float(p) for p in parts)
        except ValueError:
            raise GestureError(f"non-numeric field in '{raw.strip()}'", line_no) from None
        if not times and t != 0.0:
            raise GestureError(f"first breakpoint must start at time 0, got {t}", line_no)
        if times and t <= times[-1]:
            raise GestureError(f"non-ascending time {t} (previous {times[-1]})", line_no)
        if not (0.0 <= gap <= sensor_range_mm):
            raise GestureError(f"target gap {gap} outside [0, {sensor_range_mm}]", line_no)
        if not (0.0 <= rig <= 1.0):
            raise GestureError(f"rigidity {rig} outside [0, 1]", line_no)
        times.append(t)
        gaps.append(gap)
        rigs.append(rig)
    if not times:
        raise GestureError("empty script: no data lines")
    return GestureScript(np.array(times), np.array(gaps), np.array(rigs))


def load_gesture(path: str | Path, sensor_range_mm: float = 17.0) -> GestureScript:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GestureError(f"cannot read gesture file {path}: {exc}") from exc
    return parse_gesture(text, sensor_range_mm)
