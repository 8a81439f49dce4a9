"""Loop timing budget: worst-case path delays and the actuator Nyquist rate.

Audio path: one sensor frame of acquisition plus one audio block of
buffering. Tactile path: one sensor frame plus one actuator hold interval.
Verdicts compare against fixed perceptual budgets; the default device
fails the tactile budget and the Nyquist floor, which is the finding,
not a bug.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import DeviceConfig

AUDIO_BUDGET_MS = 10.0
TACTILE_BUDGET_MS = 2.0
NYQUIST_FLOOR_HZ = 250.0


@dataclass
class Constraint:
    name: str
    value: float
    limit: float
    unit: str
    kind: str  # "max" (value must be <= limit) or "min" (>= limit)

    @property
    def passed(self) -> bool:
        if self.kind == "max":
            return self.value <= self.limit
        return self.value >= self.limit

    def line(self) -> str:
        rel = "<=" if self.kind == "max" else ">="
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}  {self.name}: {self.value:.3f} {self.unit} "
                f"(required {rel} {self.limit:g} {self.unit})")


@dataclass
class LatencyReport:
    audio_path_ms: float
    tactile_path_ms: float
    actuator_nyquist_hz: float
    constraints: list[Constraint]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.constraints)

    def format_report(self) -> str:
        lines = [c.line() for c in self.constraints]
        lines.append("overall: " + ("PASS" if self.all_pass else "FAIL"))
        return "\n".join(lines)


def latency_report(cfg: DeviceConfig) -> LatencyReport:
    sensor_frame_ms = 1000.0 / cfg.sensor_rate_hz
    audio_block_ms = 1000.0 * cfg.audio_block_samples / cfg.audio_rate_hz
    actuator_hold_ms = 1000.0 / cfg.output_rate_hz
    audio_ms = sensor_frame_ms + audio_block_ms
    tactile_ms = sensor_frame_ms + actuator_hold_ms
    nyquist = cfg.output_rate_hz / 2.0
    constraints = [
        Constraint("audio path latency", audio_ms, AUDIO_BUDGET_MS, "ms", "max"),
        Constraint("tactile path latency", tactile_ms, TACTILE_BUDGET_MS, "ms", "max"),
        Constraint("actuator Nyquist rate", nyquist, NYQUIST_FLOOR_HZ, "Hz", "min"),
    ]
    return LatencyReport(audio_ms, tactile_ms, nyquist, constraints)
