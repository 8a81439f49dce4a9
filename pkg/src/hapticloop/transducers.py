"""Proximity sensor and drive output stages.

Quantization, ranges and temperature compensation. Rounding is
half-to-even everywhere a value meets a grid, so the closed loop picks up
no directional bias from the converters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DeviceConfig
from .errors import ContractViolation, OverTemperatureError

# resistance reference temperature for the coil material law, degrees C
RESISTANCE_REF_C = 20.0


@dataclass
class ProximitySample:
    counts: int
    saturated: bool
    time_s: float


def sense_proximity(gap_mm: float, time_s: float, cfg: DeviceConfig,
                    dither: float = 0.0) -> ProximitySample:
    """Quantize a true gap to sensor counts.

    dither, when enabled in config, is a uniform value in [-0.5, 0.5)
    added in count units before rounding (supplied by the caller so the
    stream stays deterministic).
    """
    if gap_mm < 0.0:
        raise ContractViolation(f"gap must be >= 0, got {gap_mm}")
    x = gap_mm / cfg.sensor_resolution_mm
    if cfg.sensor_dither:
        x += dither
    counts = int(np.rint(x))
    counts = min(cfg.counts_max, max(0, counts))
    return ProximitySample(counts=counts, saturated=gap_mm > cfg.sensor_range_mm,
                           time_s=time_s)


def counts_to_mm(counts: int, cfg: DeviceConfig) -> float:
    if not (0 <= counts <= cfg.counts_max):
        raise ContractViolation(f"counts {counts} outside [0, {cfg.counts_max}]")
    return counts * cfg.sensor_resolution_mm


def coil_resistance(temp_c: float, cfg: DeviceConfig) -> float:
    """Relative resistance R/R20 of the coil at temp_c."""
    if not (-40.0 <= temp_c <= 150.0):
        raise ContractViolation(f"temperature {temp_c} outside modelled [-40, 150] C")
    return 1.0 + cfg.alpha_cu_per_c * (temp_c - RESISTANCE_REF_C)


def compensate_and_quantize(force_command: float, temp_c: float,
                            cfg: DeviceConfig) -> int:
    """Temperature-compensated drive quantization.

    Full scale is anchored at temp_max so compensation never needs more
    than 100% drive; a cold coil therefore uses fewer of the available
    steps for the same force range.
    """
    if not (0.0 <= force_command <= 1.0):
        raise ContractViolation(f"force_command must be in [0, 1], got {force_command}")
    if not (cfg.temp_min_c <= temp_c <= cfg.temp_max_c):
        raise OverTemperatureError(temp_c, cfg.temp_min_c, cfg.temp_max_c)
    raw = force_command * coil_resistance(temp_c, cfg) / coil_resistance(cfg.temp_max_c, cfg)
    return int(np.rint(raw * (cfg.output_steps - 1)))


def drive_steps_to_actuation(drive_steps: int, temp_c: float,
                             cfg: DeviceConfig) -> float:
    """Effective normalized drive the plant sees for a quantized command.

    Models the physical stage compensation corrects for: higher coil
    resistance passes proportionally less current, hence less force.
    """
    if not (0 <= drive_steps <= cfg.output_steps - 1):
        raise ContractViolation(
            f"drive_steps {drive_steps} outside [0, {cfg.output_steps - 1}]")
    frac = drive_steps / (cfg.output_steps - 1)
    return frac * coil_resistance(cfg.temp_max_c, cfg) / coil_resistance(temp_c, cfg)
