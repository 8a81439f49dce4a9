"""Device configuration: every tunable in one dataclass.

All numbers that shape the simulation live here so a run is reproducible from
(config, gesture, seed) alone. Loadable from a plain key=value text file;
every field optional, unknown keys rejected.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError


@dataclass
class DeviceConfig:
    # proximity sensor stage
    sensor_resolution_mm: float = 0.2
    sensor_range_mm: float = 17.0
    sensor_rate_hz: int = 400
    sensor_dither: bool = False  # uniform +-0.5 count dither, off by default

    # drive output stage
    output_rate_hz: int = 200
    output_steps: int = 2195
    temp_min_c: float = 20.0
    temp_max_c: float = 100.0
    alpha_cu_per_c: float = 0.00393

    # finger / keystone plant
    mass_kg: float = 0.0032
    k_min_n_per_m: float = 350.0
    k_max_n_per_m: float = 450.0
    c_min_ns_per_m: float = 0.15
    c_max_ns_per_m: float = 0.33
    force_gain_n_mm2: float = 1800.0
    force_offset_mm: float = 60.0

    # coil thermal model
    ambient_c: float = 20.0
    thermal_tau_s: float = 60.0
    thermal_res_c_per_w: float = 40.0
    coil_power_max_w: float = 2.5

    # fixed tactile wave
    wave_freq_hz: float = 48.0
    wave_amp: float = 0.35
    wave_bias: float = 0.1

    # demultiplexer
    window_cycles: int = 6
    tau_amp_s: float = 0.2

    # calibration procedure
    calib_gap_min_mm: float = 2.0
    calib_gap_max_mm: float = 16.0
    calib_points: int = 8
    settle_check_s: float = 0.5
    settle_rel_tol: float = 0.01
    settle_max_s: float = 10.0

    # audio synth
    audio_rate_hz: int = 16000
    freq_lo_hz: float = 200.0
    freq_hi_hz: float = 4000.0
    bw_lo_hz: float = 30.0
    bw_hi_hz: float = 1000.0
    render_gain: float = 2.0
    audio_block_samples: int = 64
    noise_algorithm: str = "splitmix64"

    # loop scheduling
    physics_rate_hz: int = 8000

    # service
    telemetry_hz: float = 30.0
    stream_pcm: bool = False

    def __post_init__(self) -> None:
        self.validate()

    # -- derived quantities ------------------------------------------------

    @property
    def physics_dt_s(self) -> float:
        return 1.0 / self.physics_rate_hz

    @property
    def substeps_per_tick(self) -> int:
        """Physics steps per sensor tick."""
        return self.physics_rate_hz // self.sensor_rate_hz

    @property
    def actuator_substeps(self) -> int:
        """Physics steps per actuator update (zero-order hold span)."""
        return self.physics_rate_hz // self.output_rate_hz

    @property
    def audio_per_tick(self) -> int:
        return self.audio_rate_hz // self.sensor_rate_hz

    @property
    def counts_max(self) -> int:
        return int(round(self.sensor_range_mm / self.sensor_resolution_mm))

    @property
    def window_samples(self) -> int:
        """Nearness window: window_cycles whole wave cycles, in sensor ticks."""
        return int(round(self.window_cycles * self.sensor_rate_hz / self.wave_freq_hz))

    @property
    def telemetry_decimation(self) -> int:
        return max(1, int(round(self.sensor_rate_hz / self.telemetry_hz)))

    def calibration_grid(self, points: int | None = None) -> np.ndarray:
        n = self.calib_points if points is None else points
        if n < 2:
            raise ConfigError("calibration grid needs at least 2 points")
        return np.linspace(self.calib_gap_min_mm, self.calib_gap_max_mm, n)

    # -- validation ----------------------------------------------------------

    def validate(self) -> None:
        if self.sensor_resolution_mm <= 0 or self.sensor_range_mm <= 0:
            raise ConfigError("sensor resolution and range must be positive")
        steps = self.sensor_range_mm / self.sensor_resolution_mm
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigError(
                f"sensor_range_mm must be an integer multiple of sensor_resolution_mm "
                f"(got {self.sensor_range_mm}/{self.sensor_resolution_mm})")
        for name in ("sensor_rate_hz", "output_rate_hz", "physics_rate_hz", "audio_rate_hz"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.physics_rate_hz % self.sensor_rate_hz:
            raise ConfigError("physics_rate_hz must be an integer multiple of sensor_rate_hz")
        if self.physics_rate_hz % self.output_rate_hz:
            raise ConfigError("physics_rate_hz must be an integer multiple of output_rate_hz")
        if self.audio_rate_hz % self.sensor_rate_hz:
            raise ConfigError("audio_rate_hz must be an integer multiple of sensor_rate_hz")
        if self.output_steps < 2195:
            raise ConfigError("output_steps must be at least 2195")
        if not (self.temp_min_c < self.temp_max_c):
            raise ConfigError("temp_min_c must be below temp_max_c")
        if self.mass_kg <= 0 or self.force_gain_n_mm2 <= 0 or self.force_offset_mm <= 0:
            raise ConfigError("mass, force gain and force offset must be positive")
        if not (0 < self.k_min_n_per_m < self.k_max_n_per_m):
            raise ConfigError("need 0 < k_min < k_max")
        if not (0 < self.c_min_ns_per_m < self.c_max_ns_per_m):
            raise ConfigError("need 0 < c_min < c_max")
        # semi-implicit Euler keeps the stiffest spring well inside stability
        w_dt = math.sqrt(self.k_max_n_per_m / self.mass_kg) / self.physics_rate_hz
        if w_dt > 0.5:
            raise ConfigError(
                f"physics_rate_hz too low for k_max/mass (w*dt={w_dt:.3f}, limit 0.5)")
        if self.wave_freq_hz <= 0 or self.wave_freq_hz >= self.output_rate_hz / 2:
            raise ConfigError("wave_freq_hz must sit below the actuator Nyquist rate")
        w_exact = self.window_cycles * self.sensor_rate_hz / self.wave_freq_hz
        if abs(w_exact - round(w_exact)) > 1e-6:
            raise ConfigError(
                f"window_cycles*sensor_rate_hz/wave_freq_hz must be a whole number of "
                f"samples (got {w_exact:.6f}); pick commensurate wave and window")
        if self.tau_amp_s <= 0:
            raise ConfigError("tau_amp_s must be positive")
        if not (0 < self.calib_gap_min_mm < self.calib_gap_max_mm <= self.sensor_range_mm):
            raise ConfigError("calibration gap range must be ascending and within sensor range")
        if not (0 < self.freq_lo_hz < self.freq_hi_hz < self.audio_rate_hz / 2):
            raise ConfigError("need 0 < freq_lo < freq_hi < audio Nyquist")
        if not (0 < self.bw_lo_hz < self.bw_hi_hz):
            raise ConfigError("need 0 < bw_lo < bw_hi")
        if self.audio_block_samples <= 0:
            raise ConfigError("audio_block_samples must be positive")
        if self.noise_algorithm != "splitmix64":
            raise ConfigError(f"unknown noise_algorithm '{self.noise_algorithm}'")
        if self.telemetry_hz <= 0:
            raise ConfigError("telemetry_hz must be positive")

    # -- key=value file IO -----------------------------------------------

    @classmethod
    def load(cls, path: str | Path) -> "DeviceConfig":
        text = Path(path).read_text()
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "DeviceConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        values: dict[str, object] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{line_no}: expected key=value, got '{raw.strip()}'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in fields:
                raise ConfigError(f"{source}:{line_no}: unknown key '{key}'")
            values[key] = _parse_value(fields[key].type, key, val, source, line_no)
        try:
            return cls(**values)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from exc

    def save(self, path: str | Path) -> None:
        lines = [f"{f.name} = {_format_value(getattr(self, f.name))}"
                 for f in dataclasses.fields(self)]
        Path(path).write_text("\n".join(lines) + "\n")

    def replace(self, **changes) -> "DeviceConfig":
        return dataclasses.replace(self, **changes)


def _parse_value(ftype: object, key: str, val: str, source: str, line_no: int):
    tname = ftype if isinstance(ftype, str) else getattr(ftype, "__name__", str(ftype))
    try:
        if tname == "bool":
            low = val.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: '{val}'")
        if tname == "int":
            return int(val)
        if tname == "float":
            return float(val)
        return val
    except ValueError as exc:
        raise ConfigError(f"{source}:{line_no}: bad value for {key}: {exc}") from exc


def _format_value(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)
