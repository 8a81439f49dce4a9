"""Noise-source audio mapping and spectral analysis.

Nearness drives the band center frequency, rigidity the bandwidth, both on
constant-ratio (exponential) scales. Rendering is deterministic from the
seed and the parameter sequence; any block can be regenerated from its
absolute sample index.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DeviceConfig
from .demux import ControlFrame
from .errors import ContractViolation
from . import kernels


@dataclass
class SynthParams:
    center_freq_hz: float
    bandwidth_hz: float


def map_controls(frame: ControlFrame, cfg: DeviceConfig) -> SynthParams:
    """Closer finger, higher pitch; more rigid finger, wider band.

    The rigidity slot may carry a raw amplitude when no calibration table
    was loaded; it is clamped into [0, 1] before mapping either way.
    """
    near = min(cfg.sensor_range_mm, max(0.0, frame.nearness_mm))
    fc = cfg.freq_lo_hz * (cfg.freq_hi_hz / cfg.freq_lo_hz) ** (1.0 - near / cfg.sensor_range_mm)
    fc = min(cfg.freq_hi_hz, max(cfg.freq_lo_hz, fc))
    r = min(1.0, max(0.0, frame.rigidity))
    bw = cfg.bw_lo_hz * (cfg.bw_hi_hz / cfg.bw_lo_hz) ** r
    bw = min(cfg.bw_hi_hz, max(cfg.bw_lo_hz, bw))
    if bw > fc:
        bw = fc  # keep the band physical: width never exceeds center
    return SynthParams(center_freq_hz=fc, bandwidth_hz=bw)


class NoiseRenderer:
    """Stateful renderer: counter-based white noise through a 2nd-order
    band-pass, unit peak gain, soft-clipped output in [-1, 1]."""

    def __init__(self, cfg: DeviceConfig, seed: int):
        self.cfg = cfg
        self._seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        self.sample_index = 0
        self._z1 = 0.0
        self._z2 = 0.0

    def render_block(self, params: SynthParams, n: int) -> np.ndarray:
        if n < 0:
            raise ContractViolation(f"sample count must be >= 0, got {n}")
        rate = self.cfg.audio_rate_hz
        bypass = params.bandwidth_hz >= 0.5 * rate
        if not bypass:
            if not (0.0 < params.center_freq_hz < 0.5 * rate):
                raise ContractViolation(
                    f"center_freq_hz {params.center_freq_hz} outside (0, {rate / 2})")
            if not (0.0 < params.bandwidth_hz <= params.center_freq_hz):
                raise ContractViolation(
                    f"bandwidth_hz {params.bandwidth_hz} outside "
                    f"(0, center_freq_hz]")
        block, self._z1, self._z2 = kernels.render_span(
            self._seed, self.sample_index, n,
            params.center_freq_hz, params.bandwidth_hz,
            float(rate), self.cfg.render_gain, self._z1, self._z2)
        self.sample_index += n
        return block


@dataclass
class Spectrogram:
    magnitudes: np.ndarray  # frames x bins, all >= 0
    hop_s: float
    bin_hz: float

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def frame_times(self) -> np.ndarray:
        return np.arange(self.n_frames) * self.hop_s

    def to_csv(self, path: str | Path) -> None:
        lines = [",".join(f"{v:.6g}" for v in row) for row in self.magnitudes]
        Path(path).write_text("\n".join(lines) + "\n")


def spectrogram(audio: np.ndarray, window: int, hop: int,
                rate_hz: float) -> Spectrogram:
    """Hann-weighted short-time magnitude transform.

    Audio shorter than one window yields an empty (0-frame) spectrogram.
    """
    if window < 2 or (window & (window - 1)) != 0:
        raise ContractViolation(f"window must be a power of two, got {window}")
    if not (1 <= hop <= window):
        raise ContractViolation(f"hop must be in [1, window], got {hop}")
    audio = np.asarray(audio, dtype=float)
    n = audio.shape[0]
    bins = window // 2 + 1
    if n < window:
        mags = np.zeros((0, bins))
    else:
        win = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(window) / window)
        starts = range(0, n - window + 1, hop)
        mags = np.empty((len(starts), bins))
        for i, s in enumerate(starts):
            mags[i] = np.abs(np.fft.rfft(audio[s:s + window] * win))
    return Spectrogram(magnitudes=mags, hop_s=hop / rate_hz, bin_hz=rate_hz / window)


def spectral_stats(spec: Spectrogram, frame: int) -> tuple[float, float] | None:
    """Power-weighted centroid and spread (Hz) of one frame.

    Returns None for an all-zero frame (stats undefined on silence).
    """
    if not (0 <= frame < spec.n_frames):
        raise ContractViolation(f"frame {frame} outside [0, {spec.n_frames})")
    power = spec.magnitudes[frame] ** 2
    total = power.sum()
    if total <= 0.0:
        return None
    freqs = np.arange(power.shape[0]) * spec.bin_hz
    centroid = float((freqs * power).sum() / total)
    spread = float(np.sqrt(((freqs - centroid) ** 2 * power).sum() / total))
    return centroid, spread


def write_wav(audio: np.ndarray, path: str | Path, rate_hz: int) -> None:
    """16-bit mono PCM; quantization is fixed so equal floats give equal bytes."""
    pcm = np.clip(np.rint(np.asarray(audio) * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(rate_hz)
        f.writeframes(pcm.tobytes())
