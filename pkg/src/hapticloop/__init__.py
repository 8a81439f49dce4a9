"""Deterministic simulator of a single-coil tactile I/O loop.

The device senses finger proximity, drives the same fingertip with a
vibration wave, and recovers two control signals from what comes back:
how near the finger is and how rigidly it is held. Those two signals
steer a band-filtered noise voice. Everything here is reproducible from
(config, gesture, seed).
"""

from .config import DeviceConfig
from .demux import (CalibrationTable, ControlFrame, DemuxState,
                    run_calibration)
from .errors import (CalibrationError, ConfigError, ContractViolation,
                     DegenerateTableError, DeviceFault, GestureError,
                     InsufficientDataError, OverTemperatureError,
                     SimulationFault)
from .gesture import GestureScript, load_gesture, parse_gesture
from .harness import (LoopSettleRunner, LoopState, Trace, TraceFeatures,
                      advance, analyze_trace, run_scenario, run_timeline)
from .latency import LatencyReport, latency_report
from .plant import FingerIntent, PlantState
from .synth import (NoiseRenderer, Spectrogram, SynthParams, map_controls,
                    spectral_stats, spectrogram, write_wav)

__version__ = "0.1.0"

__all__ = [
    "DeviceConfig",
    "CalibrationTable", "ControlFrame", "DemuxState", "run_calibration",
    "CalibrationError", "ConfigError", "ContractViolation",
    "DegenerateTableError", "DeviceFault", "GestureError",
    "InsufficientDataError", "OverTemperatureError", "SimulationFault",
    "GestureScript", "load_gesture", "parse_gesture",
    "LoopSettleRunner", "LoopState", "Trace", "TraceFeatures",
    "advance", "analyze_trace", "run_scenario", "run_timeline",
    "LatencyReport", "latency_report",
    "FingerIntent", "PlantState",
    "NoiseRenderer", "Spectrogram", "SynthParams", "map_controls",
    "spectral_stats", "spectrogram", "write_wav",
    "__version__",
]
