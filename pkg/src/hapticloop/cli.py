"""Command-line entry points.

Exit codes: 0 success, 1 a checked constraint failed (latency budget,
calibration could not settle), 2 bad usage or malformed input, 3 the
simulation itself faulted (numeric blow-up, coil over-temperature).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import DeviceConfig
from .demux import CalibrationTable, run_calibration
from .errors import (CalibrationError, ConfigError, ContractViolation,
                     DeviceFault, GestureError, InsufficientDataError,
                     SimulationFault)
from .gesture import load_gesture
from .harness import LoopSettleRunner, Trace, analyze_trace, run_scenario
from .latency import latency_report
from .synth import spectrogram, write_wav

EXIT_OK = 0
EXIT_CONSTRAINT = 1
EXIT_USAGE = 2
EXIT_FAULT = 3


def _load_config(path: str | None) -> DeviceConfig:
    if path is None:
        return DeviceConfig()
    if not Path(path).exists():
        raise ConfigError(f"config file not found: {path}")
    return DeviceConfig.load(path)


def _load_table(path: str | None) -> CalibrationTable | None:
    if path is None:
        return None
    if not Path(path).exists():
        raise ConfigError(f"calibration table not found: {path}")
    try:
        return CalibrationTable.from_csv(path)
    except CalibrationError as exc:
        # a table that fails to parse or validate is bad input, not a
        # constraint the loop violated
        raise ConfigError(f"bad calibration table: {exc}") from exc


def cmd_calibrate(args) -> int:
    cfg = _load_config(args.config)
    points = args.points if args.points is not None else cfg.calib_points
    grid = cfg.calibration_grid(points)
    runner = LoopSettleRunner(cfg, seed=args.seed)
    table = run_calibration(runner, grid)
    table.to_csv(args.out)
    print(f"calibrated {grid.shape[0]} points "
          f"({grid[0]:g} to {grid[-1]:g} mm) -> {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    table = _load_table(args.table)
    gesture = load_gesture(args.gesture, sensor_range_mm=cfg.sensor_range_mm)
    trace, audio = run_scenario(cfg, gesture, table, args.seed)
    trace.to_csv(args.trace)
    write_wav(audio, args.wav, cfg.audio_rate_hz)
    if args.spectrogram is not None:
        spec = spectrogram(audio, 512, 256, cfg.audio_rate_hz)
        spec.to_csv(args.spectrogram)
    print(f"{trace.n_rows} trace rows, {audio.shape[0]} audio samples "
          f"({gesture.duration_s:g} s)")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _load_config(args.config)
    if not Path(args.trace).exists():
        raise ConfigError(f"trace file not found: {args.trace}")
    trace = Trace.from_csv(args.trace, cfg)
    features = analyze_trace(trace, cfg)
    print(features.summary())
    return EXIT_OK


def cmd_latency(args) -> int:
    cfg = _load_config(args.config)
    report = latency_report(cfg)
    print(report.format_report())
    return EXIT_OK if report.all_pass else EXIT_CONSTRAINT


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    cfg = _load_config(args.config)
    table = _load_table(args.table)
    app = create_app(cfg, table, seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hapticloop",
        description="deterministic tactile I/O loop simulator")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate",
                       help="settle the loop across the gap grid, write amplitude table")
    c.add_argument("--config", default=None)
    c.add_argument("--out", required=True, help="output calibration CSV")
    c.add_argument("--points", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_calibrate)

    r = sub.add_parser("run", help="run a gesture script, write trace and audio")
    r.add_argument("--config", default=None)
    r.add_argument("--gesture", required=True)
    r.add_argument("--table", default=None, help="calibration CSV from 'calibrate'")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trace", required=True, help="output trace CSV")
    r.add_argument("--wav", required=True, help="output 16-bit WAV")
    r.add_argument("--spectrogram", default=None, help="optional spectrogram CSV")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("analyze", help="peaks and sweep correlation of a trace")
    a.add_argument("--trace", required=True)
    a.add_argument("--config", default=None)
    a.set_defaults(func=cmd_analyze)

    l = sub.add_parser("latency", help="check loop timing budgets")
    l.add_argument("--config", default=None)
    l.set_defaults(func=cmd_latency)

    s = sub.add_parser("serve", help="WebSocket live-session service")
    s.add_argument("--config", default=None)
    s.add_argument("--table", default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8787)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, GestureError, ContractViolation,
            InsufficientDataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (SimulationFault, DeviceFault) as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
