"""Exception taxonomy for the loop simulator.

Contract violations are programming errors (bad arguments); device faults and
simulation faults are runtime conditions a healthy program can hit and must
surface, the CLI maps them to distinct exit codes.
"""


class ContractViolation(ValueError):
    """An argument broke a documented precondition."""


class ConfigError(ValueError):
    """Bad configuration: unknown key, unparsable value, or invalid combination."""


class DeviceFault(RuntimeError):
    """The simulated device entered a faulted state."""


class OverTemperatureError(DeviceFault):
    """Coil temperature left the rated operating range."""

    def __init__(self, temp_c: float, lo: float, hi: float, time_s: float | None = None):
        self.temp_c = temp_c
        self.time_s = time_s
        at = f" at t={time_s:.4f} s" if time_s is not None else ""
        super().__init__(f"coil temperature {temp_c:.2f} C outside rated [{lo:.0f}, {hi:.0f}] C{at}")


class SimulationFault(RuntimeError):
    """Numeric blow-up (NaN/inf) in the plant state; carries the offending time."""

    def __init__(self, message: str, time_s: float):
        self.time_s = time_s
        super().__init__(f"{message} at t={time_s:.6f} s")


class CalibrationError(RuntimeError):
    """Calibration could not produce a valid table."""


class DegenerateTableError(CalibrationError):
    """Rigid and loose references too close to normalize against."""


class GestureError(ValueError):
    """Gesture script failed to parse; message carries the line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        at = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{at}{message}")


class InsufficientDataError(ValueError):
    """Trace too short for the requested analysis."""
