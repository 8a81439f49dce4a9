"""Finger/keystone plant above the electromagnet.

Scalar reference implementations with full contract checking. The fused
kernel in kernels.py performs the identical arithmetic in its hot loop;
tests assert the two stay numerically equal.

Units: kinematics in mm and mm/s externally, SI internally for the force
balance. Force gain is N*mm^2 against a gap in mm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .config import DeviceConfig
from .errors import ContractViolation, SimulationFault


@dataclass
class PlantState:
    gap_mm: float
    vel_mm_s: float
    coil_temp_c: float
    time_s: float = 0.0


@dataclass
class FingerIntent:
    target_gap_mm: float
    rigidity: float

    def validate(self, cfg: DeviceConfig) -> None:
        if not (0.0 <= self.target_gap_mm <= cfg.sensor_range_mm):
            raise ContractViolation(
                f"target_gap_mm {self.target_gap_mm} outside [0, {cfg.sensor_range_mm}]")
        if not (0.0 <= self.rigidity <= 1.0):
            raise ContractViolation(f"rigidity {self.rigidity} outside [0, 1]")


def magnetic_force(gap_mm: float, drive: float, cfg: DeviceConfig) -> float:
    """Attractive force in newtons at a given gap and normalized drive.

    Strictly decreasing in gap, linear in drive, zero at zero drive.
    """
    if gap_mm < 0.0:
        raise ContractViolation(f"gap must be >= 0, got {gap_mm}")
    if not (0.0 <= drive <= 1.0):
        raise ContractViolation(f"drive must be in [0, 1], got {drive}")
    d = gap_mm + cfg.force_offset_mm
    return cfg.force_gain_n_mm2 * drive / (d * d)


def finger_impedance(rigidity: float, cfg: DeviceConfig) -> tuple[float, float]:
    """(stiffness N/m, damping N*s/m), both affine and increasing in rigidity."""
    if not (0.0 <= rigidity <= 1.0):
        raise ContractViolation(f"rigidity must be in [0, 1], got {rigidity}")
    k = cfg.k_min_n_per_m + (cfg.k_max_n_per_m - cfg.k_min_n_per_m) * rigidity
    c = cfg.c_min_ns_per_m + (cfg.c_max_ns_per_m - cfg.c_min_ns_per_m) * rigidity
    return k, c


def step_plant(state: PlantState, intent: FingerIntent, drive: float,
               dt: float, cfg: DeviceConfig) -> PlantState:
    """One semi-implicit Euler step of the finger mass.

    The magnet pulls the keystone toward the surface (reduces gap); the
    surface is a rigid stop, contact zeroes the velocity.
    """
    k, c = finger_impedance(intent.rigidity, cfg)
    force = magnetic_force(state.gap_mm, drive, cfg)
    acc = (-k * (state.gap_mm - intent.target_gap_mm) * 1e-3
           - c * state.vel_mm_s * 1e-3
           - force) / cfg.mass_kg
    vel = state.vel_mm_s + acc * 1000.0 * dt
    gap = state.gap_mm + vel * dt
    if gap < 0.0:
        gap, vel = 0.0, 0.0
    t = state.time_s + dt
    if not (math.isfinite(gap) and math.isfinite(vel)):
        raise SimulationFault("plant state is not finite", t)
    return replace(state, gap_mm=gap, vel_mm_s=vel, time_s=t)


def step_thermal(state: PlantState, power_w: float, dt: float,
                 cfg: DeviceConfig) -> PlantState:
    """Explicit first-order coil heating toward ambient + power * R_th."""
    if power_w < 0.0:
        raise ContractViolation(f"power must be >= 0, got {power_w}")
    temp = state.coil_temp_c + dt * (
        cfg.ambient_c + power_w * cfg.thermal_res_c_per_w - state.coil_temp_c
    ) / cfg.thermal_tau_s
    return replace(state, coil_temp_c=temp)


def mechanical_energy(state: PlantState, intent: FingerIntent,
                      cfg: DeviceConfig) -> float:
    """Kinetic plus spring potential about the intent target, in joules."""
    k, _ = finger_impedance(intent.rigidity, cfg)
    v = state.vel_mm_s * 1e-3
    x = (state.gap_mm - intent.target_gap_mm) * 1e-3
    return 0.5 * cfg.mass_kg * v * v + 0.5 * k * x * x
