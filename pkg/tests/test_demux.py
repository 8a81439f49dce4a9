import math

import numpy as np
import pytest

import hapticloop as hl
from hapticloop import demux
from hapticloop.errors import (CalibrationError, ContractViolation,
                               DegenerateTableError)
from hapticloop.transducers import ProximitySample


@pytest.fixture
def simple_table():
    return hl.CalibrationTable(
        nearness_mm=np.array([2.0, 9.0, 16.0]),
        a_rigid_mm=np.array([0.40, 0.30, 0.25]),
        a_loose_mm=np.array([1.00, 0.80, 0.65]))


# --- nearness tracker ---

def test_nearness_constant_input_exact():
    # 7.5 is exactly representable, so the running-sum mean has no rounding
    tr = demux.NearnessTracker(50)
    for _ in range(120):
        assert tr.update(7.5) == 7.5


def test_nearness_warmup_is_mean_of_available():
    tr = demux.NearnessTracker(5)
    assert tr.update(1.0) == 1.0
    assert tr.update(2.0) == 1.5
    assert tr.update(3.0) == 2.0


def test_nearness_rejects_whole_cycle_sine(cfg):
    # window spans whole vibration cycles, so the wave integrates away
    w = cfg.window_samples
    tr = demux.NearnessTracker(w)
    bias, amp = 9.0, 0.5
    out = 0.0
    for k in range(6 * w):
        x = bias + amp * math.sin(2.0 * math.pi * cfg.wave_freq_hz * k / cfg.sensor_rate_hz)
        out = tr.update(x)
    assert abs(out - bias) < 1e-9


def test_nearness_quantized_sine_within_tenth_mm(cfg):
    w = cfg.window_samples
    tr = demux.NearnessTracker(w)
    bias, amp, res = 9.0, 0.5, cfg.sensor_resolution_mm
    worst = 0.0
    for k in range(8 * w):
        x = bias + amp * math.sin(2.0 * math.pi * cfg.wave_freq_hz * k / cfg.sensor_rate_hz)
        q = np.rint(x / res) * res
        out = tr.update(q)
        if k >= w:
            worst = max(worst, abs(out - bias))
    assert worst <= 0.1


def test_nearness_window_contract():
    with pytest.raises(ContractViolation):
        demux.NearnessTracker(0)


# --- amplitude tracker ---

def test_amplitude_first_sample_reads_true(cfg):
    tr = demux.AmplitudeTracker(1.0 / cfg.sensor_rate_hz, cfg.tau_amp_s)
    # startup-bias correction makes the first deviation come out whole
    assert tr.update(9.35, 9.0) == pytest.approx(0.35, abs=1e-12)


def test_amplitude_sine_converges_to_rms(cfg):
    tr = demux.AmplitudeTracker(1.0 / cfg.sensor_rate_hz, cfg.tau_amp_s)
    amp = 0.5
    want = amp / math.sqrt(2.0)
    n5tau = int(5 * cfg.tau_amp_s * cfg.sensor_rate_hz)
    for k in range(5 * n5tau):
        x = 9.0 + amp * math.sin(2.0 * math.pi * cfg.wave_freq_hz * k / cfg.sensor_rate_hz)
        est = tr.update(x, 9.0)
        if k >= n5tau:
            assert abs(est - want) / want <= 0.02


def test_amplitude_square_wave_converges_to_peak(cfg):
    tr = demux.AmplitudeTracker(1.0 / cfg.sensor_rate_hz, cfg.tau_amp_s)
    amp = 0.4
    n5tau = int(5 * cfg.tau_amp_s * cfg.sensor_rate_hz)
    for k in range(5 * n5tau):
        x = 9.0 + (amp if (k // 4) % 2 == 0 else -amp)
        est = tr.update(x, 9.0)
        if k >= n5tau:
            assert abs(est - amp) / amp <= 0.02


# --- calibration table ---

def test_table_csv_round_trip(tmp_path, simple_table):
    path = tmp_path / "table.csv"
    simple_table.to_csv(path)
    back = hl.CalibrationTable.from_csv(path)
    assert np.allclose(back.nearness_mm, simple_table.nearness_mm, atol=5e-7)
    assert np.allclose(back.a_rigid_mm, simple_table.a_rigid_mm, atol=5e-7)
    assert np.allclose(back.a_loose_mm, simple_table.a_loose_mm, atol=5e-7)


def test_table_validation():
    with pytest.raises(CalibrationError, match="at least 2"):
        hl.CalibrationTable(np.array([2.0]), np.array([0.3]), np.array([0.9]))
    with pytest.raises(CalibrationError, match="ascending"):
        hl.CalibrationTable(np.array([2.0, 2.0]), np.array([0.3, 0.3]),
                            np.array([0.9, 0.8]))
    with pytest.raises(CalibrationError, match="braced finger must vibrate less"):
        hl.CalibrationTable(np.array([2.0, 9.0]), np.array([0.9, 0.3]),
                            np.array([0.8, 0.8]))
    with pytest.raises(CalibrationError, match=">= 0"):
        hl.CalibrationTable(np.array([2.0, 9.0]), np.array([-0.1, 0.2]),
                            np.array([0.8, 0.7]))


def test_table_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("wrong,header,here\n1,2,3\n")
    with pytest.raises(CalibrationError, match="header"):
        hl.CalibrationTable.from_csv(p)
    p.write_text("nearness_mm,a_rigid_mm,a_loose_mm\n1,2\n")
    with pytest.raises(CalibrationError, match=":2: expected 3 columns"):
        hl.CalibrationTable.from_csv(p)


def test_interpolation_knots_and_midpoints(simple_table):
    a_r, a_l = demux.interpolate_bounds(simple_table, 9.0)
    assert (a_r, a_l) == (0.30, 0.80)
    a_r, a_l = demux.interpolate_bounds(simple_table, 5.5)  # halfway 2..9
    assert a_r == pytest.approx(0.35)
    assert a_l == pytest.approx(0.90)
    # clamped outside the grid
    assert demux.interpolate_bounds(simple_table, 0.0) == (0.40, 1.00)
    assert demux.interpolate_bounds(simple_table, 20.0) == (0.25, 0.65)


def test_rigidity_normalization(simple_table):
    assert demux.compute_rigidity(0.80, 9.0, simple_table) == 0.0
    assert demux.compute_rigidity(0.30, 9.0, simple_table) == 1.0
    assert demux.compute_rigidity(0.55, 9.0, simple_table) == pytest.approx(0.5)
    # amplitudes beyond the references clamp instead of extrapolating
    assert demux.compute_rigidity(1.50, 9.0, simple_table) == 0.0
    assert demux.compute_rigidity(0.05, 9.0, simple_table) == 1.0


def test_rigidity_degenerate_references():
    tbl = hl.CalibrationTable(np.array([2.0, 16.0]),
                              np.array([0.300000, 0.25]),
                              np.array([0.3000005, 0.70]))
    with pytest.raises(DegenerateTableError):
        demux.compute_rigidity(0.3, 2.0, tbl)


# --- streaming demux ---

def test_process_sample_without_table_passes_amplitude(cfg):
    state = demux.DemuxState(cfg)
    frame = None
    for k in range(60):
        frame = demux.process_sample(
            state, ProximitySample(counts=40 + (k % 2), saturated=False,
                                   time_s=k / cfg.sensor_rate_hz), None)
    assert frame.rigidity == frame.amplitude_mm
    assert frame.nearness_mm == pytest.approx(8.1, abs=0.02)


def test_process_sample_with_table(cfg, simple_table):
    state = demux.DemuxState(cfg)
    for k in range(200):
        frame = demux.process_sample(
            state, ProximitySample(counts=45, saturated=False,
                                   time_s=k / cfg.sensor_rate_hz), simple_table)
    # constant input: zero amplitude reads as fully rigid after warm-up
    assert frame.amplitude_mm == pytest.approx(0.0, abs=1e-9)
    assert frame.rigidity == 1.0


# --- calibration procedure ---

class _StubRunner:
    """Analytic loop: nearness equals the target, amplitude follows
    A(n, r) = (1 - 0.8 r) * (0.5 + 0.1 * (17 - n))."""

    def settle_point(self, target_gap_mm, rigidity):
        amp = (1.0 - 0.8 * rigidity) * (0.5 + 0.1 * (17.0 - target_gap_mm))
        return target_gap_mm, amp


def test_run_calibration_recovers_stub_law():
    grid = np.linspace(2.0, 16.0, 8)
    tbl = hl.run_calibration(_StubRunner(), grid)
    assert np.array_equal(tbl.nearness_mm, grid)
    want_loose = 0.5 + 0.1 * (17.0 - grid)
    assert np.allclose(tbl.a_loose_mm, want_loose, rtol=1e-12)
    assert np.allclose(tbl.a_rigid_mm, 0.2 * want_loose, rtol=1e-12)
    # inverting the law lands within 2% across the whole plane
    for n in np.linspace(2.5, 15.5, 9):
        for r in np.linspace(0.0, 1.0, 5):
            amp = (1.0 - 0.8 * r) * (0.5 + 0.1 * (17.0 - n))
            got = demux.compute_rigidity(amp, n, tbl)
            assert abs(got - r) <= 0.02


def test_run_calibration_grid_contracts():
    with pytest.raises(CalibrationError):
        hl.run_calibration(_StubRunner(), np.array([8.0]))
    with pytest.raises(CalibrationError):
        hl.run_calibration(_StubRunner(), np.array([8.0, 4.0]))


def test_run_calibration_rejects_untracked_nearness():
    class Stuck:
        def settle_point(self, target_gap_mm, rigidity):
            return 5.0, 0.4  # loop pinned, nearness never follows

    with pytest.raises(CalibrationError, match="not strictly ascending"):
        hl.run_calibration(Stuck(), np.linspace(2.0, 16.0, 4))
