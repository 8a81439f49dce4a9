"""Fused hot-loop kernels.

Everything the 8 kHz loop touches per substep lives here in flat scalar code
so numba can compile it. Set HAPTICLOOP_NUMBA=0 to run the same functions
as plain Python (slow, for environments without numba and for benchmarking).

State layout for run_span (resumable across calls, used by batch and live
service alike so both produce identical sequences):
  S_f: [gap_mm, vel_mm_s, coil_temp_c, held_actuation, amp_ema, ring_sum,
        synth_z1, synth_z2]
  S_i: [physics_step, ring_count, ring_pos, amp_sample_count, held_steps]
  ring: window_samples floats (quantized proximity, mm)
"""

import math
import os

import numpy as np

_flag = os.environ.get("HAPTICLOOP_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

NUMBA_ENABLED = False
if _want_numba:
    try:
        from numba import njit as _njit
        NUMBA_ENABLED = True
    except ImportError:
        pass


def maybe_jit(fn):
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn


# SplitMix64 in counter mode: sample i depends only on (seed, i), so any
# subrange of the stream can be regenerated without rewinding.
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0
# xor tag separating the sensor-dither stream from the audio stream
DITHER_TAG = 0x5DEECE66DB1EF0A5

if NUMBA_ENABLED:
    @_njit(cache=True)
    def noise_u01(seed, idx):
        z = np.uint64(seed) + (np.uint64(idx) + np.uint64(1)) * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        return float(z >> np.uint64(11)) * _INV_2_53
else:
    def noise_u01(seed, idx):
        z = (int(seed) + (int(idx) + 1) * _GAMMA) & _MASK64
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        z = z ^ (z >> 31)
        return (z >> 11) * _INV_2_53


def noise_block(seed, start_index, n):
    """Vectorized white noise in [-1, 1): samples start_index..start_index+n-1."""
    idx = np.arange(int(start_index) + 1, int(start_index) + n + 1, dtype=np.uint64)
    z = np.uint64(seed) + idx * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53 * 2.0 - 1.0


@maybe_jit
def interp_clamped(x, xs, ys):
    # piecewise-linear with end clamping; shared by jit and python paths
    n = xs.shape[0]
    if x <= xs[0]:
        return ys[0]
    if x >= xs[n - 1]:
        return ys[n - 1]
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    f = (x - xs[lo]) / (xs[lo + 1] - xs[lo])
    return ys[lo] + f * (ys[lo + 1] - ys[lo])


@maybe_jit
def bandpass_coeffs(fc, bw, rate):
    """Constant-skirt 2nd-order band-pass, normalized (a0=1).

    Returns (b0, a1, a2, peak_gain); transfer peak magnitude at fc equals
    peak_gain = fc/bw, so dividing the output by it yields a unit-peak band.
    """
    w0 = 2.0 * math.pi * fc / rate
    q = fc / bw
    sw = math.sin(w0)
    al = sw / (2.0 * q)
    a0 = 1.0 + al
    b0 = (sw / 2.0) / a0
    a1 = (-2.0 * math.cos(w0)) / a0
    a2 = (1.0 - al) / a0
    return b0, a1, a2, q


@maybe_jit
def render_span(seed, start_index, n, fc, bw, rate, gain, z1, z2):
    """n audio samples of band-filtered noise; returns (block, z1, z2).

    bw >= rate/2 bypasses the filter and yields the raw noise stream.
    """
    out = np.empty(n)
    if bw >= 0.5 * rate:
        for j in range(n):
            out[j] = 2.0 * noise_u01(seed, start_index + j) - 1.0
        return out, z1, z2
    b0, a1, a2, q = bandpass_coeffs(fc, bw, rate)
    for j in range(n):
        x = 2.0 * noise_u01(seed, start_index + j) - 1.0
        y = b0 * x + z1
        z1 = z2 - a1 * y
        z2 = -b0 * x - a2 * y
        out[j] = math.tanh(gain * y / q)
    return out, z1, z2


# state vector indices
SF_GAP, SF_VEL, SF_TEMP, SF_HELD, SF_EMA, SF_RSUM, SF_Z1, SF_Z2 = range(8)
SI_STEP, SI_RCOUNT, SI_RPOS, SI_NSMP, SI_HSTEPS = range(5)

FAULT_NONE = 0
FAULT_NUMERIC = 1
FAULT_OVERTEMP = 2


def make_state(gap0_mm, temp0_c, window_samples):
    s_f = np.zeros(8)
    s_f[SF_GAP] = gap0_mm
    s_f[SF_TEMP] = temp0_c
    s_i = np.zeros(5, dtype=np.int64)
    ring = np.zeros(window_samples)
    return s_f, s_i, ring


@maybe_jit
def run_span(start_tick, n_ticks, emit_final,
             gap_cmd, rig_cmd,
             has_table, tab_n, tab_r, tab_l,
             dt, substeps, out_every, apt,
             res_mm, counts_max, dither, a_alpha,
             mass, k_min, k_max, c_min, c_max, f_gain, f_offset,
             wave_freq, wave_amp, wave_bias,
             steps_m1, alpha_cu, temp_min, temp_max,
             ambient, tau_th, r_th, p_peak,
             f_lo, f_hi, b_lo, b_hi, render_gain, audio_rate, sensor_range,
             seed,
             s_f, s_i, ring,
             out_gap, out_counts, out_near, out_amp, out_rig,
             out_steps, out_temp, out_fc, out_bw, audio):
    """Advance n_ticks sensor frames; one output row per frame sampled before
    advancing, plus a final row after the last advance when emit_final.

    Returns (fault_code, fault_tick); FAULT_NONE means the span completed.
    """
    gap = s_f[SF_GAP]
    vel = s_f[SF_VEL]
    temp = s_f[SF_TEMP]
    held = s_f[SF_HELD]
    ema = s_f[SF_EMA]
    rsum = s_f[SF_RSUM]
    z1 = s_f[SF_Z1]
    z2 = s_f[SF_Z2]
    p = s_i[SI_STEP]
    rcount = s_i[SI_RCOUNT]
    rpos = s_i[SI_RPOS]
    nsmp = s_i[SI_NSMP]
    hsteps = s_i[SI_HSTEPS]
    w = ring.shape[0]
    r_hot = 1.0 + alpha_cu * (temp_max - 20.0)
    two_pi_f = 2.0 * math.pi * wave_freq
    rows = n_ticks + 1 if emit_final != 0 else n_ticks
    fault = FAULT_NONE
    fault_tick = -1

    for k in range(rows):
        abs_tick = start_tick + k
        if not (math.isfinite(gap) and math.isfinite(vel) and math.isfinite(temp)):
            fault = FAULT_NUMERIC
            fault_tick = abs_tick
            break

        # sense and demultiplex at t = abs_tick / sensor_rate
        x = gap / res_mm
        if dither != 0:
            x += noise_u01(np.uint64(seed) ^ np.uint64(DITHER_TAG), abs_tick) - 0.5
        c = np.rint(x)
        if c < 0.0:
            c = 0.0
        elif c > counts_max:
            c = float(counts_max)
        mm = c * res_mm
        if rcount < w:
            ring[rpos] = mm
            rsum += mm
            rcount += 1
        else:
            rsum += mm - ring[rpos]
            ring[rpos] = mm
        rpos = (rpos + 1) % w
        near = rsum / rcount
        dev = mm - near
        ema += a_alpha * (dev * dev - ema)
        nsmp += 1
        corr = 1.0 - (1.0 - a_alpha) ** nsmp  # startup bias of the EMA
        amp = math.sqrt(ema / corr)
        if has_table != 0:
            a_r = interp_clamped(near, tab_n, tab_r)
            a_l = interp_clamped(near, tab_n, tab_l)
            rig = (a_l - amp) / (a_l - a_r)
            if rig < 0.0:
                rig = 0.0
            elif rig > 1.0:
                rig = 1.0
            bw_in = rig
        else:
            rig = amp
            bw_in = amp
            if bw_in < 0.0:
                bw_in = 0.0
            elif bw_in > 1.0:
                bw_in = 1.0
        fc = f_lo * (f_hi / f_lo) ** (1.0 - near / sensor_range)
        if fc < f_lo:
            fc = f_lo
        elif fc > f_hi:
            fc = f_hi
        bw = b_lo * (b_hi / b_lo) ** bw_in
        if bw < b_lo:
            bw = b_lo
        elif bw > b_hi:
            bw = b_hi
        if bw > fc:
            bw = fc  # keep the band physical: width never exceeds center

        out_gap[k] = gap
        out_counts[k] = int(c)
        out_near[k] = near
        out_amp[k] = amp
        out_rig[k] = rig
        out_steps[k] = hsteps
        out_temp[k] = temp
        out_fc[k] = fc
        out_bw[k] = bw

        if k >= n_ticks:
            break  # final settle-row only, no advance

        # audio for this frame, parameters held across the frame
        base = k * apt
        abs_base = abs_tick * apt
        if bw >= 0.5 * audio_rate:
            for j in range(apt):
                audio[base + j] = 2.0 * noise_u01(seed, abs_base + j) - 1.0
        else:
            b0, a1, a2, q = bandpass_coeffs(fc, bw, audio_rate)
            for j in range(apt):
                xn = 2.0 * noise_u01(seed, abs_base + j) - 1.0
                y = b0 * xn + z1
                z1 = z2 - a1 * y
                z2 = -b0 * xn - a2 * y
                audio[base + j] = math.tanh(render_gain * y / q)

        # physics to the next sensor frame; intent held for the whole frame
        tg = gap_cmd[k]
        r_in = rig_cmd[k]
        kk = k_min + (k_max - k_min) * r_in
        cc = c_min + (c_max - c_min) * r_in
        for j in range(substeps):
            if p % out_every == 0:
                if temp < temp_min - 1e-9 or temp > temp_max + 1e-9:
                    fault = FAULT_OVERTEMP
                    fault_tick = abs_tick
                    break
                t = p * dt
                cmd = wave_bias + wave_amp * math.sin(two_pi_f * t)
                if cmd < 0.0:
                    cmd = 0.0
                elif cmd > 1.0:
                    cmd = 1.0
                r_t = 1.0 + alpha_cu * (temp - 20.0)
                st = np.rint(cmd * r_t / r_hot * steps_m1)
                hsteps = int(st)
                held = st / steps_m1 * r_hot / r_t
            duty = hsteps / steps_m1
            temp += dt * (ambient + p_peak * duty * duty * r_th - temp) / tau_th
            force = f_gain * held / ((gap + f_offset) * (gap + f_offset))
            acc = (-kk * (gap - tg) * 1e-3 - cc * vel * 1e-3 - force) / mass
            vel += acc * 1000.0 * dt
            gap += vel * dt
            if gap < 0.0:
                gap = 0.0
                vel = 0.0
            p += 1
        if fault != FAULT_NONE:
            break

    s_f[SF_GAP] = gap
    s_f[SF_VEL] = vel
    s_f[SF_TEMP] = temp
    s_f[SF_HELD] = held
    s_f[SF_EMA] = ema
    s_f[SF_RSUM] = rsum
    s_f[SF_Z1] = z1
    s_f[SF_Z2] = z2
    s_i[SI_STEP] = p
    s_i[SI_RCOUNT] = rcount
    s_i[SI_RPOS] = rpos
    s_i[SI_NSMP] = nsmp
    s_i[SI_HSTEPS] = hsteps
    return fault, fault_tick
