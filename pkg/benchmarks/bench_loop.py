"""Compare the compiled kernels against the interpreted fallback.

The flag is read at import, so each path runs in its own interpreter.
Usage: python benchmarks/bench_loop.py [seconds-of-simulated-gesture]
"""

import os
import subprocess
import sys

CHILD = r"""
import sys, time
import numpy as np
import hapticloop as hl

duration = float(sys.argv[1])
cfg = hl.DeviceConfig()
text = "0 14 0.1\n%g 4 0.9\n" % duration
gesture = hl.parse_gesture(text)

# warm pass triggers compilation on the compiled path
hl.run_scenario(cfg, hl.parse_gesture("0 10 0.5\n0.05 10 0.5\n"), None, 0)

t0 = time.perf_counter()
trace, audio = hl.run_scenario(cfg, gesture, None, 7)
dt = time.perf_counter() - t0
print("%d rows, %d audio samples in %.3f s (%.1fx realtime)"
      % (trace.n_rows, audio.shape[0], dt, duration / dt))
print("RESULT %.6f" % dt)
"""


def run_path(flag: str, duration: float) -> float:
    env = dict(os.environ, HAPTICLOOP_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", CHILD, str(duration)],
                         env=env, capture_output=True, text=True, check=True)
    for line in out.stdout.splitlines():
        print(f"  {line}")
        if line.startswith("RESULT"):
            return float(line.split()[1])
    raise RuntimeError(f"no timing in output:\n{out.stdout}\n{out.stderr}")


def main() -> None:
    duration = float(sys.argv[1]) if len(sys.argv) > 1 else 20.0
    print(f"simulating a {duration:g} s gesture on each path\n")
    print("compiled kernels (HAPTICLOOP_NUMBA=1):")
    fast = run_path("1", duration)
    print("interpreted fallback (HAPTICLOOP_NUMBA=0):")
    slow = run_path("0", duration)
    print(f"\nspeedup: {slow / fast:.1f}x")


if __name__ == "__main__":
    main()
