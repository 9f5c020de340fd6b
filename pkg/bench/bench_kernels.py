"""Time the numpy fallback against the compiled kernels.

Two measurements: the raw ``scan_minicolumn`` call on a benchmark-sized
dendrite block, and one full benchmark seed end to end (each backend in a
fresh interpreter, selected through ``MACROCOLUMN_KERNELS``).

    python3 bench/bench_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from macrocolumn import kernels

END_TO_END = (
    "import time; from macrocolumn.benchmark import BenchConfig, run_benchmark; "
    "from macrocolumn.kernels import BACKEND; t = time.perf_counter(); "
    "run_benchmark(BenchConfig(seed=0), check=False); "
    "print(BACKEND, time.perf_counter() - t)"
)


def micro(repeat: int) -> None:
    rng = np.random.default_rng(0)
    # dx minicolumn at benchmark size: 30 neurons, 8 segments, 1 + 40 + 10 + 30 lines
    w = np.ascontiguousarray(rng.choice([0, 8], size=(30, 8, 81)).astype(np.uint8))
    committed = np.ones((30, 8), dtype=np.uint8)
    d1 = np.zeros(30, dtype=np.uint8)
    d1[4] = 1
    active = np.array([3, 45, 60], dtype=np.intp)
    for name in ("python", "cython"):
        try:
            mod = kernels.load(name)
        except ImportError:
            print(f"{name:7s} unavailable")
            continue
        t = timeit.timeit(lambda: mod.scan_minicolumn(w, committed, d1, active, 8, 24, True),
                          number=repeat)
        print(f"{name:7s} scan_minicolumn  {t / repeat * 1e6:8.2f} us/call")


def end_to_end() -> None:
    for name in ("python", "cython"):
        env = dict(os.environ, MACROCOLUMN_KERNELS=name)
        r = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                           text=True)
        if r.returncode:
            print(f"{name:7s} failed: {r.stderr.strip().splitlines()[-1]}")
            continue
        backend, secs = r.stdout.split()
        print(f"{backend:7s} one benchmark seed  {float(secs):6.2f} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20000)
    a = ap.parse_args()
    micro(a.repeat)
    end_to_end()
