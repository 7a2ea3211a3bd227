"""Timing of the compiled convolution core against the numpy fallback.

Usage: python benchmarks/bench_convolve.py [--kernel-n N] [--points M] [--repeat R]
"""
import argparse
import time

import numpy as np

from unbounded_dsp import _accel


def bench(backend, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = _accel.convolve_symbolic(*args, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kernel-n", type=int, default=1 << 16)
    ap.add_argument("--points", type=int, default=401)
    ap.add_argument("--repeat", type=int, default=3)
    ns = ap.parse_args()

    rng = np.random.default_rng(0)
    hw = rng.normal(size=ns.kernel_n) + 1j * rng.normal(size=ns.kernel_n)
    t = np.linspace(-20, 20, ns.points)
    coeffs = np.array([1.0, 0.5])
    powers = np.array([0, 1], dtype=np.int64)
    freqs = np.array([0.4, 0.4])
    args = (-0.5 * ns.kernel_n * 0.05, 0.05, hw, t, coeffs, powers, freqs)

    py, ref = bench("python", args, ns.repeat)
    print(f"kernel n={ns.kernel_n}, output points={ns.points}")
    print(f"python   {py * 1e3:9.2f} ms")
    if _accel.BACKEND != "compiled":
        print("compiled core not built; rebuild with `pip install -e . --no-build-isolation`")
        return
    cc, out = bench("compiled", args, ns.repeat)
    err = np.max(np.abs(out - ref)) / np.max(np.abs(ref))
    print(f"compiled {cc * 1e3:9.2f} ms  (x{py / cc:.1f}, threads={_accel.thread_count()}, "
          f"max rel diff {err:.1e})")


if __name__ == "__main__":
    main()
