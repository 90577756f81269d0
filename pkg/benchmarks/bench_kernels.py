"""Benchmark the compiled kernels against the pure-numpy fallback.

Run as a script:  python3 benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from linesum._kernels import backends


def _time(fn, *args, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_bruteforce():
    m, n = 5, 5
    s, t = (2,) * 5, (2,) * 5
    total = 1 << (m * n)
    print(f"brute-force enumeration: 2^{m * n} matrices, margins s=t=2")
    results = {}
    for name, mod in backends().items():
        chunk = 1 << 22
        t0 = time.perf_counter()
        count = 0
        for lo in range(0, total, chunk):
            count += mod.bruteforce_count_range(lo, min(lo + chunk, total), m, n, s, t)
        elapsed = time.perf_counter() - t0
        results[name] = (elapsed, count)
        print(f"  {name:8s}  {elapsed:8.3f} s   count={count}")
    _report_speedup(results)


def bench_mc():
    m, n = 3, 3
    rng = np.random.default_rng(0)
    lam = rng.uniform(0.3, 0.7, (m, n))
    s = lam.sum(axis=1)
    t = lam.sum(axis=0)
    samples = 1_000_000
    u = rng.uniform(-math.pi, math.pi, (samples, m + n))
    theta, phi = u[:, :m], u[:, m:]
    print(f"\nMonte Carlo integrand: {samples:,} samples, {m}x{n}")
    results = {}
    for name, mod in backends().items():
        elapsed, out = _time(mod.mc_f_sum, lam, s, t, theta, phi)
        results[name] = (elapsed, out)
        print(f"  {name:8s}  {elapsed:8.3f} s   sum_re={out[0]:.6f}")
    _report_speedup(results)


def _report_speedup(results):
    if "cython" in results and "python" in results:
        ratio = results["python"][0] / results["cython"][0]
        print(f"  speedup (python/cython): {ratio:.1f}x")


if __name__ == "__main__":
    names = ", ".join(backends())
    print(f"available backends: {names}\n")
    bench_bruteforce()
    bench_mc()
