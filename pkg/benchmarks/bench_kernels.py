"""Benchmark the hot kernels: compiled extension versus numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the square-root series loop and the Jacobi eigensolver on random
inputs of growing size and prints one table per kernel with the speedup
of the compiled path (when it is available).
"""

import argparse
import time

import numpy as np

import wstar._kernels as kernels


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_series(backends, repeats):
    rng = np.random.default_rng(0)
    print("square-root series (ill-conditioned input, fixed 2000-term budget)")
    print(f"  {'dim':>4}  " + "".join(f"{name:>12}" for name in backends) + "   speedup")
    for d in (2, 4, 8, 16, 32):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = x @ x.conj().T + 1e-5 * np.eye(d)
        nrm = float(np.linalg.norm(h, 2))
        p0 = np.ascontiguousarray(np.eye(d) - h / nrm)
        unit = np.eye(d, dtype=complex)
        times = {}
        for name, mod in backends.items():
            times[name] = _time(
                lambda m=mod: m.series_bracket(p0, unit, np.sqrt(nrm), 0.0, 2000),
                repeats,
            )
        row = f"  {d:>4}  " + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in backends)
        if len(times) > 1:
            row += f"   {times['python'] / times['compiled']:>6.1f}x"
        print(row)


def bench_jacobi(backends, repeats):
    rng = np.random.default_rng(1)
    print("\nJacobi Hermitian eigensolver")
    print(f"  {'dim':>4}  " + "".join(f"{name:>12}" for name in backends) + "   speedup")
    for d in (4, 8, 16, 32, 64):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = 0.5 * (x + x.conj().T)
        times = {}
        for name, mod in backends.items():
            times[name] = _time(lambda m=mod: m.jacobi_eigh(h), repeats)
        row = f"  {d:>4}  " + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in backends)
        if len(times) > 1:
            row += f"   {times['python'] / times['compiled']:>6.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    backends = kernels.backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(backends)}\n")
    bench_series(backends, args.repeats)
    bench_jacobi(backends, args.repeats)


if __name__ == "__main__":
    main()
