"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat R]

Times the RK4 integrator of the classical system and the batched coherent
amplitudes on every available backend, checks that the backends agree and
prints the speed-up of each against the Python fallback.
"""
import argparse
import timeit

import numpy as np

from ncqm._backend import available_backends

POT = (
    np.array([1, 2, 0, 2], dtype=np.int64),
    np.array([1, 0, 2, 2], dtype=np.int64),
    np.array([0.2, 0.05, 0.05, 0.1], dtype=np.complex128),
)


def cases():
    zs = np.random.default_rng(0).uniform(-1, 1, (4000, 2)) @ np.array([1, 1j])
    return {
        "rk4_polynomial (10^4 steps)": lambda k: k.rk4_polynomial(1.0, 0.3j, *POT, 1.0, 0.2, 1e-3, 10_000),
        "coherent_amplitudes (4000 x 64)": lambda k: k.coherent_amplitudes(zs, 64),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python kernels are timed")
    print(f"{'kernel':34s} {'backend':8s} {'best [ms]':>10s} {'speed-up':>9s}")
    for name, fn in cases().items():
        results = {b: fn(k) for b, k in backends.items()}
        ref = results["python"]
        for b, out in results.items():
            pairs = zip(out, ref) if isinstance(out, tuple) else [(out, ref)]
            if not all(np.allclose(x, y, rtol=1e-12, atol=1e-13) for x, y in pairs):
                raise SystemExit(f"{name}: {b} disagrees with the Python kernel")
        best = {
            b: min(timeit.repeat(lambda k=k: fn(k), number=1, repeat=args.repeat)) for b, k in backends.items()
        }
        for b, t in best.items():
            print(f"{name:34s} {b:8s} {1e3 * t:10.2f} {best['python'] / t:8.1f}x")


if __name__ == "__main__":
    main()
