"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--scale N]

Each kernel is run on identical inputs through both backends; outputs are
checked for equality before timings are reported.
"""
import argparse
import time

import numpy as np

from quadprime import _pykernels as py
from quadprime.field_core import make_field
from quadprime.ideal_arith import generator_params

try:
    from quadprime import _ckernels as cy
except ImportError:
    cy = None


def timed(fn, *args, repeat=3):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(scale):
    primes = np.asarray(py.primes_upto(scale), dtype=np.int64)
    yield "primes_upto", "primes_upto", (scale,)
    for d in (-1, 2):
        F = make_field(d)
        yield f"prime_ideal_rows d={d}", "prime_ideal_rows", (primes, 0, scale, F.discriminant, F.t, F.n)
    for d in (-1, 2):
        F = make_field(d)
        rows = np.asarray(py.prime_ideal_rows(primes, 0, scale // 10, F.discriminant, F.t, F.n), dtype=np.int64).reshape(-1, 6)
        a, b, c = rows[:, 2].copy(), rows[:, 3].copy(), rows[:, 4].copy()
        yield f"generators d={d}", "generators", (a, b, c, F.t, F.n, *generator_params(F))
    X = scale // 10
    pr = primes[primes <= X]
    kinds = np.zeros(len(pr), dtype=np.int8)
    s1 = np.exp(2j * np.pi * np.arange(len(pr)) / 7.0)
    s2 = np.conj(s1)
    yield "ideal_coefficients", "ideal_coefficients", (X, pr, kinds, s1, s2)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", type=int, default=10**6)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':32s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} match")
    for label, name, argv in cases(args.scale):
        tp, op = timed(getattr(py, name), *argv, repeat=1)
        if cy is None:
            print(f"{label:32s} {tp:11.4f}")
            continue
        tc, oc = timed(getattr(cy, name), *argv)
        print(f"{label:32s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {same(op, oc)}")


if __name__ == "__main__":
    main()
