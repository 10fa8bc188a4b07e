"""Benchmark the compiled kernels against the pure-numpy fallback.

Run with:  python benchmarks/bench_kernels.py [--size N] [--repeat R]

Each kernel is timed on both backends and the outputs are compared for
bit-identity, since backend selection must never change pipeline output.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from joininfer.kernels import pure

try:
    from joininfer.kernels import _native as native
except ImportError:
    native = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - started)
    return best, result


def bench(name, make_args, call, check, repeat):
    args = make_args()
    pure_t, pure_out = timeit(lambda: call(pure, *args), repeat)
    row = {"kernel": name, "pure_s": pure_t, "native_s": None, "speedup": None}
    if native is not None:
        args = make_args()
        native_t, native_out = timeit(lambda: call(native, *args), repeat)
        if not check(pure_out, native_out):
            raise AssertionError(f"{name}: backends disagree")
        row["native_s"] = native_t
        row["speedup"] = pure_t / native_t if native_t else float("inf")
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=2_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    opts = parser.parse_args()
    n = opts.size
    rng = np.random.default_rng(0)
    ints = rng.integers(0, 2**63, size=n, dtype=np.int64).astype(np.uint64)
    strings = [f"value-{i % 10_000}".encode() for i in range(min(n, 200_000))]

    rows = [
        bench(
            "splitmix64",
            lambda: (ints,),
            lambda be, x: be.splitmix64(x),
            lambda a, b: bool((a == b).all()),
            opts.repeat,
        ),
        bench(
            "fnv1a64_many",
            lambda: (strings,),
            lambda be, items: be.fnv1a64_many(items),
            lambda a, b: bool((a == b).all()),
            opts.repeat,
        ),
        bench(
            "hll_update",
            lambda: (np.zeros(2**14, dtype=np.uint8), pure.splitmix64(ints), 14),
            lambda be, regs, hashes, p: (be.hll_update(regs, hashes, p), regs)[1],
            lambda a, b: bool((a == b).all()),
            opts.repeat,
        ),
        bench(
            "sample_indices",
            lambda: (n, n // 10, 42),
            lambda be, n_, k, seed: be.sample_indices(n_, k, seed),
            lambda a, b: bool((a == b).all()),
            opts.repeat,
        ),
    ]

    backend = "compiled extension present" if native else "extension missing, pure only"
    print(f"# kernel benchmark, n={n}, best of {opts.repeat} ({backend})")
    print(f"{'kernel':<16}{'pure (s)':>12}{'native (s)':>12}{'speedup':>10}")
    for r in rows:
        native_s = f"{r['native_s']:.4f}" if r["native_s"] is not None else "-"
        speedup = f"{r['speedup']:.1f}x" if r["speedup"] is not None else "-"
        print(f"{r['kernel']:<16}{r['pure_s']:>12.4f}{native_s:>12}{speedup:>10}")


if __name__ == "__main__":
    main()
