"""Benchmark the numba kernels against the vectorized numpy fallback.

Usage:
    python3 benchmarks/bench_backends.py [--samples N] [--repeats R]

Both lanes produce bit-identical estimates; this script measures the
speed gap and verifies equality on the benchmarked workload.
"""

import argparse
import os
import time

os.environ.setdefault("IFL_BACKEND", "numba")  # decided per run below

from ifl import DEFAULT_PARAMS, mc_accuracy, mc_agreement, parse_zeta


def run_lane(lane, samples, repeats):
    os.environ["IFL_BACKEND"] = lane
    zeta = parse_zeta("constant:0.9")
    # one untimed call per estimator to absorb JIT compilation
    mc_accuracy(DEFAULT_PARAMS, 1000, 0)
    mc_agreement(DEFAULT_PARAMS, zeta, 1000, 0)
    timings = {}
    results = {}
    for name, fn in (
        ("accuracy", lambda s: mc_accuracy(DEFAULT_PARAMS, samples, s)),
        ("agreement", lambda s: mc_agreement(DEFAULT_PARAMS, zeta, samples, s)),
    ):
        best = float("inf")
        for rep in range(repeats):
            t0 = time.perf_counter()
            results[name] = fn(rep)
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
    return timings, results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=500_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    try:
        import numba  # noqa: F401
        lanes = ("numba", "numpy")
    except ImportError:
        print("numba not importable; benchmarking numpy lane only")
        lanes = ("numpy",)

    all_results = {}
    print(f"samples per call: {args.samples:,} (best of {args.repeats})")
    print(f"{'estimator':<12} {'lane':<7} {'seconds':>9} {'ns/sample':>11}")
    for lane in lanes:
        timings, results = run_lane(lane, args.samples, args.repeats)
        all_results[lane] = results
        for name, secs in timings.items():
            print(f"{name:<12} {lane:<7} {secs:>9.3f} "
                  f"{1e9 * secs / args.samples:>11.1f}")

    if len(lanes) == 2:
        for name in ("accuracy", "agreement"):
            same = all_results["numba"][name] == all_results["numpy"][name]
            print(f"{name}: lanes bit-identical: {same}")
            if not same:
                raise SystemExit(1)


if __name__ == "__main__":
    main()
