"""Benchmark the compiled kernel backend against the NumPy fallback.

Times the per-instance hot-loop operations and a full one-point learning
step at several candidate-list sizes.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats 2000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from banditrerank.kernels import available_backends

SIZES = ((20, 10), (200, 15), (5000, 15))


def time_op(fn, repeats: int) -> float:
    """Best-of-3 mean microseconds per call."""
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best * 1e6


def make_case(k: int, d: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    features = np.ascontiguousarray(rng.uniform(-1, 1, size=(k, d)))
    weights = np.ascontiguousarray(rng.normal(size=d))
    losses = np.ascontiguousarray(rng.uniform(0, 1, size=k))
    return features, weights, losses, rng


def bench_backend(impl, k: int, d: int, repeats: int) -> dict[str, float]:
    features, weights, losses, rng = make_case(k, d)
    probs = impl.gibbs_probs(features, weights)
    uniforms = iter(rng.random(repeats * 4 + 16).tolist())

    def one_step():
        p, xbar = impl.gibbs_stats(features, weights)
        i = impl.sample_index(p, next(uniforms))
        # constant loss stands in for the oracle call
        return weights - 0.1 * 0.5 * (features[i] - xbar)

    return {
        "gibbs_stats": time_op(lambda: impl.gibbs_stats(features, weights), repeats),
        "map_index": time_op(lambda: impl.map_index(features, weights), repeats),
        "sample_index": time_op(lambda: impl.sample_index(probs, 0.37), repeats),
        "expected_update": time_op(
            lambda: impl.expected_update(features, probs, losses), repeats
        ),
        "bandit_step": time_op(one_step, repeats),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000, help="calls per timing")
    args = parser.parse_args()

    backends = available_backends()
    if "c" not in backends:
        print("compiled backend not built; timing the NumPy fallback only")
    results = {
        name: {size: bench_backend(impl, *size, args.repeats) for size in SIZES}
        for name, impl in backends.items()
    }

    ops = ["gibbs_stats", "map_index", "sample_index", "expected_update", "bandit_step"]
    for k, d in SIZES:
        print(f"\nk={k} candidates, d={d} features ({args.repeats} calls, us/call)")
        header = f"{'op':<16}" + "".join(f"{name:>12}" for name in results)
        if len(results) == 2:
            header += f"{'speedup':>10}"
        print(header)
        for op in ops:
            row = f"{op:<16}"
            times = [results[name][(k, d)][op] for name in results]
            for value in times:
                row += f"{value:>12.2f}"
            if len(times) == 2:
                python_t = results["python"][(k, d)][op]
                c_t = results["c"][(k, d)][op]
                row += f"{python_t / c_t:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
