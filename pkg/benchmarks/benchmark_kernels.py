#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the three hot kernels (PageRank iteration, HITS iteration, betweenness
sweep) on a synthetic slice sized like one year of a country-level migration
network, then checks that both backends agree numerically.

Usage:
    python benchmarks/benchmark_kernels.py [--nodes N] [--density P] [--trials T]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from flownet import _kernels
from flownet.network import TimeSlice
from flownet.paths import _csr_lengths
from flownet.spectral import transition_matrix


def synthetic_slice(nodes: int, density: float, seed: int = 7) -> TimeSlice:
    rng = np.random.default_rng(seed)
    names = [f"S{i:03d}" for i in range(nodes)]
    weights = {}
    for i in range(nodes):
        for j in range(nodes):
            if i != j and rng.random() < density:
                # heavy-tailed weights, like real migration counts
                weights[(names[i], names[j])] = int(rng.pareto(1.5) * 3) + 1
    if not weights:
        weights[(names[0], names[1])] = 1
    return TimeSlice.from_weights(2014, names, weights)


def time_call(fn, *args, trials: int) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(trials):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=231)
    parser.add_argument("--density", type=float, default=0.08)
    parser.add_argument("--trials", type=int, default=5)
    args = parser.parse_args()

    s = synthetic_slice(args.nodes, args.density)
    n = len(s.node_order)
    print(f"slice: {n} nodes, {len(s.weights)} edges, numba available: {_kernels.HAS_NUMBA}")
    print()

    M = np.ascontiguousarray(transition_matrix(s).T)
    r0 = np.full(n, 1.0 / n)
    W = np.ascontiguousarray(s.matrix)
    indptr, targets, lengths = _csr_lengths(s)

    cases = [
        ("pagerank", _kernels.pagerank_numpy, _kernels.pagerank_numba, (M, r0, 1e-10, 1000)),
        ("hits", _kernels.hits_numpy, _kernels.hits_numba, (W, 1e-10, 1000)),
        ("betweenness", _kernels.betweenness_numpy, _kernels.betweenness_numba, (indptr, targets, lengths, n)),
    ]

    print(f"{'kernel':<14}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>9}{'max |diff|':>12}")
    print("-" * 59)
    for name, fn_numpy, fn_numba, call_args in cases:
        if _kernels.HAS_NUMBA:
            fn_numba(*call_args)  # JIT warmup outside the timing loop
        t_numpy, out_numpy = time_call(fn_numpy, *call_args, trials=args.trials)
        t_numba, out_numba = time_call(fn_numba, *call_args, trials=args.trials)
        a = np.asarray(out_numpy[0] if isinstance(out_numpy, tuple) else out_numpy)
        b = np.asarray(out_numba[0] if isinstance(out_numba, tuple) else out_numba)
        diff = float(np.abs(a - b).max())
        speedup = t_numpy / t_numba if t_numba > 0 else float("inf")
        print(f"{name:<14}{t_numpy * 1e3:>12.3f}{t_numba * 1e3:>12.3f}{speedup:>8.1f}x{diff:>12.2e}")

    print()
    print("active backend for library calls:", _kernels.BACKEND)


if __name__ == "__main__":
    main()
