"""Time the compiled and numpy query kernels on real one-round plans.

    python3 benchmarks/bench_kernels.py --n 64 256 1024 --repeat 3

Every backend answers the same plans; the script stops with an error if
any two backends disagree on a single answer.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from hidden_edge import generators as gen
from hidden_edge import kernels, make_rng
from hidden_edge.families import clique_rand_build, matching_det_build
from hidden_edge.general import GeneralPlanConfig, build_general_plan


def plans_for(n: int, seed: int):
    yield "general", build_general_plan(GeneralPlanConfig(n), make_rng(seed, n, "bench")).round
    yield "clique_rand", clique_rand_build(n, 1.0, make_rng(seed, n, "bench")).round
    yield "matching_det", matching_det_build(n).round


def time_backend(adj, plan, backend: str, repeat: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    answers = None
    for _ in range(repeat):
        start = time.perf_counter()
        answers = np.concatenate([kernels.evaluate_batch(adj, b, backend) for b in plan.batches])
        best = min(best, time.perf_counter() - start)
    return best, answers


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[64, 256, 1024])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    header = f"{'plan':<14}{'n':>6}{'queries':>12}" + "".join(f"{b + ' s':>14}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for n in args.n:
        graph = gen.gnp(n, 2.0 / n, make_rng(args.seed, n, "graph"))
        adj = graph.adjacency_words()
        for name, plan in plans_for(n, args.seed):
            times, answers = {}, {}
            for b in backends:
                times[b], answers[b] = time_backend(adj, plan, b, args.repeat)
            ref = answers[backends[0]]
            for b in backends[1:]:
                if not np.array_equal(ref, answers[b]):
                    print(f"error: {b} disagrees with {backends[0]} on {name} n={n}", file=sys.stderr)
                    return 1
            row = f"{name:<14}{n:>6}{plan.num_queries:>12}" + "".join(f"{times[b]:>14.4f}" for b in backends)
            if "compiled" in times and "python" in times:
                row += f"{times['python'] / max(times['compiled'], 1e-9):>9.1f}x"
            print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
