"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends get identical inputs; outputs are compared before timing.
"""
import argparse
import time

import numpy as np

from dbsplan import _kernels
from dbsplan.clustering import init_state
from dbsplan.dnp import random_genomes, random_graph
from dbsplan.dnp.genome import crossover_mask


def _best(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return min(out)


def cases(rng):
    s = init_state(rng.uniform(0, 10_000, (400, 2)), d_max=1500)
    vuln = s.vulnerable(2).astype(np.uint8)
    mask = s.mask.astype(np.uint8)
    yield "hc_select_pair U=400", lambda k: k.hc_select_pair(s.dissim, s.cl_dissim, mask, vuln, 440.0)

    g = random_graph(30, 4, rng)
    pop = random_genomes(rng, 30, 4, 400)
    yield "evaluate_population 400x(M=30,B=4)", lambda k: k.evaluate_population(pop, g.rates, g.loads, 30)

    lead, foll = random_genomes(rng, 30, 4, 120), random_genomes(rng, 30, 4, 120)
    takes = crossover_mask(rng, 4, 120)
    yield "crossover_batch 120 pairs", lambda k: k.crossover_batch(lead, foll, takes, 30)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py, cy = _kernels.python_backend, _kernels.compiled_backend
    if cy is None:
        print("compiled kernels not built; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':38s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, call in cases(rng):
        a, b = call(py), call(cy)
        assert np.array_equal(np.asarray(a), np.asarray(b)), name
        tp = _best(lambda: call(py), args.repeat) * 1e3
        tc = _best(lambda: call(cy), args.repeat) * 1e3
        print(f"{name:38s} {tp:10.3f} {tc:10.3f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
