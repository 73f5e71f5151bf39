"""Baselines: uniform random sampling and full enumeration."""
from __future__ import annotations

import numpy as np

from .fitness import evaluate_population, evaluate_solution
from .genome import distinct_genome_count, iter_all_genomes, random_genomes, solution_space_size

ENUM_GUARD = 10**7


class EnumerationTooLarge(ValueError):
    pass


def exact_sampler(graph, budget: int, seed=0, batch: int = 50_000):
    """Best valid genome (by F_node) among ``budget`` uniform random draws.

    Draws come from the same sampler as the GA's initial population, so
    repeated genomes are possible. Returns ``None`` when no draw is valid.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(seed)
    m, b = graph.dbs_count, graph.mbs_count
    best, best_f = None, -np.inf
    left = int(budget)
    while left > 0:
        k = min(batch, left)
        pop = random_genomes(rng, m, b, k)
        f = evaluate_population(graph, pop).f_node
        i = int(np.argmax(f))
        if f[i] > best_f:
            best_f, best = f[i], pop[i].copy()
        left -= k
    return None if best is None else evaluate_solution(graph, best)


def exhaustive_enumerate(graph, guard: int = ENUM_GUARD, chunk: int = 50_000):
    """Provably optimal F_node over every distinct genome.

    Returns ``(solution_or_None, n_evaluated)``. Among genomes sharing the
    optimal F_node the lexicographically smallest is returned.
    """
    m, b = graph.dbs_count, graph.mbs_count
    if solution_space_size(m, b) > guard:
        raise EnumerationTooLarge(
            f"M={m}, B={b} gives {solution_space_size(m, b)} genomes, above the guard {guard}")
    best, best_f, count = None, -np.inf, 0
    for pop in iter_all_genomes(m, b, chunk):
        f = evaluate_population(graph, pop).f_node
        count += len(pop)
        top = f.max()
        if top == -np.inf or top < best_f:
            continue
        tied = pop[f == top]
        cand = tied[np.lexsort(tied.T[::-1])[0]]
        if top > best_f or tuple(cand) < tuple(best):
            best_f, best = top, cand.copy()
    assert count == distinct_genome_count(m, b)
    return (None if best is None else evaluate_solution(graph, best)), count
