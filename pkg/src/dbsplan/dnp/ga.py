"""Genetic search over chain-partition genomes.

Two fitness functions play different roles: the *selection* score (edge or
node surplus under one of three penalty regimes) drives reproduction, while
the *solution* score is always F_node over valid genomes and decides which
individual is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .. import _kernels
from .fitness import SETTINGS, Solution, evaluate_population, evaluate_solution
from .genome import crossover_mask, init_population, mutate_batch


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 400
    max_generations: int = 400
    crossover_rate: float = 0.3
    mutation_rate: float = 0.2
    elitism_rate: float = 0.1
    fitness_select: str = "node"
    penalty_mode: str = "value"
    tournament_size: int = 3
    dbs_only_mutation: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("crossover_rate", "mutation_rate", "elitism_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        if self.fitness_select not in ("edge", "node"):
            raise ValueError(f"fitness_select must be 'edge' or 'node', got {self.fitness_select!r}")
        if self.penalty_mode not in ("none", "value", "edge-deficit"):
            raise ValueError(f"unknown penalty_mode {self.penalty_mode!r}")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be at least 1")

    @classmethod
    def from_setting(cls, label: str, **kw) -> "GaConfig":
        basis, mode = SETTINGS[label.upper()]
        return cls(fitness_select=basis, penalty_mode=mode, **kw)

    @property
    def setting(self) -> str:
        for label, pair in SETTINGS.items():
            if pair == (self.fitness_select, self.penalty_mode):
                return label
        raise AssertionError("unreachable")  # pragma: no cover

    def with_seed(self, seed: int) -> "GaConfig":
        return replace(self, seed=seed)


@dataclass
class GaResult:
    best: Solution | None
    trace: list[float] = field(default_factory=list)
    population_best: list[float] = field(default_factory=list)
    found_at: int | None = None

    @property
    def success(self) -> bool:
        return self.best is not None


def _lexsort_key(pop: np.ndarray) -> np.ndarray:
    """Rank of each row in lexicographic order."""
    order = np.lexsort(pop.T[::-1])
    rank = np.empty(len(pop), dtype=np.int64)
    rank[order] = np.arange(len(pop))
    return rank


def _tournament(rng, scores, n_pick, size):
    cand = rng.integers(0, len(scores), size=(n_pick, size))
    return cand[np.arange(n_pick), np.argmax(scores[cand], axis=1)]


def run_ga(graph, config: GaConfig = GaConfig()) -> GaResult:
    """Run the generational loop for ``config.max_generations`` generations.

    Each generation: evaluate, store the best valid individual by F_node,
    keep the top ``elitism_rate`` fraction by selection score, and fill the
    rest with tournament-selected parents, recombined with probability
    ``crossover_rate`` (leader = fitter parent) and mutated with probability
    ``mutation_rate``.
    """
    rng = np.random.default_rng(config.seed)
    m = graph.dbs_count
    n = config.population_size
    pop = init_population(graph, n, rng)
    p_const = graph.penalty_constant
    n_elite = min(n, int(round(config.elitism_rate * n)))
    n_child = n - n_elite

    best_genes, best_f = None, -math.inf
    result = GaResult(None)
    for gen in range(config.max_generations):
        table = evaluate_population(graph, pop)
        sol_scores = table.f_node
        top = int(np.argmax(sol_scores))
        result.population_best.append(float(sol_scores[top]))
        if sol_scores[top] > best_f:
            best_f = float(sol_scores[top])
            best_genes = pop[top].copy()
            if result.found_at is None:
                result.found_at = gen
        result.trace.append(best_f)
        if gen == config.max_generations - 1:
            break

        sel = table.score(config.fitness_select, config.penalty_mode, p_const)
        lex = _lexsort_key(pop)
        # stable order: higher score first, lexicographically smaller genome on ties
        order = np.lexsort((lex, -sel))
        elites = pop[order[:n_elite]]

        p1 = _tournament(rng, sel, n_child, config.tournament_size)
        p2 = _tournament(rng, sel, n_child, config.tournament_size)
        children = pop[p1].copy()
        do_cx = rng.random(n_child) < config.crossover_rate
        if do_cx.any():
            a, b = p1[do_cx], p2[do_cx]
            first_leads = (sel[a] > sel[b]) | ((sel[a] == sel[b]) & (lex[a] <= lex[b]))
            leaders = np.where(first_leads, a, b)
            followers = np.where(first_leads, b, a)
            takes = crossover_mask(rng, graph.mbs_count, len(leaders))
            children[do_cx] = _kernels.crossover_batch(pop[leaders], pop[followers], takes, m)
        do_mut = rng.random(n_child) < config.mutation_rate
        if do_mut.any():
            children[do_mut] = mutate_batch(children[do_mut], rng, m, config.dbs_only_mutation)
        pop = np.vstack([elites, children])

    if best_genes is not None:
        result.best = evaluate_solution(graph, best_genes)
    return result
