"""Backhaul design: chain-partition genomes, fitness, GA and baselines."""
from .exact import EnumerationTooLarge, exact_sampler, exhaustive_enumerate
from .fitness import (SETTINGS, FitnessTable, Solution, apply_penalty, evaluate_population,
                      evaluate_solution, f_edge, f_node, is_valid, path_residuals,
                      prefix_minima, residual)
from .ga import GaConfig, GaResult, run_ga
from .genome import (GenomeError, check_genome, crossover, decode, encode, from_chains,
                     init_population, is_valid_genome, mutate, random_genomes,
                     solution_space_size)
from .graph import BackhaulGraph, build_graph, build_graph_from_placement, random_graph

__all__ = [
    "BackhaulGraph", "EnumerationTooLarge", "FitnessTable", "GaConfig", "GaResult",
    "GenomeError", "SETTINGS", "Solution", "apply_penalty", "build_graph",
    "build_graph_from_placement", "check_genome", "crossover", "decode", "encode",
    "evaluate_population", "evaluate_solution", "exact_sampler", "exhaustive_enumerate",
    "f_edge", "f_node", "from_chains", "init_population", "is_valid", "is_valid_genome",
    "mutate", "path_residuals", "prefix_minima", "random_genomes", "random_graph",
    "residual", "run_ga", "solution_space_size",
]
