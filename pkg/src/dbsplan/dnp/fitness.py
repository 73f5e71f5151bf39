"""Residual capacities, fitness functions and penalty regimes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from .genome import decode

EDGE, NODE = "edge", "node"
NONE, VALUE, DEFICIT = "none", "value", "edge-deficit"

# setting label -> (selection basis, penalty mode)
SETTINGS = {
    "ENP": (EDGE, NONE),
    "EVP": (EDGE, VALUE),
    "EEP": (EDGE, DEFICIT),
    "NNP": (NODE, NONE),
    "NVP": (NODE, VALUE),
    "NEP": (NODE, DEFICIT),
}


def path_residuals(graph, path) -> list[float]:
    """Residual capacity of every link along one chain (ending in its MBS).

    The link leaving the ``r``-th DBS must carry the load of the first ``r``
    DBSs.
    """
    out, acc = [], 0.0
    for r in range(len(path) - 1):
        acc += float(graph.loads[path[r]])
        out.append(float(graph.rates[path[r], path[r + 1]]) - acc)
    return out


def residual(graph, path, r: int) -> float:
    """Residual of link ``r`` (1-based) of ``path``."""
    if not 1 <= r <= len(path) - 1:
        raise IndexError(f"link index {r} out of range for a path of {len(path)} nodes")
    return path_residuals(graph, path)[r - 1]


def prefix_minima(res) -> list[float]:
    out, cur = [], np.inf
    for p in res:
        cur = min(cur, p)
        out.append(cur)
    return out


def is_valid(residuals) -> bool:
    """True when no link is overloaded (zero residual is fine)."""
    return all(p >= 0 for path in residuals for p in path)


def f_edge(residuals) -> float:
    return float(sum(p for path in residuals for p in path))


def f_node(residuals) -> float:
    return float(sum(m for path in residuals for m in prefix_minima(path)))


def apply_penalty(terms, residuals, mode: str, p_const: float) -> float:
    """Selection score from per-link fitness terms.

    ``terms`` are the residuals themselves (edge basis) or their running
    prefix minima (node basis), flattened over all chains; ``residuals`` are
    the raw residuals in the same order.

    * ``none``: only non-negative terms count.
    * ``edge-deficit``: non-negative terms plus every negative residual.
    * ``value``: non-negative terms, minus ``p_const`` if any residual is
      negative.
    """
    terms = np.asarray(list(terms), dtype=float)
    residuals = np.asarray(list(residuals), dtype=float)
    surplus = float(terms[terms > 0].sum())
    if mode == NONE:
        return surplus
    if mode == DEFICIT:
        return surplus + float(residuals[residuals < 0].sum())
    if mode == VALUE:
        return surplus - (p_const if np.any(residuals < 0) else 0.0)
    raise ValueError(f"unknown penalty mode {mode!r}")


@dataclass
class Solution:
    genome: np.ndarray
    paths: list[list[int]]
    residuals: list[list[float]]
    f_node: float
    f_edge: float
    valid: bool
    extra: dict = field(default_factory=dict)

    @property
    def used_paths(self) -> list[list[int]]:
        return [p for p in self.paths if len(p) > 1]

    def product_objective(self, graph) -> float:
        """Product over used chains of (sum of link rates minus DBS loads).

        Reported as a diagnostic only; the search maximises additive
        surplus.
        """
        out = 1.0
        for p in self.used_paths:
            out *= sum(graph.rates[p[r], p[r + 1]] - graph.loads[p[r]] for r in range(len(p) - 1))
        return float(out)


def evaluate_solution(graph, genes) -> Solution:
    paths = decode(genes, graph.dbs_count, graph.mbs_count)
    res = [path_residuals(graph, p) for p in paths]
    return Solution(np.asarray(genes, dtype=np.int64).copy(), paths, res,
                    f_node(res), f_edge(res), is_valid(res))


@dataclass
class FitnessTable:
    """Per-genome summaries for a whole population."""

    edge_pos: np.ndarray
    node_pos: np.ndarray
    deficit: np.ndarray
    n_neg: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return self.n_neg == 0

    @property
    def f_node(self) -> np.ndarray:
        """F_node for valid genomes, -inf for invalid ones."""
        return np.where(self.valid, self.node_pos, -np.inf)

    def score(self, basis: str, mode: str, p_const: float) -> np.ndarray:
        surplus = self.edge_pos if basis == EDGE else self.node_pos
        if mode == NONE:
            return surplus.copy()
        if mode == DEFICIT:
            return surplus + self.deficit
        if mode == VALUE:
            return surplus - np.where(self.n_neg > 0, p_const, 0.0)
        raise ValueError(f"unknown penalty mode {mode!r}")


def evaluate_population(graph, pop) -> FitnessTable:
    t = _kernels.evaluate_population(pop, graph.rates, graph.loads, graph.dbs_count)
    return FitnessTable(t[:, 0], t[:, 1], t[:, 2], t[:, 3].astype(np.int64))
