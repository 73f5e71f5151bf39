"""Backhaul graph: node loads and pairwise achievable FSO rates.

Node indexing is shared with genomes: DBSs are ``0..M-1`` and MBSs are
``M..M+B-1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channel import FsoParams, fso_rate, pairwise_3d


@dataclass
class BackhaulGraph:
    dbs_count: int
    mbs_count: int
    rates: np.ndarray  # (M+B, M+B) Mbps, symmetric, zero diagonal
    loads: np.ndarray  # (M+B,) Mbps, zero for MBS nodes

    def __post_init__(self):
        v = self.dbs_count + self.mbs_count
        self.rates = np.ascontiguousarray(self.rates, dtype=np.float64)
        loads = np.zeros(v)
        given = np.asarray(self.loads, dtype=np.float64)
        loads[:len(given)] = given
        self.loads = loads
        if self.rates.shape != (v, v):
            raise ValueError(f"rates must be {v}x{v}, got {self.rates.shape}")
        if self.mbs_count < 1:
            raise ValueError("need at least one MBS")
        if np.any(self.rates < 0) or not np.allclose(self.rates, self.rates.T, rtol=0, atol=0):
            raise ValueError("rates must be symmetric and non-negative")
        if np.any(np.diag(self.rates) != 0):
            raise ValueError("rates must have a zero diagonal")
        if np.any(self.loads < 0) or np.any(self.loads[self.dbs_count:] != 0):
            raise ValueError("loads must be non-negative and zero on MBS nodes")

    @property
    def n_nodes(self) -> int:
        return self.dbs_count + self.mbs_count

    @property
    def genome_length(self) -> int:
        return self.n_nodes

    def is_mbs(self, node: int) -> bool:
        return node >= self.dbs_count

    @property
    def penalty_constant(self) -> float:
        """Sum of every potential link rate plus one; exceeds any surplus."""
        return float(np.triu(self.rates, k=1).sum()) + 1.0

    def link_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.rates, k=1)))


def build_graph(dbs_positions, mbs_positions, fso: FsoParams, dbs_loads) -> BackhaulGraph:
    """Graph over DBSs (first) and MBSs with rates from the FSO model."""
    dbs = np.asarray(dbs_positions, dtype=float).reshape(-1, 3)
    mbs = np.asarray(mbs_positions, dtype=float).reshape(-1, 3)
    if len(mbs) < 1:
        raise ValueError("need at least one MBS")
    nodes = np.vstack([dbs, mbs])
    rates = np.asarray(fso_rate(fso, pairwise_3d(nodes)), dtype=float)
    np.fill_diagonal(rates, 0.0)
    rates = np.maximum(rates, rates.T)  # guard exact symmetry
    return BackhaulGraph(len(dbs), len(mbs), rates, np.asarray(dbs_loads, dtype=float))


def build_graph_from_placement(placement, gateways, fso: FsoParams, gn_loads) -> BackhaulGraph:
    """Combine a placement with gateway positions; loads are summed per cluster."""
    return build_graph(placement.dbs_positions, gateways, fso, placement.cluster_loads(gn_loads))


def random_graph(m: int, b: int, rng: np.random.Generator, load_range=(20.0, 200.0),
                 rate_range=(100.0, 1500.0), link_prob: float = 0.7) -> BackhaulGraph:
    """Random symmetric instance for testing (rates zeroed with prob. 1-link_prob)."""
    v = m + b
    r = rng.uniform(*rate_range, size=(v, v))
    r = np.triu(r, k=1)
    r *= rng.random((v, v)) < link_prob
    r = r + r.T
    loads = rng.uniform(*load_range, size=m)
    return BackhaulGraph(m, b, r, loads)
