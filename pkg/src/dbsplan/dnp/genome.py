"""Chain-partition genomes.

A genome is a permutation of all ``M + B`` node ids in which the MBS ids
(``M..M+B-1``) appear in ascending order and the last gene is ``M+B-1``. The
DBS run preceding MBS ``k`` is the backhaul chain into that gateway; an empty
run leaves the MBS unused.
"""
from __future__ import annotations

import itertools

import numpy as np

from .. import _kernels


class GenomeError(ValueError):
    pass


def check_genome(genes, m: int, b: int) -> None:
    g = np.asarray(genes)
    if g.ndim != 1 or len(g) != m + b:
        raise GenomeError(f"genome length {g.size} != M+B = {m + b}")
    if not np.array_equal(np.sort(g), np.arange(m + b)):
        raise GenomeError("genome is not a permutation of the node ids")
    mbs = g[g >= m]
    if not np.array_equal(mbs, np.arange(m, m + b)):
        raise GenomeError("MBS genes are not in ascending order")
    if g[-1] != m + b - 1:
        raise GenomeError("last gene must be the highest-index MBS")


def is_valid_genome(genes, m: int, b: int) -> bool:
    try:
        check_genome(genes, m, b)
    except GenomeError:
        return False
    return True


def decode(genes, m: int, b: int | None = None) -> list[list[int]]:
    """Split a genome into its ``B`` chains, each terminated by its MBS."""
    if b is not None:
        check_genome(genes, m, b)
    paths, cur = [], []
    for g in genes:
        g = int(g)
        cur.append(g)
        if g >= m:
            paths.append(cur)
            cur = []
    return paths


def encode(paths) -> np.ndarray:
    return np.array([g for p in paths for g in p], dtype=np.int64)


def from_chains(chains, m: int, b: int) -> np.ndarray:
    """Genome from DBS-only chains, ``chains[k]`` feeding MBS ``m + k``."""
    if len(chains) != b:
        raise GenomeError(f"expected {b} chains")
    genes = encode([list(c) + [m + k] for k, c in enumerate(chains)])
    check_genome(genes, m, b)
    return genes


def random_genomes(rng: np.random.Generator, m: int, b: int, n: int) -> np.ndarray:
    """``n`` genomes: random DBS order, MBS insertion points drawn with repetition."""
    length = m + b
    out = np.empty((n, length), dtype=np.int64)
    perm = np.argsort(rng.random((n, m)), axis=1) if m else np.empty((n, 0), dtype=np.int64)
    pts = np.sort(rng.integers(0, m + 1, size=(n, b - 1)), axis=1)
    # DBS at perm index i is shifted right by the number of MBSs inserted at or before i
    shift = (pts[:, :, None] <= np.arange(m)[None, None, :]).sum(axis=1)
    rows = np.arange(n)[:, None]
    out[rows, np.arange(m)[None, :] + shift] = perm
    if b > 1:
        out[rows, pts + np.arange(b - 1)[None, :]] = np.arange(m, m + b - 1)[None, :]
    out[:, -1] = m + b - 1
    return out


def init_population(graph, n_initial: int, seed) -> np.ndarray:
    if n_initial < 1:
        raise ValueError("population size must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return random_genomes(rng, graph.dbs_count, graph.mbs_count, n_initial)


def solution_space_size(m: int, b: int) -> int:
    """Count of (permutation, insertion-tuple) draws, ``M! (M+1)^(B-1)``."""
    return int(np.prod(np.arange(1, m + 1, dtype=object))) * (m + 1) ** (b - 1)


def distinct_genome_count(m: int, b: int) -> int:
    """Number of distinct genomes (insertion points as a multiset)."""
    from math import comb, factorial
    return factorial(m) * comb(m + b - 1, b - 1)


def iter_all_genomes(m: int, b: int, chunk: int = 50_000):
    """Yield every distinct genome once, permutation-major, in array chunks."""
    spots = list(itertools.combinations_with_replacement(range(m + 1), b - 1))
    buf = []
    for perm in itertools.permutations(range(m)):
        for pts in spots:
            genes, j = [], 0
            for i, d in enumerate(perm):
                while j < len(pts) and pts[j] == i:
                    genes.append(m + j)
                    j += 1
                genes.append(d)
            while j < len(pts):
                genes.append(m + j)
                j += 1
            genes.append(m + b - 1)
            buf.append(genes)
            if len(buf) >= chunk:
                yield np.array(buf, dtype=np.int64)
                buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


def _resort_mbs(genes: np.ndarray, m: int) -> None:
    """Restore ascending MBS order in place, MBS genes keep their slots."""
    sel = genes >= m
    genes[sel] = np.arange(m, m + int(sel.sum()))


def mutate(genes, rng: np.random.Generator, m: int, dbs_only: bool = False) -> np.ndarray:
    """Swap two distinct non-terminal genes; MBS order is re-sorted if disturbed."""
    child = np.array(genes, dtype=np.int64, copy=True)
    if dbs_only:
        cand = np.flatnonzero(child < m)
    else:
        cand = np.arange(len(child) - 1)
    if len(cand) < 2:
        return child
    i, j = rng.choice(cand, size=2, replace=False)
    child[i], child[j] = child[j], child[i]
    _resort_mbs(child, m)
    return child


def mutate_batch(pop: np.ndarray, rng: np.random.Generator, m: int,
                 dbs_only: bool = False) -> np.ndarray:
    """Vectorised :func:`mutate` over the rows of ``pop`` (modified in place)."""
    n, length = pop.shape
    if n == 0:
        return pop
    if dbs_only:
        for r in range(n):
            pop[r] = mutate(pop[r], rng, m, dbs_only=True)
        return pop
    span = length - 1
    if span < 2:
        return pop
    i = rng.integers(0, span, size=n)
    j = rng.integers(0, span - 1, size=n)
    j = j + (j >= i)
    rows = np.arange(n)
    gi = pop[rows, i].copy()
    pop[rows, i] = pop[rows, j]
    pop[rows, j] = gi
    sel = pop >= m
    pop[sel] = np.tile(np.arange(m, length), n)
    return pop


def crossover_mask(rng: np.random.Generator, b: int, n: int = 1) -> np.ndarray:
    """Which leader chains to keep: a non-empty proper subset when ``b >= 2``."""
    if b == 1:
        return np.ones((n, 1), dtype=np.uint8)
    out = rng.random((n, b)) < 0.5
    while True:
        cnt = out.sum(axis=1)
        bad = (cnt == 0) | (cnt == b)
        if not bad.any():
            return out.astype(np.uint8)
        out[bad] = rng.random((int(bad.sum()), b)) < 0.5


def crossover(leader, follower, rng: np.random.Generator, m: int) -> np.ndarray:
    """Offspring keeping a random subset of the leader's chains verbatim."""
    leader = np.asarray(leader, dtype=np.int64)
    follower = np.asarray(follower, dtype=np.int64)
    if leader.shape != follower.shape:
        raise GenomeError("parents have different lengths")
    b = int((leader >= m).sum())
    check_genome(leader, m, b)
    check_genome(follower, m, b)
    take = crossover_mask(rng, b)[0]
    return _kernels.crossover_repair(leader, follower, take, m)
