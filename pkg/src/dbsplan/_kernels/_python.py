"""Pure-Python / numpy reference kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two must agree exactly (floating-point operations are performed in the
same order), which the test-suite checks.
"""
from __future__ import annotations

import numpy as np

NAME = "python"

# columns of the table returned by evaluate_population
EDGE_POS, NODE_POS, DEFICIT, N_NEG = 0, 1, 2, 3


def hc_select_pair(dissim, cl_dissim, mask, vulnerable, r_a):
    """Return the eligible cluster pair ``(a, b)``, ``a < b``, of least dissimilarity.

    A pair is eligible when its complete-link distance is at most ``r_a`` and
    neither cluster has a vulnerable neighbour other than its partner.
    Ties resolve to the lexicographically smallest pair. ``(-1, -1)`` when no
    pair is eligible.
    """
    n = dissim.shape[0]
    if n < 2:
        return -1, -1
    mask = np.asarray(mask, dtype=bool)
    vuln = np.asarray(vulnerable, dtype=bool)
    # vcount[a]: number of vulnerable clusters adjacent to a
    vcount = (mask & vuln[:, None]).sum(axis=0)
    partner = (mask & vuln[None, :]).astype(np.int64)  # mask[a,b] * vuln[b]
    ok_row = (vcount[:, None] - partner) == 0
    elig = ok_row & ok_row.T & (cl_dissim <= r_a)
    elig &= np.triu(np.ones((n, n), dtype=bool), k=1)
    if not elig.any():
        return -1, -1
    masked = np.where(elig, dissim, np.inf)
    flat = int(np.argmin(masked))
    a, b = divmod(flat, n)
    if not elig[a, b]:
        # every eligible entry is +inf; fall back to the first eligible one
        a, b = (int(v) for v in np.argwhere(elig)[0])
    return int(a), int(b)


def evaluate_population(pop, rates, loads, n_dbs):
    """Residual-capacity summaries for a batch of genomes.

    Returns an ``(N, 4)`` array with columns: sum of non-negative residuals,
    sum of non-negative prefix-minimum residuals, sum of negative residuals,
    and the number of negative residuals.
    """
    pop = np.asarray(pop, dtype=np.int64)
    if pop.ndim == 1:
        pop = pop[None, :]
    n, length = pop.shape
    out = np.zeros((n, 4), dtype=np.float64)
    acc = np.zeros(n)
    run_min = np.full(n, np.inf)
    for r in range(length - 1):
        g = pop[:, r]
        nxt = pop[:, r + 1]
        link = g < n_dbs
        acc = np.where(link, acc + loads[g], 0.0)
        p = rates[g, nxt] - acc
        run_min = np.where(link, np.minimum(run_min, p), np.inf)
        out[:, EDGE_POS] += np.where(link & (p > 0.0), p, 0.0)
        out[:, NODE_POS] += np.where(link & (run_min > 0.0), run_min, 0.0)
        neg = link & (p < 0.0)
        out[:, DEFICIT] += np.where(neg, p, 0.0)
        out[:, N_NEG] += neg
    return out


def _runs(genes, n_dbs):
    runs, cur = [], []
    for g in genes:
        g = int(g)
        if g < n_dbs:
            cur.append(g)
        else:
            runs.append(cur)
            cur = []
    return runs


def crossover_repair(leader, follower, take, n_dbs):
    """Build one offspring from a leader and a follower genome.

    ``take[k]`` selects the leader's chain into MBS ``k``; the remaining chains
    come from the follower with duplicates replaced by unused DBSs (ascending
    id) or dropped, and any still-unused DBSs appended to the shortest
    follower-sourced chain.
    """
    lead = _runs(leader, n_dbs)
    foll = _runs(follower, n_dbs)
    n_mbs = len(lead)
    used = [False] * n_dbs
    seen = [False] * n_dbs
    for k in range(n_mbs):
        if take[k]:
            for d in lead[k]:
                used[d] = True
        else:
            for d in foll[k]:
                seen[d] = True
    spare = [d for d in range(n_dbs) if not used[d] and not seen[d]]
    si = 0
    chains = [None] * n_mbs
    for k in range(n_mbs):
        if take[k]:
            chains[k] = lead[k]
            continue
        run = []
        for d in foll[k]:
            if used[d]:
                if si < len(spare):
                    d = spare[si]
                    si += 1
                else:
                    continue
            used[d] = True
            run.append(d)
        chains[k] = run
    if si < len(spare):
        shortest = -1
        for k in range(n_mbs):
            if not take[k] and (shortest < 0 or len(chains[k]) < len(chains[shortest])):
                shortest = k
        chains[shortest] = chains[shortest] + spare[si:]
    child = np.empty(len(leader), dtype=np.int64)
    pos = 0
    for k in range(n_mbs):
        for d in chains[k]:
            child[pos] = d
            pos += 1
        child[pos] = n_dbs + k
        pos += 1
    return child


def crossover_batch(leaders, followers, takes, n_dbs):
    leaders = np.asarray(leaders, dtype=np.int64)
    out = np.empty_like(leaders)
    for i in range(leaders.shape[0]):
        out[i] = crossover_repair(leaders[i], followers[i], takes[i], n_dbs)
    return out
