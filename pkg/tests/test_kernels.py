import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dbsplan import _kernels
from dbsplan.dnp import random_genomes, random_graph
from dbsplan.dnp.genome import check_genome, crossover_mask

py = _kernels.python_backend
cy = _kernels.compiled_backend
needs_ext = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_reported():
    assert _kernels.BACKEND in ("python", "cython")
    assert _kernels.backend.NAME == _kernels.BACKEND


def _hc_inputs(rng, n):
    pts = rng.uniform(0, 1000, (n, 2))
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    cl = d * rng.uniform(1, 1.5, (n, n))
    cl = np.maximum(cl, cl.T)
    d = np.round(d / 50) * 50  # force ties
    mask = (d < 400).astype(np.uint8)
    np.fill_diagonal(mask, 0)
    vuln = (mask.sum(1) <= rng.integers(0, 3)).astype(np.uint8)
    return d, cl, mask, vuln


@needs_ext
@settings(max_examples=200)
@given(st.integers(0, 2**31), st.integers(1, 30), st.sampled_from([np.inf, 300.0, 600.0]))
def test_hc_select_pair_twins(seed, n, r_a):
    d, cl, mask, vuln = _hc_inputs(np.random.default_rng(seed), n)
    assert py.hc_select_pair(d, cl, mask, vuln, r_a) == cy.hc_select_pair(d, cl, mask, vuln, r_a)


def test_hc_select_pair_reference():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(2, 12))
        d, cl, mask, vuln = _hc_inputs(rng, n)
        best = None
        for a in range(n):
            for b in range(a + 1, n):
                if cl[a, b] > 500:
                    continue
                if any(mask[a, x] and vuln[x] for x in range(n) if x != b):
                    continue
                if any(mask[b, x] and vuln[x] for x in range(n) if x != a):
                    continue
                if best is None or d[a, b] < d[best]:
                    best = (a, b)
        assert _kernels.hc_select_pair(d, cl, mask, vuln, 500.0) == (best or (-1, -1))


@needs_ext
@settings(max_examples=100)
@given(st.integers(0, 2**31), st.integers(1, 12), st.integers(1, 4))
def test_evaluate_population_twins(seed, m, b):
    rng = np.random.default_rng(seed)
    g = random_graph(m, b, rng)
    pop = random_genomes(rng, m, b, 50)
    a = py.evaluate_population(pop, g.rates, g.loads, m)
    c = cy.evaluate_population(pop, g.rates, g.loads, m)
    assert np.array_equal(a, c)


@needs_ext
@settings(max_examples=100)
@given(st.integers(0, 2**31), st.integers(1, 12), st.integers(1, 4))
def test_crossover_twins(seed, m, b):
    rng = np.random.default_rng(seed)
    lead = random_genomes(rng, m, b, 40)
    foll = random_genomes(rng, m, b, 40)
    takes = crossover_mask(rng, b, 40)
    a = py.crossover_batch(lead, foll, takes, m)
    c = cy.crossover_batch(lead, foll, takes, m)
    assert np.array_equal(a, c)
    for row in a:
        check_genome(row, m, b)
    for i in range(3):
        assert np.array_equal(py.crossover_repair(lead[i], foll[i], takes[i], m),
                              cy.crossover_repair(lead[i], foll[i], takes[i], m))


def test_crossover_keeps_leader_chains():
    rng = np.random.default_rng(0)
    m, b = 8, 3
    for _ in range(200):
        lead, foll = random_genomes(rng, m, b, 2)
        take = crossover_mask(rng, b, 1)[0]
        kid = _kernels.crossover_repair(lead, foll, take, m)
        runs = lambda g: [list(x) for x in np.split(g, np.flatnonzero(g >= m) + 1)[:-1]]
        for k in range(b):
            if take[k]:
                assert runs(kid)[k] == runs(lead)[k]
