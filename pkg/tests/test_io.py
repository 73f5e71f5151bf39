import json

import numpy as np
import pytest

from dbsplan.dnp import evaluate_solution, random_genomes, random_graph
from dbsplan.dnp.io import (GraphFormatError, format_solution, load_graph, parse_graph,
                            save_graph, save_solution, solution_to_dict)


def test_graph_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for _ in range(10):
        g = random_graph(int(rng.integers(1, 9)), int(rng.integers(1, 4)), rng)
        save_graph(g, tmp_path / "g.txt")
        h = load_graph(tmp_path / "g.txt")
        assert (h.dbs_count, h.mbs_count) == (g.dbs_count, g.mbs_count)
        assert np.array_equal(h.rates, g.rates)
        assert np.array_equal(h.loads, g.loads)


@pytest.mark.parametrize("text", [
    "",
    "nodes 3\n",
    "graph dbs=x mbs=1\n",
    "graph dbs=1 mbs=1\nnode 5 dbs 1.0\n",
    "graph dbs=1 mbs=1\nedge 0 0 3.0\n",
    "graph dbs=1 mbs=1\nedge 0 1 fast\n",
    "graph dbs=1 mbs=1\nlink 0 1 2\n",
])
def test_bad_graph_text(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_graph_error_names_line():
    with pytest.raises(GraphFormatError) as exc:
        parse_graph("graph dbs=1 mbs=1\nnode 0 dbs 3\nedge 0 9 1\n")
    assert exc.value.line == 3


def test_solution_files(tmp_path):
    rng = np.random.default_rng(1)
    g = random_graph(5, 2, rng)
    sol = evaluate_solution(g, random_genomes(rng, 5, 2, 1)[0])
    save_solution(sol, tmp_path / "s.txt", g)
    lines = (tmp_path / "s.txt").read_text().splitlines()
    assert len(lines) == 1 + len(sol.paths)
    for line, path, res in zip(lines[1:], sol.paths, sol.residuals):
        ids, vals = line.split("|")
        assert [int(x) for x in ids.split()] == path
        assert [float(x) for x in vals.split()] == res
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc == json.loads(json.dumps(solution_to_dict(sol, g)))
    assert doc["f_node"] == sol.f_node and doc["genome"] == list(sol.genome)


def test_missing_solution(tmp_path):
    assert format_solution(None) == "no-solution\n"
    save_solution(None, tmp_path / "s.txt")
    assert json.loads((tmp_path / "s.json").read_text())["success"] is False
