"""Text and JSON formats for backhaul graphs and solutions."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .graph import BackhaulGraph


class GraphFormatError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def format_graph(graph: BackhaulGraph) -> str:
    lines = [f"graph dbs={graph.dbs_count} mbs={graph.mbs_count}"]
    for j in range(graph.n_nodes):
        kind = "dbs" if j < graph.dbs_count else "mbs"
        lines.append(f"node {j} {kind} {float(graph.loads[j])!r}")
    v = graph.n_nodes
    for i in range(v):
        for l in range(i + 1, v):
            if graph.rates[i, l] > 0:
                lines.append(f"edge {i} {l} {float(graph.rates[i, l])!r}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> BackhaulGraph:
    rows = [(n, ln.split()) for n, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not rows or rows[0][1][0] != "graph":
        raise GraphFormatError("missing graph header", 1)
    try:
        hdr = dict(kv.split("=", 1) for kv in rows[0][1][1:])
        m, b = int(hdr["dbs"]), int(hdr["mbs"])
    except (KeyError, ValueError) as exc:
        raise GraphFormatError(f"bad header: {exc}", rows[0][0]) from None
    v = m + b
    loads = np.zeros(v)
    rates = np.zeros((v, v))
    seen = set()
    for n, tok in rows[1:]:
        try:
            if tok[0] == "node" and len(tok) == 4:
                j = int(tok[1])
                if not 0 <= j < v:
                    raise GraphFormatError(f"node id {j} out of range", n)
                loads[j] = float(tok[3])
                seen.add(j)
            elif tok[0] == "edge" and len(tok) == 4:
                i, l = int(tok[1]), int(tok[2])
                if not (0 <= i < v and 0 <= l < v) or i == l:
                    raise GraphFormatError(f"bad edge endpoints {i} {l}", n)
                rates[i, l] = rates[l, i] = float(tok[3])
            else:
                raise GraphFormatError(f"unrecognised record {tok[0]!r}", n)
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(str(exc), n) from None
    if len(seen) != v:
        raise GraphFormatError(f"expected {v} node records, found {len(seen)}")
    return BackhaulGraph(m, b, rates, loads[:m] if b else loads)


def save_graph(graph, path):
    Path(path).write_text(format_graph(graph))


def load_graph(path) -> BackhaulGraph:
    return parse_graph(Path(path).read_text())


def solution_to_dict(solution, graph=None) -> dict:
    if solution is None:
        return {"success": False, "paths": []}
    out = {
        "success": True,
        "valid": bool(solution.valid),
        "f_node": solution.f_node,
        "f_edge": solution.f_edge,
        "genome": [int(g) for g in solution.genome],
        "paths": [{"nodes": p, "residuals": r} for p, r in zip(solution.paths, solution.residuals)],
    }
    if graph is not None:
        out["product_objective"] = solution.product_objective(graph)
    return out


def format_solution(solution) -> str:
    """One line per chain: node ids (DBSs then the MBS) ``|`` residuals."""
    if solution is None:
        return "no-solution\n"
    lines = [f"# f_node={float(solution.f_node)!r} f_edge={float(solution.f_edge)!r} valid={int(solution.valid)}"]
    for p, r in zip(solution.paths, solution.residuals):
        lines.append(" ".join(map(str, p)) + " | " + " ".join(repr(float(x)) for x in r))
    return "\n".join(lines) + "\n"


def save_solution(solution, path, graph=None):
    """Write the text form to ``path`` and a JSON mirror next to it."""
    path = Path(path)
    path.write_text(format_solution(solution))
    path.with_suffix(".json").write_text(json.dumps(solution_to_dict(solution, graph), indent=2) + "\n")
