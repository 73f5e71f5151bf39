"""Aggregate metrics files into per-method statistics."""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from pathlib import Path

GROUP_KEYS = ("kind", "d_max", "n_b", "r_a", "m_target", "placement", "method")


def read_metrics(paths) -> list[dict]:
    rows = []
    for src, path in enumerate(paths):
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                r["_src"] = src
                rows.append(r)
    return rows


def _f(v):
    return float(v) if v not in ("", None) else None


def _mean_std(xs):
    if not xs:
        return None, None
    mu = math.fsum(xs) / len(xs)
    var = math.fsum((x - mu) ** 2 for x in xs) / len(xs)
    return mu, math.sqrt(var)


def summarize(paths) -> dict:
    """Success probability, mean M and F_node statistics per method.

    F_node is averaged only over instances that every method compared at the
    same axis point and placement solved, so a method that solves more (and
    harder) instances is not penalised for it.
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise ValueError("no metrics files given")
    rows = read_metrics(paths)
    rows = [r for r in rows if r.get("method") not in ("", "*")]
    if not rows:
        raise ValueError("metrics files contain no result rows")

    groups = defaultdict(list)
    for r in rows:
        groups[tuple(r[k] for k in GROUP_KEYS)].append(r)

    # instance -> set of methods that solved it, per (axis point, placement)
    solved = defaultdict(lambda: defaultdict(set))
    methods_at = defaultdict(set)
    for r in rows:
        cell = (r["_src"], r["axis_index"], r["placement"])
        methods_at[cell].add(r["method"])
        if r["success"] == "1" and not r["error"]:
            solved[cell][r["instance"]].add(r["method"])

    out = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        g = groups[key]
        ok = [r for r in g if r["success"] == "1" and not r["error"]]
        common = [r for r in ok
                  if solved[(r["_src"], r["axis_index"], r["placement"])][r["instance"]]
                  >= methods_at[(r["_src"], r["axis_index"], r["placement"])]]
        fn = [_f(r["f_node"]) for r in common if _f(r["f_node"]) is not None]
        mu, sd = _mean_std(fn)
        ms = [_f(r["M"]) for r in g if _f(r["M"]) is not None]
        entry = dict(zip(GROUP_KEYS, key))
        entry.update(
            runs=len(g), successes=len(ok), errors=sum(1 for r in g if r["error"]),
            success_rate=len(ok) / len(g) if g else 0.0,
            mean_M=(math.fsum(ms) / len(ms)) if ms else None,
            common_instances=len(fn), f_node_mean=mu, f_node_std=sd,
        )
        out.append(entry)
    return {"files": [str(p) for p in paths], "groups": out}


_TABLE_COLS = (("kind", "kind"), ("d_max", "d_max"), ("n_b", "N_B"), ("r_a", "R_A"),
               ("m_target", "M*"), ("placement", "place"), ("method", "method"),
               ("runs", "runs"), ("success_rate", "P(success)"), ("mean_M", "mean M"),
               ("common_instances", "common"), ("f_node_mean", "F_node mean"),
               ("f_node_std", "F_node std"))


def _cell(v):
    if v is None or v == "":
        return "-"
    if isinstance(v, float):
        return f"{v:.4g}" if abs(v) < 1e4 else f"{v:.1f}"
    return str(v)


def format_table(summary: dict) -> str:
    body = [[_cell(g[k]) for k, _ in _TABLE_COLS] for g in summary["groups"]]
    head = [h for _, h in _TABLE_COLS]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    line = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([line(head), line(["-" * w for w in widths])] + [line(b) for b in body]) + "\n"


def write_summary(summary: dict, out_dir) -> None:
    out = Path(out_dir)
    doc = dict(summary, files=[Path(f).name for f in summary["files"]])
    (out / "summary.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    (out / "summary.txt").write_text(format_table(summary))
