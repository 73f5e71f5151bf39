"""Seeded experiment sweeps.

Every (axis point, instance) pair is an independent task. Tasks may run in a
process pool, but rows are always merged in (axis, instance) order, so the
metrics file depends only on the configuration. Wall-clock timings go to a
separate file for that reason.
"""
from __future__ import annotations

import csv
import math
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..clustering import kmeans_pp, run_hc
from ..dnp.exact import exact_sampler
from ..dnp.ga import GaConfig, run_ga
from ..dnp.graph import build_graph_from_placement
from ..scenario import generate_pcp_scenario
from .config import EXACT, ExperimentConfig

SCHEMA_VERSION = 1
METRIC_COLUMNS = (
    "schema", "kind", "axis_index", "instance", "scenario_seed", "run_seed", "d_max", "n_b",
    "r_a", "m_target", "placement", "method", "U", "M", "success", "f_node", "f_edge",
    "found_at", "violations", "error",
)
TIMING_COLUMNS = ("axis_index", "instance", "placement", "method", "wall_ms")

# stream tags keep scenario seeds and per-run seeds in disjoint SeedSequence trees
_SCENARIO_STREAM = 0x5C3
_RUN_STREAM = 0x7A5


def scenario_seed(base: int, instance: int) -> int:
    """Seed of the GN layout; shared by every axis point so sweeps are paired."""
    ss = np.random.SeedSequence(base, spawn_key=(_SCENARIO_STREAM, instance))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def run_seed(base: int, axis_index: int, instance: int) -> int:
    """Seed for the stochastic solvers of one (axis point, instance) task."""
    ss = np.random.SeedSequence(base, spawn_key=(_RUN_STREAM, axis_index, instance))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass
class TaskResult:
    rows: list
    timings: list
    extra: dict


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(float(v))
    return str(v)


def _base_row(cfg, axis_index, point, instance, s_seed, r_seed):
    return {
        "schema": SCHEMA_VERSION, "kind": cfg.kind, "axis_index": axis_index,
        "instance": instance, "scenario_seed": s_seed, "run_seed": r_seed,
        "d_max": point.d_max, "n_b": point.n_b, "r_a": point.r_a, "m_target": point.m,
        "placement": "", "method": "", "U": None, "M": None, "success": None,
        "f_node": None, "f_edge": None, "found_at": None, "violations": None, "error": "",
    }


def _placements(cfg, point, scen, r_seed):
    """HC first (if requested); K-means reuses HC's cluster count."""
    gns = scen.gn_positions
    h = cfg.access.h
    out = {}
    hc = run_hc(gns, point.d_max, point.n_b, r_a=point.r_a, h=h, target_clusters=point.m)
    if "HC" in cfg.placements:
        out["HC"] = hc
    if "KMEANS" in cfg.placements:
        m = point.m if point.m is not None else hc.m
        out["KMEANS"] = kmeans_pp(gns, min(m, len(gns)), r_seed, h=h, r_a=point.r_a)
    return out


def run_task(cfg: ExperimentConfig, axis_index: int, instance: int) -> TaskResult:
    point = cfg.points()[axis_index]
    s_seed = scenario_seed(cfg.seed, instance)
    r_seed = run_seed(cfg.seed, axis_index, instance)
    base = _base_row(cfg, axis_index, point, instance, s_seed, r_seed)
    rows, timings, extra = [], [], {"neighbors": [], "distances": []}
    try:
        scen = generate_pcp_scenario(replace(cfg.pcp, seed=s_seed))
        base["U"] = len(scen.nodes)
        t0 = time.perf_counter()
        places = _placements(cfg, point, scen, r_seed)
        place_ms = (time.perf_counter() - t0) * 1e3
    except Exception as exc:  # logged as a row, never fatal for the sweep
        row = dict(base, error=f"{type(exc).__name__}: {exc}")
        return TaskResult([row], [], extra)

    fso = cfg.fso.with_d_max(point.d_max)
    for pname, pl in places.items():
        prow = dict(base, placement=pname, M=pl.m)
        if not cfg.solves:
            if cfg.kind == "neighbor-histogram":
                deg = pl.neighbor_counts(point.d_max)
                prow["violations"] = int((deg < point.n_b).sum())
                extra["neighbors"] += [(axis_index, instance, pname, j, int(d)) for j, d in enumerate(deg)]
            else:
                dist = pl.gn_distances(scen.gn_positions)
                over = ~(dist <= point.r_a + 1e-6)
                prow["violations"] = int(over.sum())
                if cfg.kind == "distance-histogram":
                    extra["distances"] += [(axis_index, instance, pname, n, float(d)) for n, d in enumerate(dist)]
            prow["method"] = pname
            prow["success"] = prow["violations"] == 0
            rows.append(prow)
            timings.append((axis_index, instance, pname, pname, place_ms))
            continue
        try:
            graph = build_graph_from_placement(pl, scen.mbs_positions, fso, scen.gn_loads)
        except Exception as exc:
            rows.append(dict(prow, method="*", error=f"{type(exc).__name__}: {exc}"))
            continue
        for method in cfg.methods:
            # every solver sees the same seed: common random numbers across methods
            row = dict(prow, method=method)
            seed = r_seed
            t0 = time.perf_counter()
            try:
                if method == EXACT:
                    sol = exact_sampler(graph, cfg.n_exact, seed)
                else:
                    ga = GaConfig.from_setting(method, **_ga_fields(cfg.ga), seed=seed)
                    res = run_ga(graph, ga)
                    sol = res.best
                    row["found_at"] = res.found_at
                row["success"] = sol is not None
                if sol is not None:
                    row["f_node"] = sol.f_node
                    row["f_edge"] = sol.f_edge
            except Exception as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
                row["success"] = False
            timings.append((axis_index, instance, pname, method, (time.perf_counter() - t0) * 1e3))
            rows.append(row)
    return TaskResult(rows, timings, extra)


def _ga_fields(ga) -> dict:
    keep = ("population_size", "max_generations", "crossover_rate", "mutation_rate",
            "elitism_rate", "tournament_size", "dbs_only_mutation")
    return {k: getattr(ga, k) for k in keep}


def _task_star(args):
    cfg, a, i = args
    try:
        return run_task(cfg, a, i)
    except Exception as exc:  # pragma: no cover - defensive
        point = cfg.points()[a]
        row = _base_row(cfg, a, point, i, scenario_seed(cfg.seed, i), run_seed(cfg.seed, a, i))
        row["error"] = f"{type(exc).__name__}: {exc} | {traceback.format_exc(limit=1).strip()}"
        return TaskResult([row], [], {"neighbors": [], "distances": []})


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


@dataclass
class ExperimentOutput:
    rows: list
    metrics_path: Path | None
    n_errors: int


def run_experiment(cfg: ExperimentConfig, out_dir=None, jobs: int = 1) -> ExperimentOutput:
    """Run the full sweep and write metrics, timings, data and summary files."""
    from .summary import summarize, write_summary

    out = Path(out_dir or cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-test"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc

    tasks = [(cfg, a, i) for a in range(len(cfg.points())) for i in range(cfg.instances)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task_star, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_task_star(t) for t in tasks]

    rows = [r for res in results for r in res.rows]
    _write_csv(out / "metrics.csv", METRIC_COLUMNS, [[r[c] for c in METRIC_COLUMNS] for r in rows])
    _write_csv(out / "timings.csv", TIMING_COLUMNS, [t for res in results for t in res.timings])
    if cfg.kind == "neighbor-histogram":
        _write_csv(out / "neighbors.csv", ("axis_index", "instance", "placement", "dbs", "degree"),
                   [e for res in results for e in res.extra["neighbors"]])
    if cfg.kind == "distance-histogram":
        _write_csv(out / "distances.csv", ("axis_index", "instance", "placement", "gn", "distance"),
                   [e for res in results for e in res.extra["distances"]])
    write_summary(summarize([out / "metrics.csv"]), out)
    n_err = sum(1 for r in rows if r["error"])
    return ExperimentOutput(rows, out / "metrics.csv", n_err)
