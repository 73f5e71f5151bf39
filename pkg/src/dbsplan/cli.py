"""Command line entry point: ``plan gen|cluster|solve|experiment|summarize``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import yaml

from . import _kernels
from .channel import AccessParams, FsoParams, coverage_radius, params_from_mapping
from .clustering import kmeans_pp, load_placement, run_hc, save_placement, write_linkage_csv
from .dnp import GaConfig, build_graph_from_placement, exact_sampler, run_ga
from .dnp.io import save_graph, save_solution
from .harness.config import GA_KEYS, PCP_KEYS, ConfigError, load_config
from .harness.experiment import run_experiment
from .harness.summary import format_table, summarize, write_summary
from .scenario import PcpConfig, ScenarioFormatError, generate_pcp_scenario, load_scenario, save_scenario

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 2, 3
log = logging.getLogger("dbsplan")


def _read_mapping(path) -> dict:
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def _pcp_from(data: dict, seed) -> PcpConfig:
    kw = {k: v for k, v in (data.get("pcp") or {}).items() if k in PCP_KEYS}
    if "R_n" in data:
        kw["load_per_gn"] = float(data["R_n"])
    if "B" in data:
        kw["mbs_count"] = int(data["B"])
    if seed is not None:
        kw["seed"] = int(seed)
    try:
        return PcpConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _channel_from(data: dict) -> tuple[AccessParams, FsoParams]:
    try:
        return params_from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _out(args) -> Path:
    p = Path(args.out_dir or ".")
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_gen(args) -> int:
    pcp = _pcp_from(_read_mapping(args.config), args.seed)
    scen = generate_pcp_scenario(pcp)
    path = _out(args) / "scenario.txt"
    save_scenario(scen, path)
    print(f"wrote {path} (U={len(scen.nodes)}, B={len(scen.gateways)})")
    return EXIT_OK


def _r_a(value, access) -> float:
    if value in (None, "auto"):
        return coverage_radius(access)
    return math.inf if value == "inf" else float(value)


def cmd_cluster(args) -> int:
    data = _read_mapping(args.config)
    access, _ = _channel_from(data)
    scen = load_scenario(args.scenario)
    r_a = _r_a(args.r_a, access)
    if args.method == "hc":
        pl = run_hc(scen.gn_positions, args.d_max, args.n_b, r_a=r_a, h=access.h,
                    target_clusters=args.m)
    else:
        if args.m is None:
            raise ConfigError("--m is required for kmeans")
        pl = kmeans_pp(scen.gn_positions, args.m, args.seed or 0, h=access.h, r_a=r_a)
    out = _out(args)
    save_placement(pl, out / "placement.txt")
    if pl.linkage:
        write_linkage_csv(pl.linkage, out / "linkage.csv")
    print(f"wrote {out / 'placement.txt'} (M={pl.m}, uncovered={len(pl.uncovered)})")
    return EXIT_OK


def cmd_solve(args) -> int:
    data = _read_mapping(args.config)
    _, fso = _channel_from(data)
    fso = fso.with_d_max(args.d_max)
    scen = load_scenario(args.scenario)
    pl = load_placement(args.placement)
    graph = build_graph_from_placement(pl, scen.mbs_positions, fso, scen.gn_loads)
    out = _out(args)
    save_graph(graph, out / "graph.txt")
    seed = args.seed or 0
    if args.setting.upper() == "EXACT":
        sol = exact_sampler(graph, int(float(data.get("N_exact", 100_000))), seed)
    else:
        try:
            ga = GaConfig.from_setting(args.setting, seed=seed,
                                       **{GA_KEYS[k]: data[k] for k in GA_KEYS if k in data})
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad GA settings: {exc}") from None
        sol = run_ga(graph, ga).best
    save_solution(sol, out / "solution.txt", graph)
    if sol is None:
        print("no valid backhaul found")
        return EXIT_PARTIAL
    print(f"wrote {out / 'solution.txt'} (F_node={sol.f_node:.1f} Mbps)")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config).with_overrides(seed=args.seed)
    out_dir = args.out_dir or cfg.out_dir
    if out_dir is None:
        raise ConfigError("no output directory: pass --out-dir or set out_dir in the config")
    res = run_experiment(cfg, out_dir, jobs=args.jobs)
    print(f"wrote {res.metrics_path} ({len(res.rows)} rows, {res.n_errors} errors, "
          f"kernels={_kernels.BACKEND})")
    return EXIT_PARTIAL if res.n_errors else EXIT_OK


def cmd_summarize(args) -> int:
    summary = summarize(args.metrics)
    text = format_table(summary)
    if args.out_dir:
        write_summary(summary, _out(args))
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML parameter file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out-dir", default=None, help="output directory (default: current)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="plan", description="DBS placement and FSO backhaul planning")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a PCP scenario")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cluster", parents=[common], help="place DBSs over a scenario")
    c.add_argument("scenario")
    c.add_argument("--method", choices=("hc", "kmeans"), default="hc")
    c.add_argument("--d-max", type=float, default=2500.0)
    c.add_argument("--n-b", type=int, default=2)
    c.add_argument("--r-a", default="auto", help="coverage radius in m, 'auto' or 'inf'")
    c.add_argument("--m", type=int, default=None, help="cluster count (K-means, or HC early stop)")
    c.set_defaults(func=cmd_cluster)

    s = sub.add_parser("solve", parents=[common], help="design the backhaul for a placement")
    s.add_argument("scenario")
    s.add_argument("placement")
    s.add_argument("--setting", default="NVP", help="ENP EVP EEP NNP NVP NEP or EXACT")
    s.add_argument("--d-max", type=float, default=2500.0)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", parents=[common], help="run a configured sweep")
    e.set_defaults(func=cmd_experiment)

    m = sub.add_parser("summarize", parents=[common], help="aggregate metrics files")
    m.add_argument("metrics", nargs="+")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_summarize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.cmd == "experiment" and args.config is None:
        print("plan: error: experiment needs --config", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, ScenarioFormatError) as exc:
        print(f"plan: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"plan: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
