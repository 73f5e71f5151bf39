"""Experiment configuration files.

Files are YAML. Physical and GA parameters use the names of the simulation
parameter table (``h``, ``alpha``, ``f_c``, ``P_FSO``, ``chi_co`` ...), in
the table's units; sweep axes live under ``axes``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from ..channel import PARAM_NAMES, AccessParams, FsoParams, coverage_radius, params_from_mapping
from ..dnp.fitness import SETTINGS
from ..dnp.ga import GaConfig
from ..scenario import PcpConfig

KINDS = (
    "dbs-count-sweep", "neighbor-histogram", "distance-histogram", "ga-success-vs-m",
    "ga-success-vs-dmax", "surplus-vs-m", "surplus-vs-dmax", "hc-vs-kmeans",
)
SOLVER_KINDS = {"ga-success-vs-m", "ga-success-vs-dmax", "surplus-vs-m", "surplus-vs-dmax",
                "hc-vs-kmeans"}
EXACT = "EXACT"

CHANNEL_KEYS = PARAM_NAMES - {"d_max"}  # d_max is a sweep axis
GA_KEYS = {"generations": "max_generations", "population": "population_size",
           "chi_co": "crossover_rate", "chi_m": "mutation_rate", "chi_e": "elitism_rate",
           "tournament": "tournament_size", "dbs_only_mutation": "dbs_only_mutation"}
PCP_KEYS = {"area_side", "parent_intensity", "daughters_per_parent", "daughter_scatter",
            "mbs_height", "poisson_daughters"}
AXIS_KEYS = {"d_max": "d_max", "N_B": "n_b", "R_A": "r_a", "M": "m"}
TOP_KEYS = ({"experiment", "instances", "seed", "axes", "methods", "placements", "pcp",
             "N_exact", "R_n", "B", "out_dir"} | CHANNEL_KEYS | set(GA_KEYS))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AxisPoint:
    d_max: float
    n_b: int
    r_a: float
    m: int | None


@dataclass
class ExperimentConfig:
    kind: str
    axes: dict
    instances: int = 50
    seed: int = 0
    methods: tuple = ("NVP",)
    placements: tuple = ("HC",)
    n_exact: int = 100_000
    pcp: PcpConfig = field(default_factory=PcpConfig)
    access: AccessParams = field(default_factory=AccessParams)
    fso: FsoParams = field(default_factory=FsoParams)
    ga: GaConfig = field(default_factory=GaConfig)
    out_dir: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.instances < 1:
            raise ConfigError("instances must be at least 1")
        if self.n_exact < 1:
            raise ConfigError("N_exact must be at least 1")
        for name, vals in self.axes.items():
            if name not in AXIS_KEYS.values():
                raise ConfigError(f"unknown axis {name!r}")
            if not vals:
                raise ConfigError(f"axis {name!r} is empty")
        if "d_max" not in self.axes:
            raise ConfigError("axes must include d_max")
        for m in self.methods:
            if m != EXACT and m.upper() not in SETTINGS:
                raise ConfigError(f"unknown method {m!r}")
        for p in self.placements:
            if p not in ("HC", "KMEANS"):
                raise ConfigError(f"unknown placement {p!r}")

    @property
    def solves(self) -> bool:
        return self.kind in SOLVER_KINDS

    def resolved_r_a(self, value) -> float:
        if value is None or value == "auto":
            return coverage_radius(self.access)
        return float(value)

    def points(self) -> list[AxisPoint]:
        """Cartesian product of the axes, d_max outermost."""
        d = self.axes["d_max"]
        nb = self.axes.get("n_b", [2])
        ra = self.axes.get("r_a", ["auto"])
        ms = self.axes.get("m", [None])
        return [AxisPoint(float(a), int(b), self.resolved_r_a(c), None if e is None else int(e))
                for a in d for b in nb for c in ra for e in ms]

    def with_overrides(self, seed=None, out_dir=None) -> "ExperimentConfig":
        out = self
        if seed is not None:
            out = replace(out, seed=int(seed))
        if out_dir is not None:
            out = replace(out, out_dir=str(out_dir))
        return out


def _axis_value(v):
    if isinstance(v, str):
        low = v.strip().lower()
        if low in ("inf", "infinity", "none"):
            return math.inf if low != "none" else None
        if low == "auto":
            return "auto"
        try:
            return float(v)
        except ValueError:
            raise ConfigError(f"bad axis value {v!r}") from None
    return v


def config_from_mapping(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "experiment" not in data:
        raise ConfigError("missing 'experiment' key")
    try:
        axes = {}
        for key, vals in (data.get("axes") or {}).items():
            if key not in AXIS_KEYS:
                raise ConfigError(f"unknown axis {key!r}; expected one of {', '.join(AXIS_KEYS)}")
            if not isinstance(vals, list):
                vals = [vals]
            axes[AXIS_KEYS[key]] = [_axis_value(v) for v in vals]

        channel = {k: v for k, v in data.items() if k in CHANNEL_KEYS}
        access, fso = params_from_mapping(channel)

        pcp_kw = dict(data.get("pcp") or {})
        bad = set(pcp_kw) - PCP_KEYS
        if bad:
            raise ConfigError(f"unknown pcp keys: {', '.join(sorted(bad))}")
        if "R_n" in data:
            pcp_kw["load_per_gn"] = float(data["R_n"])
        if "B" in data:
            pcp_kw["mbs_count"] = int(data["B"])
        pcp = PcpConfig(**pcp_kw)

        ga_kw = {GA_KEYS[k]: data[k] for k in GA_KEYS if k in data}
        ga = GaConfig(**ga_kw)

        methods = data.get("methods", ["NVP"])
        if isinstance(methods, str):
            methods = [methods]
        placements = data.get("placements", ["HC"])
        if isinstance(placements, str):
            placements = [placements]
        return ExperimentConfig(
            kind=str(data["experiment"]),
            axes=axes,
            instances=int(data.get("instances", 50)),
            seed=int(data.get("seed", 0)),
            methods=tuple(m if m == EXACT else m.upper() for m in methods),
            placements=tuple(p.upper() for p in placements),
            n_exact=int(float(data.get("N_exact", 100_000))),
            pcp=pcp, access=access, fso=fso, ga=ga,
            out_dir=data.get("out_dir"),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return config_from_mapping(data)
