"""Problem instances: ground nodes from a Poisson cluster process plus gateway MBSs.

Scenario text format (one record per line, ``key=value`` fields, ``#``
comments allowed)::

    scenario version=1 area_side=<m> seed=<int> gn_count=<U> mbs_count=<B> [config fields]
    gn id=<int> x=<m> y=<m> load=<Mbps>
    mbs id=<int> x=<m> y=<m> h=<m>

The header must come first; GN and MBS records follow in id order. Floats are
written with ``repr`` so a save/load round trip is exact.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class ScenarioFormatError(ValueError):
    """Malformed scenario file. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, field_name: str | None = None):
        self.line = line
        self.field = field_name
        where = f"line {line}: " if line is not None else ""
        if field_name:
            where += f"field '{field_name}': "
        super().__init__(where + message)


@dataclass(frozen=True)
class GroundNode:
    id: int
    x: float
    y: float
    load: float

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class GatewayStation:
    id: int
    x: float
    y: float
    h: float

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.h)


@dataclass(frozen=True)
class PcpConfig:
    """Poisson cluster process settings.

    ``parent_intensity`` is in parents per km^2; ``daughter_scatter`` is the
    standard deviation of the isotropic Gaussian offset, in metres.
    ``fixed_parents`` replaces the parent PPP with explicit points and
    ``poisson_daughters=False`` makes every parent spawn exactly
    ``daughters_per_parent`` nodes.
    """

    area_side: float = 10_000.0
    parent_intensity: float = 0.08
    daughters_per_parent: float = 25.0
    daughter_scatter: float = 400.0
    load_per_gn: float = 20.0
    mbs_count: int = 4
    mbs_height: float = 30.0
    seed: int = 0
    poisson_daughters: bool = True
    fixed_parents: tuple[tuple[float, float], ...] | None = None
    load_override: tuple[tuple[int, float], ...] | None = None

    def __post_init__(self):
        if not self.area_side > 0:
            raise ValueError("area_side must be positive")
        if self.parent_intensity < 0 or (self.parent_intensity == 0 and not self.fixed_parents):
            raise ValueError("parent_intensity must be positive")
        if not self.daughters_per_parent > 0:
            raise ValueError("daughters_per_parent must be positive")
        if self.daughter_scatter < 0:
            raise ValueError("daughter_scatter must be non-negative")
        if not self.load_per_gn > 0:
            raise ValueError("load_per_gn must be positive")
        if self.mbs_count < 1:
            raise ValueError("mbs_count must be at least 1")


@dataclass(frozen=True)
class Scenario:
    nodes: tuple[GroundNode, ...]
    gateways: tuple[GatewayStation, ...]
    config: PcpConfig = field(default_factory=PcpConfig)

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def area_side(self) -> float:
        return self.config.area_side

    @property
    def gn_positions(self) -> np.ndarray:
        return np.array([[n.x, n.y] for n in self.nodes], dtype=float).reshape(-1, 2)

    @property
    def gn_loads(self) -> np.ndarray:
        return np.array([n.load for n in self.nodes], dtype=float)

    @property
    def mbs_positions(self) -> np.ndarray:
        return np.array([g.position for g in self.gateways], dtype=float).reshape(-1, 3)


# --------------------------------------------------------------------------
# generation

def place_mbs_corners(area_side: float, mbs_count: int = 4, mbs_height: float = 30.0):
    """Gateways on the area boundary; four of them sit on the corners.

    Other counts are spread evenly along the perimeter starting at the
    origin corner.
    """
    if mbs_count < 1:
        raise ValueError("mbs_count must be at least 1")
    s = float(area_side)
    if mbs_count == 4:
        xy = [(0.0, 0.0), (0.0, s), (s, 0.0), (s, s)]
    else:
        xy = []
        for k in range(mbs_count):
            t = 4.0 * s * k / mbs_count  # arc length along the perimeter
            side, off = divmod(t, s)
            side = int(side)
            if side == 0:
                xy.append((off, 0.0))
            elif side == 1:
                xy.append((s, off))
            elif side == 2:
                xy.append((s - off, s))
            else:
                xy.append((0.0, s - off))
    return [GatewayStation(k, x, y, float(mbs_height)) for k, (x, y) in enumerate(xy)]


def _draw_daughters(rng: np.random.Generator, parents: np.ndarray, cfg: PcpConfig) -> np.ndarray:
    side = cfg.area_side
    if cfg.poisson_daughters:
        counts = rng.poisson(cfg.daughters_per_parent, size=len(parents))
    else:
        counts = np.full(len(parents), int(round(cfg.daughters_per_parent)))
    centres = np.repeat(parents, counts, axis=0)
    pts = centres + rng.normal(0.0, cfg.daughter_scatter, size=centres.shape)
    # out-of-area daughters are redrawn around their own parent
    for _ in range(10_000):
        bad = np.any((pts < 0.0) | (pts > side), axis=1)
        if not bad.any():
            break
        pts[bad] = centres[bad] + rng.normal(0.0, cfg.daughter_scatter, size=(int(bad.sum()), 2))
    else:  # pragma: no cover - only with absurd scatter
        np.clip(pts, 0.0, side, out=pts)
    return pts


def generate_pcp_scenario(config: PcpConfig) -> Scenario:
    """Draw ground nodes from a Thomas-type cluster process.

    Instances with no ground nodes are rejected and redrawn from the next
    sub-seed, so the result is still a pure function of ``config``.
    """
    side = config.area_side
    area_km2 = (side / 1000.0) ** 2
    for attempt in range(1000):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(attempt,)))
        if config.fixed_parents:
            parents = np.asarray(config.fixed_parents, dtype=float).reshape(-1, 2)
        else:
            n_par = rng.poisson(config.parent_intensity * area_km2)
            parents = rng.uniform(0.0, side, size=(n_par, 2))
        pts = _draw_daughters(rng, parents, config)
        if len(pts):
            break
    else:
        raise RuntimeError("could not draw a non-empty instance")
    loads = np.full(len(pts), float(config.load_per_gn))
    for gid, value in config.load_override or ():
        loads[gid] = value
    nodes = tuple(GroundNode(i, float(x), float(y), float(l))
                  for i, ((x, y), l) in enumerate(zip(pts, loads)))
    gateways = tuple(place_mbs_corners(side, config.mbs_count, config.mbs_height))
    return Scenario(nodes, gateways, config)


# --------------------------------------------------------------------------
# persistence

_HEADER_FIELDS = {f.name: f.type for f in fields(PcpConfig)}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _encode_pairs(pairs) -> str:
    return ";".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pairs)


def format_scenario(s: Scenario) -> str:
    cfg = asdict(s.config)
    head = [f"version={FORMAT_VERSION}", f"gn_count={len(s.nodes)}",
            f"mbs_count_actual={len(s.gateways)}"]
    for name, value in cfg.items():
        if value is None:
            continue
        if name in ("fixed_parents", "load_override"):
            head.append(f"{name}={_encode_pairs(value)}")
        else:
            head.append(f"{name}={_fmt(value)}")
    lines = ["# dbsplan scenario", "scenario " + " ".join(head)]
    for n in s.nodes:
        lines.append(f"gn id={n.id} x={n.x!r} y={n.y!r} load={n.load!r}")
    for g in s.gateways:
        lines.append(f"mbs id={g.id} x={g.x!r} y={g.y!r} h={g.h!r}")
    return "\n".join(lines) + "\n"


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(format_scenario(s))


def parse_record(line: str, lineno: int) -> tuple[str, dict[str, str]]:
    parts = line.split()
    kind, kv = parts[0], {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise ScenarioFormatError(f"expected key=value, got {tok!r}", lineno)
        k, v = tok.split("=", 1)
        if k in kv:
            raise ScenarioFormatError("duplicate field", lineno, k)
        kv[k] = v
    return kind, kv


def _num(kv, key, lineno, conv=float):
    if key not in kv:
        raise ScenarioFormatError("missing field", lineno, key)
    try:
        value = conv(kv[key])
    except ValueError:
        raise ScenarioFormatError(f"bad value {kv[key]!r}", lineno, key) from None
    if conv is float and not math.isfinite(value):
        raise ScenarioFormatError(f"non-finite value {kv[key]!r}", lineno, key)
    return value


def _check_fields(kv, allowed, lineno):
    for k in kv:
        if k not in allowed:
            raise ScenarioFormatError("unknown field", lineno, k)


def _decode_pairs(text, first, lineno, key):
    out = []
    if not text:
        return tuple(out)
    try:
        for item in text.split(";"):
            a, b = item.split(",")
            out.append((first(a), float(b)))
    except ValueError:
        raise ScenarioFormatError(f"bad pair list {text!r}", lineno, key) from None
    return tuple(out)


def _parse_header(kv, lineno) -> tuple[PcpConfig, int, int]:
    allowed = set(_HEADER_FIELDS) | {"version", "gn_count", "mbs_count_actual"}
    _check_fields(kv, allowed, lineno)
    if _num(kv, "version", lineno, int) != FORMAT_VERSION:
        raise ScenarioFormatError("unsupported version", lineno, "version")
    cfg_kw = {}
    for name, typ in _HEADER_FIELDS.items():
        if name not in kv:
            continue
        raw = kv[name]
        if name == "fixed_parents":
            cfg_kw[name] = _decode_pairs(raw, float, lineno, name)
        elif name == "load_override":
            cfg_kw[name] = _decode_pairs(raw, int, lineno, name)
        elif name == "poisson_daughters":
            if raw not in ("true", "false"):
                raise ScenarioFormatError(f"bad boolean {raw!r}", lineno, name)
            cfg_kw[name] = raw == "true"
        elif name in ("mbs_count", "seed"):
            cfg_kw[name] = _num(kv, name, lineno, int)
        else:
            cfg_kw[name] = _num(kv, name, lineno)
    try:
        cfg = PcpConfig(**cfg_kw)
    except ValueError as exc:
        raise ScenarioFormatError(str(exc), lineno) from None
    n_gn = _num(kv, "gn_count", lineno, int)
    n_mbs = _num(kv, "mbs_count_actual", lineno, int)
    return cfg, n_gn, n_mbs


def parse_scenario(text: str) -> Scenario:
    cfg = None
    n_gn = n_mbs = 0
    nodes: list[GroundNode] = []
    gws: list[GatewayStation] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, kv = parse_record(line, lineno)
        if kind == "scenario":
            if cfg is not None:
                raise ScenarioFormatError("second header record", lineno)
            cfg, n_gn, n_mbs = _parse_header(kv, lineno)
            continue
        if cfg is None:
            raise ScenarioFormatError("record before header", lineno)
        if kind == "gn":
            _check_fields(kv, {"id", "x", "y", "load"}, lineno)
            gid = _num(kv, "id", lineno, int)
            if gid != len(nodes):
                raise ScenarioFormatError(f"expected gn id {len(nodes)}", lineno, "id")
            x, y = _num(kv, "x", lineno), _num(kv, "y", lineno)
            load = _num(kv, "load", lineno)
            if not load > 0:
                raise ScenarioFormatError(f"gn {gid} has non-positive load {load}", lineno, "load")
            if not (0.0 <= x <= cfg.area_side and 0.0 <= y <= cfg.area_side):
                raise ScenarioFormatError(f"gn {gid} lies outside the area", lineno)
            nodes.append(GroundNode(gid, x, y, load))
        elif kind == "mbs":
            _check_fields(kv, {"id", "x", "y", "h"}, lineno)
            mid = _num(kv, "id", lineno, int)
            if mid != len(gws):
                raise ScenarioFormatError(f"expected mbs id {len(gws)}", lineno, "id")
            gws.append(GatewayStation(mid, _num(kv, "x", lineno), _num(kv, "y", lineno),
                                      _num(kv, "h", lineno)))
        else:
            raise ScenarioFormatError(f"unknown record type {kind!r}", lineno)
    if cfg is None:
        raise ScenarioFormatError("missing header record")
    if len(nodes) != n_gn:
        raise ScenarioFormatError(f"expected {n_gn} gn records, found {len(nodes)} (truncated?)")
    if len(gws) != n_mbs:
        raise ScenarioFormatError(f"expected {n_mbs} mbs records, found {len(gws)} (truncated?)")
    if len({g.position for g in gws}) != len(gws):
        raise ScenarioFormatError("gateway positions must be distinct")
    return Scenario(tuple(nodes), tuple(gws), cfg)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())
