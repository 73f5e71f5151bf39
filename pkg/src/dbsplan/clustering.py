"""DBS placement by constrained agglomerative hierarchical clustering.

Clusters are merged in UPGMC order (closest centroids first) but only when

* the complete-link distance of the pair is at most the coverage radius
  ``r_a``, so every member stays within ``r_a`` of the merged centroid; and
* no third cluster adjacent (centroid distance < ``d_max``) to either member
  of the pair has ``n_b`` or fewer neighbours, so merges cannot strip a
  cluster of the backhaul neighbours it relies on.

K-means++ is provided as the comparison baseline.
"""
from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .channel import pairwise_2d

log = logging.getLogger(__name__)

MAX_GN = 2000


@dataclass
class LinkageRow:
    merged_a: int
    merged_b: int
    dissimilarity: float
    new_size: int


@dataclass
class ClusterState:
    """Mutable working state of one clustering run.

    Rows/columns of the matrices follow ``ids`` (active cluster ids). Singletons
    have ids ``0..U-1``; the cluster formed at merge ``t`` gets id ``U + t``.
    """

    points: np.ndarray
    centroids: np.ndarray
    sizes: np.ndarray
    members: list[list[int]]
    ids: list[int]
    sq_dissim: np.ndarray
    dissim: np.ndarray
    cl_dissim: np.ndarray
    mask: np.ndarray
    degree: np.ndarray
    d_max: float
    extra_degree: np.ndarray | None = None
    mbs_xy: np.ndarray | None = None
    t: int = 0

    @property
    def n_clusters(self) -> int:
        return len(self.ids)

    def vulnerable(self, n_b: int) -> np.ndarray:
        return self.degree <= n_b


def _mask(dissim: np.ndarray, d_max: float) -> np.ndarray:
    m = dissim < d_max
    np.fill_diagonal(m, False)
    return m


def _mbs_degree(centroids, mbs_xy, d_max):
    if mbs_xy is None or len(mbs_xy) == 0:
        return np.zeros(len(centroids), dtype=np.int64)
    diff = centroids[:, None, :] - np.asarray(mbs_xy, dtype=float)[None, :, :2]
    return (np.hypot(diff[..., 0], diff[..., 1]) < d_max).sum(axis=1)


def init_state(gns, d_max: float, mbs_xy=None) -> ClusterState:
    """One singleton cluster per ground node.

    ``mbs_xy`` (optional) adds gateways within ``d_max`` of a cluster centroid
    to its degree.
    """
    pts = np.asarray(gns, dtype=float).reshape(-1, 2)
    if len(pts) < 1:
        raise ValueError("need at least one ground node")
    if len(pts) > MAX_GN:
        raise ValueError(f"U={len(pts)} exceeds the supported maximum of {MAX_GN}")
    d0 = pairwise_2d(pts)
    mask = _mask(d0, d_max)
    extra = None if mbs_xy is None else _mbs_degree(pts, mbs_xy, d_max)
    degree = mask.sum(axis=1)
    if extra is not None:
        degree = degree + extra
    return ClusterState(
        points=pts,
        centroids=pts.copy(),
        sizes=np.ones(len(pts), dtype=np.int64),
        members=[[i] for i in range(len(pts))],
        ids=list(range(len(pts))),
        sq_dissim=d0 ** 2,
        dissim=d0,
        cl_dissim=d0.copy(),
        mask=mask,
        degree=degree,
        d_max=float(d_max),
        extra_degree=extra,
        mbs_xy=None if mbs_xy is None else np.asarray(mbs_xy, dtype=float),
    )


def eligible_pairs(state: ClusterState, n_b: int, r_a: float) -> set[tuple[int, int]]:
    """All pairs ``(a, b)``, ``a < b`` (matrix positions), that may be merged."""
    n = state.n_clusters
    vuln = state.vulnerable(n_b)
    vcount = (state.mask & vuln[:, None]).sum(axis=0)
    out = set()
    for a in range(n - 1):
        for b in range(a + 1, n):
            if not state.cl_dissim[a, b] <= r_a:
                continue
            shared = state.mask[a, b]
            if vcount[a] - (shared and vuln[b]) or vcount[b] - (shared and vuln[a]):
                continue
            out.add((a, b))
    return out


def merge_pair(state: ClusterState, a: int, b: int) -> LinkageRow:
    """Merge clusters at positions ``a < b`` in place; the result takes slot ``a``."""
    if not 0 <= a < b < state.n_clusters:
        raise IndexError(f"bad merge positions ({a}, {b})")
    na, nb = int(state.sizes[a]), int(state.sizes[b])
    n = na + nb
    sq = state.sq_dissim
    # centroid (UPGMC) update on squared distances
    new_sq = na / n * sq[a] + nb / n * sq[b] - na * nb / n ** 2 * sq[a, b]
    np.maximum(new_sq, 0.0, out=new_sq)
    new_cl = np.maximum(state.cl_dissim[a], state.cl_dissim[b])
    row = LinkageRow(state.ids[a], state.ids[b], float(state.dissim[a, b]), n)

    new_sq[a] = 0.0
    new_cl[a] = 0.0
    sq[a, :] = new_sq
    sq[:, a] = new_sq
    state.dissim[a, :] = np.sqrt(new_sq)
    state.dissim[:, a] = state.dissim[a, :]
    state.cl_dissim[a, :] = new_cl
    state.cl_dissim[:, a] = new_cl
    state.centroids[a] = (na * state.centroids[a] + nb * state.centroids[b]) / n
    state.sizes[a] = n
    state.members[a] = state.members[a] + state.members[b]
    state.ids[a] = len(state.points) + state.t

    keep = np.ones(state.n_clusters, dtype=bool)
    keep[b] = False
    state.sq_dissim = np.delete(np.delete(sq, b, axis=0), b, axis=1)
    state.dissim = np.delete(np.delete(state.dissim, b, axis=0), b, axis=1)
    state.cl_dissim = np.delete(np.delete(state.cl_dissim, b, axis=0), b, axis=1)
    state.centroids = state.centroids[keep]
    state.sizes = state.sizes[keep]
    del state.members[b]
    del state.ids[b]

    a_row = state.dissim[a] < state.d_max
    a_row[a] = False
    mask = np.delete(np.delete(state.mask, b, axis=0), b, axis=1)
    mask[a, :] = a_row
    mask[:, a] = a_row
    state.mask = mask
    degree = mask.sum(axis=1)
    if state.extra_degree is not None:
        extra = state.extra_degree[keep]
        extra[a] = _mbs_degree(state.centroids[a:a + 1], state.mbs_xy, state.d_max)[0]
        state.extra_degree = extra
        degree = degree + extra
    state.degree = degree
    state.t += 1
    return row


def merge_step(state: ClusterState, n_b: int, r_a: float) -> LinkageRow | None:
    """Merge the closest eligible pair. ``None`` when no pair is eligible."""
    if state.n_clusters < 2:
        return None
    vuln = state.vulnerable(n_b).astype(np.uint8)
    a, b = _kernels.hc_select_pair(state.dissim, state.cl_dissim,
                                   state.mask.view(np.uint8), vuln, float(r_a))
    if a < 0:
        return None
    return merge_pair(state, a, b)


@dataclass
class Placement:
    """DBS positions plus the GN association.

    ``association[j]`` lists the GN ids served by DBS ``j``; ``labels[n]`` is the
    DBS carrying GN ``n``'s load (-1 if none). ``uncovered`` lists GNs outside
    every coverage disk, which only happens for the K-means baseline or
    externally supplied placements.
    """

    dbs_positions: np.ndarray
    association: list[list[int]]
    uncovered: list[int]
    method: str
    labels: np.ndarray
    linkage: list[LinkageRow] = field(default_factory=list)
    inertia_trace: list[float] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.dbs_positions)

    def cluster_loads(self, gn_loads) -> np.ndarray:
        gn_loads = np.asarray(gn_loads, dtype=float)
        return np.array([gn_loads[members].sum() if members else 0.0
                         for members in self.association])

    def neighbor_counts(self, d_max: float) -> np.ndarray:
        m = _mask(pairwise_2d(self.dbs_positions[:, :2]), d_max)
        return m.sum(axis=1)

    def gn_distances(self, gns) -> np.ndarray:
        """Horizontal GN-to-serving-DBS distance (NaN for uncovered GNs)."""
        gns = np.asarray(gns, dtype=float)
        out = np.full(len(gns), np.nan)
        ok = self.labels >= 0
        d = gns[ok] - self.dbs_positions[self.labels[ok], :2]
        out[ok] = np.hypot(d[:, 0], d[:, 1])
        return out


def run_hc(gns, d_max: float, n_b: int, r_a: float = math.inf, h: float = 60.0,
           target_clusters: int | None = None, mbs_xy=None,
           count_mbs: bool = False) -> Placement:
    """Place DBSs by exhausting the eligible merges.

    ``target_clusters`` stops early once that many clusters remain (used by
    the sweeps over M). With ``count_mbs`` gateways inside ``d_max`` count
    toward a cluster's degree.
    """
    pts = np.asarray(gns, dtype=float).reshape(-1, 2)
    u = len(pts)
    state = init_state(pts, d_max, mbs_xy if count_mbs else None)
    linkage = []
    if u < n_b + 1:
        warnings.warn(f"U={u} < N_B+1={n_b + 1}: neighbour constraint unsatisfiable, no merges",
                      RuntimeWarning, stacklevel=2)
    else:
        while target_clusters is None or state.n_clusters > target_clusters:
            row = merge_step(state, n_b, r_a)
            if row is None:
                break
            linkage.append(row)
    labels = np.empty(u, dtype=np.int64)
    for j, members in enumerate(state.members):
        labels[members] = j
    pos = np.column_stack([state.centroids, np.full(state.n_clusters, float(h))])
    return Placement(pos, [sorted(m) for m in state.members], [], "HC", labels, linkage)


# --------------------------------------------------------------------------
# independent checks

def audit_linkage(gns, linkage: list[LinkageRow], d_max: float, n_b: int, r_a: float,
                  mbs_xy=None, count_mbs: bool = False) -> list[str]:
    """Replay a linkage log with brute-force bookkeeping.

    Centroids, complete-link distances and degrees are recomputed from member
    lists at every step, independently of the incremental updates. Returns a
    list of human-readable violations (empty when every merge was legal).
    """
    pts = np.asarray(gns, dtype=float).reshape(-1, 2)
    u = len(pts)
    clusters = {i: [i] for i in range(u)}
    order = list(range(u))
    problems = []
    for t, row in enumerate(linkage):
        ids = order
        cents = np.array([pts[clusters[c]].mean(axis=0) for c in ids])
        cd = pairwise_2d(cents)
        adj = cd < d_max
        np.fill_diagonal(adj, False)
        deg = adj.sum(axis=1)
        if count_mbs and mbs_xy is not None:
            deg = deg + _mbs_degree(cents, mbs_xy, d_max)
        if row.merged_a not in clusters or row.merged_b not in clusters:
            problems.append(f"merge {t}: unknown cluster id")
            break
        ia, ib = ids.index(row.merged_a), ids.index(row.merged_b)
        ma, mb = pts[clusters[row.merged_a]], pts[clusters[row.merged_b]]
        cross = np.hypot(ma[:, None, 0] - mb[None, :, 0], ma[:, None, 1] - mb[None, :, 1]).max()
        if not cross <= r_a:
            problems.append(f"merge {t}: complete-link {cross:.6f} > R_A {r_a}")
        for i in range(len(ids)):
            if i in (ia, ib):
                continue
            if (adj[i, ia] or adj[i, ib]) and not deg[i] > n_b:
                problems.append(f"merge {t}: neighbour cluster {ids[i]} has degree {deg[i]} <= N_B")
        if row.new_size != len(ma) + len(mb):
            problems.append(f"merge {t}: new_size {row.new_size} != {len(ma) + len(mb)}")
        new_id = u + t
        clusters[new_id] = clusters.pop(row.merged_a) + clusters.pop(row.merged_b)
        lo = min(ia, ib)
        order = [c for c in ids if c not in (row.merged_a, row.merged_b)]
        order.insert(lo, new_id)
    return problems


def brute_force_matrices(state: ClusterState) -> tuple[np.ndarray, np.ndarray]:
    """Centroid distances and complete-link distances recomputed from members."""
    cents = np.array([state.points[m].mean(axis=0) for m in state.members])
    d = pairwise_2d(cents)
    n = state.n_clusters
    cl = np.zeros((n, n))
    for a in range(n):
        pa = state.points[state.members[a]]
        for b in range(a + 1, n):
            pb = state.points[state.members[b]]
            cl[a, b] = cl[b, a] = np.hypot(pa[:, None, 0] - pb[None, :, 0],
                                           pa[:, None, 1] - pb[None, :, 1]).max()
    return d, cl


# --------------------------------------------------------------------------
# K-means++ baseline and association

def kmeans_plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # all remaining points coincide with a centre: pick an unused one
            free = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(free))
        chosen.append(idx)
        d2 = np.minimum(d2, ((x - x[idx]) ** 2).sum(axis=1))
    return x[chosen].copy()


def lloyd(x: np.ndarray, centres: np.ndarray, tol: float = 1e-6, max_iter: int = 300):
    """Lloyd iterations; returns ``(centres, labels, inertia_trace)``."""
    centres = centres.copy()
    trace = []
    labels = None
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centres[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        trace.append(float(d2[np.arange(len(x)), labels].sum()))
        new = centres.copy()
        for j in range(len(centres)):
            sel = labels == j
            if sel.any():
                new[j] = x[sel].mean(axis=0)
        shift = np.hypot(*(new - centres).T).max()
        centres = new
        if shift < tol:
            break
    d2 = ((x[:, None, :] - centres[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    trace.append(float(d2[np.arange(len(x)), labels].sum()))
    return centres, labels, trace


def kmeans_pp(gns, m: int, seed: int, h: float = 60.0, r_a: float = math.inf) -> Placement:
    """K-means with K-means++ seeding. GNs go to their nearest centroid.

    ``r_a`` is not enforced; GNs farther than ``r_a`` from their centroid are
    reported in ``uncovered`` while still counted in the centroid's load.
    """
    x = np.asarray(gns, dtype=float).reshape(-1, 2)
    if not 1 <= m <= len(x):
        raise ValueError(f"need 1 <= M <= U, got M={m}, U={len(x)}")
    rng = np.random.default_rng(seed)
    centres, labels, trace = lloyd(x, kmeans_plusplus_init(x, m, rng))
    assoc = [sorted(np.flatnonzero(labels == j).tolist()) for j in range(m)]
    dist = np.hypot(*(x - centres[labels]).T)
    uncovered = np.flatnonzero(~(dist < r_a)).tolist()
    pos = np.column_stack([centres, np.full(m, float(h))])
    return Placement(pos, assoc, uncovered, "KMEANS", labels.astype(np.int64),
                     inertia_trace=trace)


def associate(dbs_positions, gns, r_a: float) -> tuple[list[list[int]], list[int]]:
    """Assign each GN to the nearest DBS whose coverage disk contains it.

    Ties go to the lower DBS index. GNs inside no disk are returned as
    uncovered.
    """
    dbs = np.asarray(dbs_positions, dtype=float)[:, :2]
    x = np.asarray(gns, dtype=float).reshape(-1, 2)
    if len(dbs) == 0:
        raise ValueError("empty placement")
    diff = x[:, None, :] - dbs[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    covered = d < r_a
    d_masked = np.where(covered, d, np.inf)
    nearest = d_masked.argmin(axis=1)
    assoc = [[] for _ in range(len(dbs))]
    uncovered = []
    for n, j in enumerate(nearest):
        if covered[n, j]:
            assoc[j].append(n)
        else:
            uncovered.append(n)
    return assoc, uncovered


# --------------------------------------------------------------------------
# persistence

def write_linkage_csv(linkage: list[LinkageRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "dissimilarity", "new_size"])
        for r in linkage:
            w.writerow([r.merged_a, r.merged_b, repr(r.dissimilarity), r.new_size])


def read_linkage_csv(path) -> list[LinkageRow]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [LinkageRow(int(r["a"]), int(r["b"]), float(r["dissimilarity"]), int(r["new_size"]))
            for r in rows]


def format_placement(p: Placement) -> str:
    lines = ["# dbsplan placement",
             f"placement version=1 method={p.method} dbs_count={p.m} gn_count={len(p.labels)}"]
    for j, (x, y, h) in enumerate(p.dbs_positions):
        lines.append(f"dbs id={j} x={float(x)!r} y={float(y)!r} h={float(h)!r}")
    for n, j in enumerate(p.labels):
        lines.append(f"assoc gn={n} dbs={int(j)}")
    for n in p.uncovered:
        lines.append(f"uncovered gn={n}")
    return "\n".join(lines) + "\n"


def save_placement(p: Placement, path) -> None:
    Path(path).write_text(format_placement(p))


def parse_placement(text: str) -> Placement:
    from .scenario import ScenarioFormatError, parse_record, _check_fields, _num

    head = None
    dbs, labels, uncovered = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, kv = parse_record(line, lineno)
        if kind == "placement":
            _check_fields(kv, {"version", "method", "dbs_count", "gn_count"}, lineno)
            head = (kv.get("method", "HC"), _num(kv, "dbs_count", lineno, int),
                    _num(kv, "gn_count", lineno, int))
        elif head is None:
            raise ScenarioFormatError("record before header", lineno)
        elif kind == "dbs":
            _check_fields(kv, {"id", "x", "y", "h"}, lineno)
            dbs.append((_num(kv, "x", lineno), _num(kv, "y", lineno), _num(kv, "h", lineno)))
        elif kind == "assoc":
            _check_fields(kv, {"gn", "dbs"}, lineno)
            labels.append(_num(kv, "dbs", lineno, int))
        elif kind == "uncovered":
            _check_fields(kv, {"gn"}, lineno)
            uncovered.append(_num(kv, "gn", lineno, int))
        else:
            raise ScenarioFormatError(f"unknown record type {kind!r}", lineno)
    if head is None:
        raise ScenarioFormatError("missing header record")
    method, m, u = head
    if len(dbs) != m or len(labels) != u:
        raise ScenarioFormatError("record count does not match header (truncated?)")
    labels = np.array(labels, dtype=np.int64)
    assoc = [sorted(np.flatnonzero(labels == j).tolist()) for j in range(m)]
    return Placement(np.array(dbs, dtype=float).reshape(-1, 3), assoc, uncovered, method, labels)


def load_placement(path) -> Placement:
    return parse_placement(Path(path).read_text())
