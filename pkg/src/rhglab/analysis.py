"""Structural analytics on a built graph: components, diameters, the
center clique, hop distance to it, induced path components, and degree
statistics, with a JSON report writer.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .graphs import Graph

EXACT_DIAMETER_CAP = 30_000
REPORT_SCHEMA = "rhg-report v1"


class UnionFind:
    """Array-based union-find with path compression and union by size."""

    def __init__(self, size: int):
        self.parent = np.arange(size, dtype=np.int64)
        self.size = np.ones(size, dtype=np.int64)
        self.n_components = size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.n_components -= 1


def _csr_matrix(g: Graph) -> sparse.csr_matrix:
    n = g.n_vertices
    data = np.ones(len(g.indices), dtype=np.int8)
    return sparse.csr_matrix((data, g.indices, g.indptr), shape=(n, n))


@dataclass
class ComponentStats:
    labels: np.ndarray        # component id per vertex = min vertex index inside
    sizes: np.ndarray         # sorted descending
    giant_size: int
    second_size: int
    giant_label: int
    giant_diameter: float | None = None
    giant_diameter_exact: bool | None = None
    center_clique_size: int | None = None
    longest_induced_path_overall: int | None = None
    longest_induced_path_in_band: int | None = None


def connected_components(g: Graph) -> ComponentStats:
    """Disjoint-set partition; component ids are min member indices."""
    n = g.n_vertices
    uf = UnionFind(n)
    us = np.repeat(np.arange(n), np.diff(g.indptr))
    for u, v in zip(us.tolist(), g.indices.tolist()):
        if u < v:
            uf.union(u, v)
    roots = np.array([uf.find(v) for v in range(n)], dtype=np.int64)
    # relabel each component by its minimum vertex index
    labels = np.full(n, -1, dtype=np.int64)
    min_index = {}
    for v in range(n):
        r = roots[v]
        if r not in min_index:
            min_index[r] = v  # first occurrence is the minimum index
    for v in range(n):
        labels[v] = min_index[roots[v]]
    uniq, counts = np.unique(labels, return_counts=True)
    order = np.argsort(-counts, kind="stable")
    sizes = counts[order]
    giant_label = int(uniq[order[0]]) if n > 0 else -1
    return ComponentStats(
        labels=labels,
        sizes=sizes,
        giant_size=int(sizes[0]) if n > 0 else 0,
        second_size=int(sizes[1]) if len(sizes) > 1 else 0,
        giant_label=giant_label,
    )


def component_vertices(stats: ComponentStats, label: int) -> np.ndarray:
    return np.flatnonzero(stats.labels == label)


def component_diameter(g: Graph, component: np.ndarray, mode: str = "exact",
                       cap: int = EXACT_DIAMETER_CAP):
    """Diameter of one component: (value, exact_flag).

    exact: max BFS eccentricity over all members (size-capped).
    double_sweep: repeated farthest-point BFS; a lower bound only.
    """
    component = np.asarray(component)
    k = len(component)
    if k <= 1:
        return 0, True
    sub = _csr_matrix(g)[component][:, component]
    if mode == "exact":
        if k > cap:
            raise ValueError(f"component size {k} exceeds exact-mode cap {cap}")
        best = 0.0
        chunk = max(1, int(2e7 // max(k, 1)))
        for start in range(0, k, chunk):
            idx = np.arange(start, min(start + chunk, k))
            dist = csgraph.dijkstra(sub, unweighted=True, indices=idx)
            finite = dist[np.isfinite(dist)]
            if len(finite):
                best = max(best, float(finite.max()))
        return int(best), True
    if mode == "double_sweep":
        src = 0
        best = 0
        for _ in range(4):
            dist = csgraph.dijkstra(sub, unweighted=True, indices=src)
            dist[~np.isfinite(dist)] = -1
            far = int(np.argmax(dist))
            ecc = int(dist[far])
            if ecc <= best and far == src:
                break
            best = max(best, ecc)
            if far == src:
                break
            src = far
        return best, False
    raise ValueError(f"unknown mode {mode!r}")


def center_clique(g: Graph, verify: bool = True, verify_cap: int = 2000) -> np.ndarray:
    """Vertices with r <= R/2; optionally asserts pairwise adjacency."""
    r = g.sample.all_r()
    members = np.flatnonzero(r <= g.params.R / 2.0)
    if verify and len(members) <= verify_cap:
        for i, u in enumerate(members):
            nb = g.neighbors(u)
            for v in members[i + 1:]:
                if not np.any(nb == v):
                    raise AssertionError(
                        f"center-clique violation: vertices {u} and {v} not adjacent"
                    )
    return members


def distance_to_center(g: Graph, clique: np.ndarray | None = None) -> np.ndarray:
    """Hop count to the nearest center-clique vertex; inf when unreachable."""
    n = g.n_vertices
    if clique is None:
        clique = center_clique(g, verify=False)
    dist = np.full(n, np.inf)
    if len(clique) == 0:
        return dist
    dist[clique] = 0.0
    frontier = np.asarray(clique)
    level = 0
    while len(frontier):
        level += 1
        # gather all neighbors of the frontier in one CSR pass
        starts = g.indptr[frontier]
        stops = g.indptr[frontier + 1]
        total = int((stops - starts).sum())
        if total == 0:
            break
        nbrs = np.concatenate([g.indices[a:b] for a, b in zip(starts, stops)])
        nbrs = np.unique(nbrs)
        new = nbrs[~np.isfinite(dist[nbrs])]
        if len(new) == 0:
            break
        dist[new] = level
        frontier = new
    return dist


def _bfs_component(g: Graph, start: int) -> np.ndarray:
    """Plain BFS flood from start (independent oracle for components)."""
    seen = np.zeros(g.n_vertices, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return np.flatnonzero(seen)


@dataclass
class InducedPath:
    vertices: list          # path order, endpoints first/last
    length: int             # edge count; singleton component has length 0
    in_band: bool


def induced_path_components(g: Graph, band: tuple | None = None,
                            stats: ComponentStats | None = None):
    """Components whose induced subgraph is a simple path.

    Returns a list of InducedPath.  A singleton counts as length 0.  When
    `band` = (c1, c2) is given, in_band marks paths with every radius in
    [R - c2, R - c1].
    """
    if stats is None:
        stats = connected_components(g)
    deg = g.degrees()
    r = g.sample.all_r()
    R = g.params.R
    out = []
    for label in np.unique(stats.labels):
        members = component_vertices(stats, label)
        k = len(members)
        if k == 1:
            path = [int(members[0])]
        else:
            d = deg[members]
            # path iff exactly two endpoints of degree 1, rest degree 2,
            # and edge count k - 1 (excludes cycles)
            if not (np.count_nonzero(d == 1) == 2 and np.count_nonzero(d == 2) == k - 2):
                continue
            if int(d.sum()) // 2 != k - 1:
                continue
            # walk from one endpoint
            start = int(members[d == 1][0])
            path = [start]
            prev = -1
            cur = start
            while len(path) < k:
                nxt = [int(v) for v in g.neighbors(cur) if v != prev]
                if len(nxt) != 1:
                    path = None
                    break
                prev, cur = cur, nxt[0]
                path.append(cur)
            if path is None:
                continue
        in_band = False
        if band is not None:
            c1, c2 = band
            rv = r[path]
            in_band = bool(np.all((rv >= R - c2) & (rv <= R - c1)))
        out.append(InducedPath(vertices=path, length=len(path) - 1, in_band=in_band))
    return out


def verify_induced_path(g: Graph, path: list) -> bool:
    """Re-check a reported path: consecutive adjacent, the rest non-adjacent."""
    for i, u in enumerate(path):
        for j in range(i + 1, len(path)):
            v = path[j]
            adjacent = g.has_edge(u, v)
            if j == i + 1 and not adjacent:
                return False
            if j > i + 1 and adjacent:
                return False
    return True


@dataclass
class DegreeStats:
    histogram: np.ndarray      # counts per degree value, index = degree
    ccdf_degrees: np.ndarray
    ccdf: np.ndarray
    tail_window: tuple
    tail_slope: float | None   # least-squares slope of log CCDF vs log degree


def degree_stats(g: Graph, tail_window: tuple | None = None) -> DegreeStats:
    """Degree histogram, empirical CCDF, and a log-log tail slope.

    The slope is a descriptive fit over the configured window; no
    distributional exponent is claimed.
    """
    deg = g.degrees()
    hist = np.bincount(deg) if len(deg) else np.zeros(1, dtype=np.int64)
    degrees = np.arange(len(hist))
    n = max(len(deg), 1)
    ccdf = np.cumsum(hist[::-1])[::-1] / n  # P(D >= k)
    if tail_window is None:
        dmax = int(deg.max()) if len(deg) else 0
        tail_window = (max(3, dmax // 10), dmax)
    lo, hi = tail_window
    mask = (degrees >= lo) & (degrees <= hi) & (ccdf > 0) & (degrees > 0)
    slope = None
    if np.count_nonzero(mask) >= 2:
        x = np.log(degrees[mask].astype(float))
        y = np.log(ccdf[mask])
        slope = float(np.polyfit(x, y, 1)[0])
    return DegreeStats(
        histogram=hist,
        ccdf_degrees=degrees,
        ccdf=ccdf,
        tail_window=tail_window,
        tail_slope=slope,
    )


def analyze(g: Graph, band: tuple = (0.2, 0.3), diameter_cap: int = EXACT_DIAMETER_CAP) -> dict:
    """Full per-run structural report (schema rhg-report v1)."""
    timings = {}
    t0 = time.perf_counter()
    stats = connected_components(g)
    timings["components_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    giant = component_vertices(stats, stats.giant_label) if g.n_vertices else np.empty(0, dtype=int)
    if len(giant) == 0:
        diam, exact = 0, True
    elif len(giant) <= diameter_cap:
        diam, exact = component_diameter(g, giant, mode="exact", cap=diameter_cap)
    else:
        diam, exact = component_diameter(g, giant, mode="double_sweep")
    timings["diameter_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    clique = center_clique(g, verify=True)
    timings["clique_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    paths = induced_path_components(g, band=band, stats=stats)
    nontrivial = [p.length for p in paths if p.length >= 1]
    in_band = [p.length for p in paths if p.in_band and p.length >= 1]
    timings["paths_s"] = time.perf_counter() - t0

    dstats = degree_stats(g)
    p = g.params
    return {
        "schema": REPORT_SCHEMA,
        "params": {"alpha": p.alpha, "C": p.C, "n": p.n, "R": p.R},
        "seed": g.seed,
        "model": g.sample.model,
        "builder": g.builder,
        "component_sizes": [int(s) for s in stats.sizes[:100]],
        "component_count": int(len(stats.sizes)),
        "giant_size": stats.giant_size,
        "second_size": stats.second_size,
        "giant_diameter": {"value": int(diam), "exact": bool(exact)},
        "center_clique": {"size": int(len(clique)), "verified": True},
        "longest_induced_path": {
            "overall": max(nontrivial) if nontrivial else 0,
            "in_band": max(in_band) if in_band else 0,
        },
        "degree_tail": {
            "window": [int(dstats.tail_window[0]), int(dstats.tail_window[1])],
            "slope": dstats.tail_slope,
        },
        "timings": {k: round(v, 6) for k, v in timings.items()},
    }


def save_report(report: dict, path):
    with open(path, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
