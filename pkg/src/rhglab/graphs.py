"""Graph construction: edge iff hyperbolic distance <= R.

Two builders share one edge predicate (geometry.cos_threshold compared
against cos of the raw angle difference), so their edge sets are identical
bit-for-bit: a quadratic all-pairs oracle and an angular-sweep builder whose
candidate windows come from the exact per-pair angular threshold.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ModelParams, max_angle_for_edge_array
from .sampler import SampleSet, load_points, save_points

EDGES_FORMAT = "rhg-edges v1"

NAIVE_SIZE_GUARD = 50_000


@dataclass(frozen=True)
class Graph:
    """Immutable vertex coordinates plus CSR adjacency, with provenance."""

    sample: SampleSet
    indptr: np.ndarray
    indices: np.ndarray
    builder: str

    @property
    def n_vertices(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def params(self) -> ModelParams:
        return self.sample.params

    @property
    def seed(self) -> int:
        return self.sample.seed

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edge_array(self) -> np.ndarray:
        """(m, 2) array of edges with u < v, lexicographically sorted."""
        n = self.n_vertices
        us = np.repeat(np.arange(n), np.diff(self.indptr))
        vs = self.indices
        keep = us < vs
        return np.column_stack([us[keep], vs[keep]])


def _csr_from_edges(n: int, us: np.ndarray, vs: np.ndarray) -> tuple:
    """Symmetric CSR (indptr, indices) from one-directional edge lists."""
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64)


def _edge_mask(cos_dtheta, cosh_u, sinh_u, cosh_v, sinh_v, cosh_R):
    """The canonical predicate, vectorized: cos(dtheta) >= threshold.

    Pairs with sinh product 0 or cosh product <= cosh R are always edges.
    """
    den = sinh_u * sinh_v
    num = cosh_u * cosh_v - cosh_R
    always = (den == 0.0) | (num <= -den)  # covers r_u + r_v <= R and r = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        mask = cos_dtheta * den >= num
    return np.where(always, True, mask)


def build_naive(sample: SampleSet, params: ModelParams | None = None,
                override_size_guard: bool = False) -> Graph:
    """All-pairs edge test; quadratic, guarded at 5e4 vertices."""
    params = params or sample.params
    n = sample.n_total
    if n > NAIVE_SIZE_GUARD and not override_size_guard:
        raise ValueError(
            f"{n} vertices exceeds naive-builder guard {NAIVE_SIZE_GUARD}; "
            "pass override_size_guard=True to force"
        )
    r = sample.all_r()
    theta = sample.all_theta()
    cosh_r = np.cosh(r)
    sinh_r = np.sinh(r)
    cosh_R = math.cosh(params.R)
    us_parts, vs_parts = [], []
    block = max(1, int(4e6 // max(n, 1)) or 1)
    for start in range(0, n, block):
        stop = min(start + block, n)
        i = np.arange(start, stop)
        cos_dt = np.cos(theta[i, None] - theta[None, :])
        mask = _edge_mask(
            cos_dt,
            cosh_r[i, None], sinh_r[i, None],
            cosh_r[None, :], sinh_r[None, :],
            cosh_R,
        )
        mask &= i[:, None] < np.arange(n)[None, :]
        ui, vi = np.nonzero(mask)
        us_parts.append(i[ui])
        vs_parts.append(vi)
    us = np.concatenate(us_parts) if us_parts else np.empty(0, dtype=np.int64)
    vs = np.concatenate(vs_parts) if vs_parts else np.empty(0, dtype=np.int64)
    indptr, indices = _csr_from_edges(n, us, vs)
    return Graph(sample=sample, indptr=indptr, indices=indices, builder="naive")


def build_fast(sample: SampleSet, params: ModelParams | None = None) -> Graph:
    """Angular-sweep builder; edge set identical to build_naive.

    Vertices with r <= R/2 (which may connect at any angle) are tested
    against everything; the rest only against candidates inside the sorted
    angular window given by the exact threshold against the smallest
    possible partner radius.
    """
    params = params or sample.params
    n = sample.n_total
    if n == 0:
        return Graph(
            sample=sample,
            indptr=np.zeros(1, dtype=np.int64),
            indices=np.empty(0, dtype=np.int64),
            builder="fast",
        )
    r = sample.all_r()
    theta = sample.all_theta()
    cosh_r = np.cosh(r)
    sinh_r = np.sinh(r)
    cosh_R = math.cosh(params.R)
    half_R = params.R / 2.0

    core = np.flatnonzero(r <= half_R)
    outer = np.flatnonzero(r > half_R)
    us_parts, vs_parts = [], []

    # core pass owns every pair with a core endpoint: core-core pairs from
    # the smaller index, core-outer pairs always from the core side
    all_idx = np.arange(n)
    is_outer = r > half_R
    for u in core:
        v = all_idx[(all_idx > u) | (is_outer & (all_idx < u))]
        if len(v) == 0:
            continue
        cos_dt = np.cos(theta[u] - theta[v])
        mask = _edge_mask(cos_dt, cosh_r[u], sinh_r[u], cosh_r[v], sinh_r[v], cosh_R)
        hit = v[mask]
        us_parts.append(np.full(len(hit), u, dtype=np.int64))
        vs_parts.append(hit)

    # outer pass: sweep over vertices sorted by angle
    if len(outer) > 0:
        order = outer[np.argsort(theta[outer], kind="stable")]
        theta_sorted = theta[order]
        m = len(order)
        # window bound: partners in this pass have r > max(R/2, min outer r)
        r_ref = max(half_R, float(r[outer].min()))
        windows = max_angle_for_edge_array(r[order], r_ref, params)
        for pos in range(m):
            u = order[pos]
            w = windows[pos]
            if w >= math.pi:
                cand = order[order > u]
            else:
                lo = np.searchsorted(theta_sorted, theta_sorted[pos] - w, side="left")
                hi = np.searchsorted(theta_sorted, theta_sorted[pos] + w, side="right")
                cand = order[lo:hi]
                # circular wrap at either end of the sorted array
                if theta_sorted[pos] - w < 0:
                    lo2 = np.searchsorted(
                        theta_sorted, theta_sorted[pos] - w + 2 * math.pi, side="left"
                    )
                    cand = np.concatenate([cand, order[lo2:]])
                if theta_sorted[pos] + w >= 2 * math.pi:
                    hi2 = np.searchsorted(
                        theta_sorted, theta_sorted[pos] + w - 2 * math.pi, side="right"
                    )
                    cand = np.concatenate([cand, order[:hi2]])
                cand = cand[cand > u]
            if len(cand) == 0:
                continue
            # core partners were handled in the core pass
            cand = cand[r[cand] > half_R]
            if len(cand) == 0:
                continue
            cos_dt = np.cos(theta[u] - theta[cand])
            mask = _edge_mask(
                cos_dt, cosh_r[u], sinh_r[u], cosh_r[cand], sinh_r[cand], cosh_R
            )
            hit = cand[mask]
            us_parts.append(np.full(len(hit), u, dtype=np.int64))
            vs_parts.append(hit)

    us = np.concatenate(us_parts) if us_parts else np.empty(0, dtype=np.int64)
    vs = np.concatenate(vs_parts) if vs_parts else np.empty(0, dtype=np.int64)
    indptr, indices = _csr_from_edges(n, us, vs)
    return Graph(sample=sample, indptr=indptr, indices=indices, builder="fast")


def build(sample: SampleSet, builder: str = "fast") -> Graph:
    if builder == "fast":
        return build_fast(sample)
    if builder == "naive":
        return build_naive(sample)
    raise ValueError(f"unknown builder {builder!r}")


# ---------------------------------------------------------------------------
# persistence: graph bundle = points file + edge file

class GraphFormatError(ValueError):
    """Malformed or inconsistent graph bundle."""


def _edge_payload(edges: np.ndarray) -> bytes:
    return "".join(f"{u}\t{v}\n" for u, v in edges).encode()


def save_edges(g: Graph, path):
    edges = g.edge_array()
    payload = _edge_payload(edges)
    checksum = hashlib.sha256(payload).hexdigest()[:16]
    with open(path, "wb") as f:
        f.write(f"# {EDGES_FORMAT} count={len(edges)} checksum={checksum}\n".encode())
        f.write(payload)


def load_edges(path, n_vertices: int):
    with open(path, "rb") as f:
        header = f.readline().decode().rstrip("\n")
        prefix = f"# {EDGES_FORMAT} "
        if not header.startswith(prefix):
            raise GraphFormatError(f"bad edges header: {header!r}")
        fields = dict(tok.split("=", 1) for tok in header[len(prefix):].split())
        try:
            count = int(fields["count"])
            checksum = fields["checksum"]
        except (KeyError, ValueError) as e:
            raise GraphFormatError(f"bad edges header fields: {e}") from e
        payload = f.read()
    if hashlib.sha256(payload).hexdigest()[:16] != checksum:
        raise GraphFormatError("edge payload checksum mismatch")
    lines = payload.decode().splitlines()
    if len(lines) != count:
        raise GraphFormatError(f"header count={count} but {len(lines)} edge rows")
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    try:
        edges = np.array([[int(a) for a in line.split("\t")] for line in lines], dtype=np.int64)
    except ValueError as e:
        raise GraphFormatError(f"bad edge row: {e}") from e
    if edges.shape[1] != 2 or np.any(edges[:, 0] >= edges[:, 1]):
        raise GraphFormatError("edges must be u < v pairs")
    if np.any(edges < 0) or np.any(edges >= n_vertices):
        raise GraphFormatError("edge endpoint out of vertex range")
    return edges


def save_graph(g: Graph, prefix):
    """Write `<prefix>.points.tsv` and `<prefix>.edges.tsv`."""
    save_points(g.sample, f"{prefix}.points.tsv")
    save_edges(g, f"{prefix}.edges.tsv")


def load_graph(prefix, builder: str = "loaded") -> Graph:
    sample = load_points(f"{prefix}.points.tsv")
    edges = load_edges(f"{prefix}.edges.tsv", sample.n_total)
    indptr, indices = _csr_from_edges(sample.n_total, edges[:, 0], edges[:, 1])
    return Graph(sample=sample, indptr=indptr, indices=indices, builder=builder)
