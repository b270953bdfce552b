"""Vertex sampling for the uniform n-vertex model and its Poissonized variant.

Radial coordinates come from the exact inverse CDF of the model's radial
law; every vertex draws from its own counter-based substream, so point i is
the same whether the set is generated serially or in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import mix, uniforms
from .geometry import TWO_PI, ModelParams, PolarPoint

# probe substreams live far away from the vertex counters
_PROBE_STREAM_BASE = 1 << 62

POINTS_FORMAT = "rhg-points v1"


def radial_quantile(u, params: ModelParams):
    """Inverse radial CDF: arccosh(1 + u (cosh(alpha R) - 1)) / alpha.

    Accepts scalars or arrays; u must lie in [0, 1].
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr < 0) or np.any(u_arr > 1):
        raise ValueError("quantile argument must lie in [0, 1]")
    norm = math.cosh(params.alpha * params.R) - 1.0
    r = np.arccosh(1.0 + u_arr * norm) / params.alpha
    return float(r) if np.isscalar(u) else r


def sample_vertex(rng: np.random.Generator, params: ModelParams) -> PolarPoint:
    """One vertex from a sequential stream; consumes exactly two uniforms."""
    theta = TWO_PI * rng.random()
    r = radial_quantile(rng.random(), params)
    return PolarPoint(r=min(r, np.nextafter(params.R, 0.0)), theta=theta)


def _points_from_counters(params: ModelParams, seed: int, streams):
    """Coordinates for substream ids `streams` (one vertex per id)."""
    streams = np.asarray(streams, dtype=np.uint64)
    theta = TWO_PI * uniforms(seed, streams * np.uint64(2))
    u = uniforms(seed, streams * np.uint64(2) + np.uint64(1))
    r = radial_quantile(u, params)
    # u < 1 strictly, so r < R mathematically; guard the rounding edge
    r = np.minimum(r, np.nextafter(params.R, 0.0))
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    return r, theta


@dataclass(frozen=True)
class SampleSet:
    """An immutable drawn point set, plus optional tagged probe vertices."""

    r: np.ndarray
    theta: np.ndarray
    params: ModelParams
    seed: int
    model: str  # "uniform" | "poisson"
    probe_r: np.ndarray = field(default_factory=lambda: np.empty(0))
    probe_theta: np.ndarray = field(default_factory=lambda: np.empty(0))
    meta: dict = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return len(self.r)

    @property
    def n_probes(self) -> int:
        return len(self.probe_r)

    @property
    def n_total(self) -> int:
        return self.n_points + self.n_probes

    def all_r(self) -> np.ndarray:
        """Radii of points followed by probes (graph-builder ordering)."""
        return np.concatenate([self.r, self.probe_r])

    def all_theta(self) -> np.ndarray:
        return np.concatenate([self.theta, self.probe_theta])

    def point(self, i: int) -> PolarPoint:
        """Vertex i in builder ordering; indices >= n_points are probes."""
        if i < self.n_points:
            return PolarPoint(r=float(self.r[i]), theta=float(self.theta[i]))
        j = i - self.n_points
        return PolarPoint(r=float(self.probe_r[j]), theta=float(self.probe_theta[j]))


def sample_uniform_model(params: ModelParams, seed: int) -> SampleSet:
    """Exactly n i.i.d. points; vertex i keyed by (seed, i)."""
    r, theta = _points_from_counters(params, seed, np.arange(params.n))
    return SampleSet(r=r, theta=theta, params=params, seed=seed, model="uniform")


def _poisson_count(params: ModelParams, seed: int):
    """Draw N ~ Poisson(n): CDF inversion at toy scale, numpy otherwise."""
    n = params.n
    if n <= 10:
        u = float(uniforms(seed, np.uint64(_PROBE_STREAM_BASE - 1)))
        k, cdf, pmf = 0, math.exp(-n), math.exp(-n)
        while cdf < u and k < 100 * n + 100:
            k += 1
            pmf *= n / k
            cdf += pmf
        return k, "inversion"
    rng = np.random.Generator(np.random.Philox(key=int(mix(seed, 0))))
    return int(rng.poisson(n)), "numpy-philox"


def sample_poisson_model(params: ModelParams, seed: int) -> SampleSet:
    """N ~ Poisson(n) points; conditioned on N = n this is the uniform model."""
    count, method = _poisson_count(params, seed)
    r, theta = _points_from_counters(params, seed, np.arange(count))
    return SampleSet(
        r=r,
        theta=theta,
        params=params,
        seed=seed,
        model="poisson",
        meta={"poisson_count_method": method, "poisson_count": count},
    )


def probe_cap(params: ModelParams) -> int:
    """Probes must stay o(sqrt(n)); enforced as m <= n^0.45."""
    return int(params.n ** 0.45)


def add_probe(sample: SampleSet, probe: PolarPoint | None = None) -> SampleSet:
    """Return a new SampleSet with one probe appended.

    probe=None draws the probe from the model density using its own
    substream of the sample's seed.
    """
    m = sample.n_probes
    if m + 1 > probe_cap(sample.params):
        raise ValueError(
            f"probe cap exceeded: {m + 1} > n^0.45 = {probe_cap(sample.params)}"
        )
    if probe is None:
        r, theta = _points_from_counters(
            sample.params, sample.seed, np.array([_PROBE_STREAM_BASE + m])
        )
        pr, pt = float(r[0]), float(theta[0])
    else:
        if probe.r > sample.params.R:
            raise ValueError(f"probe radius {probe.r} exceeds R={sample.params.R}")
        pr, pt = probe.r, probe.theta
    return SampleSet(
        r=sample.r,
        theta=sample.theta,
        params=sample.params,
        seed=sample.seed,
        model=sample.model,
        probe_r=np.append(sample.probe_r, pr),
        probe_theta=np.append(sample.probe_theta, pt),
        meta=dict(sample.meta),
    )


def save_points(sample: SampleSet, path):
    """Write the points TSV (probes carry negative indices)."""
    p = sample.params
    with open(path, "w") as f:
        f.write(
            f"# {POINTS_FORMAT} alpha={p.alpha!r} C={p.C!r} n={p.n} R={p.R!r} "
            f"seed={sample.seed} model={sample.model} count={sample.n_points}\n"
        )
        for i in range(sample.n_points):
            f.write(f"{i}\t{sample.r[i]:.17g}\t{sample.theta[i]:.17g}\n")
        for j in range(sample.n_probes):
            f.write(
                f"{-(j + 1)}\t{sample.probe_r[j]:.17g}\t{sample.probe_theta[j]:.17g}\n"
            )


class PointsFormatError(ValueError):
    """Malformed or inconsistent points file."""


def load_points(path) -> SampleSet:
    """Read a points TSV written by save_points, validating the header."""
    with open(path) as f:
        header = f.readline().rstrip("\n")
        prefix = f"# {POINTS_FORMAT} "
        if not header.startswith(prefix):
            raise PointsFormatError(f"bad points header: {header!r}")
        fields = dict(tok.split("=", 1) for tok in header[len(prefix):].split())
        try:
            alpha = float(fields["alpha"])
            C = float(fields["C"])
            n = int(fields["n"])
            R = float(fields["R"])
            seed = int(fields["seed"])
            model = fields["model"]
            count = int(fields["count"])
        except (KeyError, ValueError) as e:
            raise PointsFormatError(f"bad points header fields: {e}") from e
        params = ModelParams(alpha=alpha, C=C, n=n)
        if not math.isclose(params.R, R, rel_tol=1e-12):
            raise PointsFormatError(
                f"header R={R} inconsistent with 2 ln n + C = {params.R}"
            )
        idx, rs, ts = [], [], []
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise PointsFormatError(f"bad points row: {line!r}")
            idx.append(int(parts[0]))
            rs.append(float(parts[1]))
            ts.append(float(parts[2]))
    point_rows = [k for k, i in enumerate(idx) if i >= 0]
    probe_rows = [k for k, i in enumerate(idx) if i < 0]
    if len(point_rows) != count:
        raise PointsFormatError(
            f"header count={count} but file has {len(point_rows)} point rows"
        )
    if [idx[k] for k in point_rows] != list(range(count)):
        raise PointsFormatError("point indices are not 0..count-1 in order")
    if [idx[k] for k in probe_rows] != [-(j + 1) for j in range(len(probe_rows))]:
        raise PointsFormatError("probe indices are not -1..-m in order")
    rs = np.asarray(rs)
    ts = np.asarray(ts)
    if np.any(rs > params.R) or np.any(rs < 0):
        raise PointsFormatError("radial coordinate outside [0, R]")
    # provenance spot-check: points are a pure function of the header
    # constants, so tampering with alpha/C/seed breaks reproduction
    if count > 0 and model in ("uniform", "poisson"):
        k = min(count, 4)
        want_r, want_t = _points_from_counters(params, seed, np.arange(k))
        got_r = rs[point_rows][:k]
        got_t = ts[point_rows][:k]
        if not (np.array_equal(want_r, got_r) and np.array_equal(want_t, got_t)):
            raise PointsFormatError(
                "points do not reproduce from header constants; header or "
                "payload has been altered"
            )
    return SampleSet(
        r=rs[point_rows],
        theta=ts[point_rows],
        params=params,
        seed=seed,
        model=model,
        probe_r=rs[probe_rows],
        probe_theta=ts[probe_rows],
    )
