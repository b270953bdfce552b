"""Sampler tests: quantile round trip, distributional fidelity, counter
determinism, probes, and the points file format.
"""

import math

import numpy as np
import pytest

from rhglab.geometry import ModelParams, PolarPoint
from rhglab.measure import mu_ball_origin_exact
from rhglab.sampler import (
    PointsFormatError,
    add_probe,
    load_points,
    probe_cap,
    radial_quantile,
    sample_poisson_model,
    sample_uniform_model,
    sample_vertex,
    save_points,
    _points_from_counters,
)

PARAMS = ModelParams(alpha=0.75, C=0.0, n=1000)


def test_quantile_endpoints():
    assert radial_quantile(0.0, PARAMS) == 0.0
    assert abs(radial_quantile(1.0, PARAMS) - PARAMS.R) < 1e-12 * PARAMS.R


def test_quantile_domain():
    with pytest.raises(ValueError):
        radial_quantile(-0.01, PARAMS)
    with pytest.raises(ValueError):
        radial_quantile(1.01, PARAMS)


def test_quantile_cdf_round_trip():
    rng = np.random.default_rng(0)
    u = rng.random(10_000)
    r = radial_quantile(u, PARAMS)
    back = np.array([mu_ball_origin_exact(x, PARAMS) for x in r[:500]])
    assert np.max(np.abs(back - u[:500])) < 1e-12


def test_sample_vertex_two_uniforms():
    rng1 = np.random.default_rng(42)
    rng2 = np.random.default_rng(42)
    p = sample_vertex(rng1, PARAMS)
    t = 2 * math.pi * rng2.random()
    r = radial_quantile(rng2.random(), PARAMS)
    assert p.theta == t
    assert p.r == min(r, np.nextafter(PARAMS.R, 0.0))
    # stream advanced by exactly two draws
    assert rng1.random() == rng2.random()


def test_uniform_model_count_and_bounds():
    s = sample_uniform_model(PARAMS, 3)
    assert s.n_points == PARAMS.n
    assert np.all(s.r < PARAMS.R)
    assert np.all(s.r >= 0)
    assert np.all(s.theta >= 0) and np.all(s.theta < 2 * math.pi)


def test_counter_substreams_batch_independent():
    """Point i is the same whether drawn alone or inside the full batch."""
    s = sample_uniform_model(PARAMS, 9)
    for i in (0, 17, 999):
        r, theta = _points_from_counters(PARAMS, 9, [i])
        assert r[0] == s.r[i]
        assert theta[0] == s.theta[i]


def test_fixed_seed_reproducible():
    a = sample_uniform_model(PARAMS, 5)
    b = sample_uniform_model(PARAMS, 5)
    assert np.array_equal(a.r, b.r) and np.array_equal(a.theta, b.theta)
    c = sample_uniform_model(PARAMS, 6)
    assert not np.array_equal(a.r, c.r)


def test_radial_ks_statistic():
    params = ModelParams(alpha=0.75, C=0.0, n=1_000_000)
    s = sample_uniform_model(params, 11)
    r = np.sort(s.r)
    cdf = (np.cosh(params.alpha * r) - 1.0) / (math.cosh(params.alpha * params.R) - 1.0)
    k = len(r)
    emp_hi = np.arange(1, k + 1) / k
    emp_lo = np.arange(0, k) / k
    ks = max(np.max(np.abs(emp_hi - cdf)), np.max(np.abs(cdf - emp_lo)))
    assert ks < 0.002


def test_angle_uniformity_chi2():
    s = sample_uniform_model(ModelParams(alpha=0.75, C=0.0, n=100_000), 12)
    bins = 50
    counts, _ = np.histogram(s.theta, bins=bins, range=(0, 2 * math.pi))
    expected = len(s.theta) / bins
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    # 99.9% quantile of chi2 with 49 dof is ~85.4
    assert chi2 < 85.4


def test_poisson_model_mean():
    params = ModelParams(alpha=0.75, C=0.0, n=10_000)
    counts = [sample_poisson_model(params, seed).n_points for seed in range(200)]
    mean = float(np.mean(counts))
    assert abs(mean - params.n) <= 4.0 * math.sqrt(params.n / 200)
    assert sample_poisson_model(params, 0).meta["poisson_count_method"] == "numpy-philox"


def test_poisson_toy_inversion():
    params = ModelParams(alpha=0.75, C=8.0, n=5)
    s = sample_poisson_model(params, 1)
    assert s.meta["poisson_count_method"] == "inversion"
    assert s.n_points >= 0


def test_probe_cap_and_tagging():
    s = sample_uniform_model(PARAMS, 2)
    cap = probe_cap(PARAMS)
    assert cap == int(PARAMS.n ** 0.45)
    s2 = add_probe(s, PolarPoint(r=PARAMS.R - 1.0, theta=0.0))
    assert s2.n_probes == 1 and s2.n_points == PARAMS.n
    assert s2.probe_r[0] == PARAMS.R - 1.0
    assert s.n_probes == 0  # original untouched
    for _ in range(cap - 1):
        s2 = add_probe(s2)
    with pytest.raises(ValueError):
        add_probe(s2)


def test_probe_model_draw_deterministic():
    s = add_probe(sample_uniform_model(PARAMS, 2))
    t = add_probe(sample_uniform_model(PARAMS, 2))
    assert s.probe_r[0] == t.probe_r[0]
    assert s.probe_theta[0] == t.probe_theta[0]


def test_points_round_trip(tmp_path):
    s = add_probe(sample_uniform_model(PARAMS, 4), PolarPoint(r=PARAMS.R - 1, theta=0.5))
    path = tmp_path / "p.tsv"
    save_points(s, path)
    t = load_points(path)
    assert t.params == s.params
    assert t.seed == s.seed and t.model == s.model
    assert np.array_equal(t.r, s.r) and np.array_equal(t.theta, s.theta)
    assert np.array_equal(t.probe_r, s.probe_r)


def test_points_bad_header(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("# not-a-points-file\n0\t1.0\t1.0\n")
    with pytest.raises(PointsFormatError):
        load_points(path)


def test_points_inconsistent_radius_header(tmp_path):
    s = sample_uniform_model(ModelParams(alpha=0.75, C=0.0, n=10), 0)
    path = tmp_path / "p.tsv"
    save_points(s, path)
    lines = path.read_text().splitlines()
    lines[0] = lines[0].replace("R=", "R=9", 1)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(PointsFormatError):
        load_points(path)


def test_points_truncated(tmp_path):
    s = sample_uniform_model(ModelParams(alpha=0.75, C=0.0, n=10), 0)
    path = tmp_path / "p.tsv"
    save_points(s, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-2]) + "\n")
    with pytest.raises(PointsFormatError):
        load_points(path)
