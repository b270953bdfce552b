"""Analysis tests: components against a BFS-flood oracle, diameters,
center clique, distance to center, induced-path classification, degree
statistics, and the report schema.
"""

import json
import math

import numpy as np
import pytest

from rhglab.analysis import (
    _bfs_component,
    analyze,
    center_clique,
    component_diameter,
    component_vertices,
    connected_components,
    degree_stats,
    distance_to_center,
    induced_path_components,
    save_report,
    verify_induced_path,
)
from rhglab.geometry import ModelParams
from rhglab.graphs import Graph, _csr_from_edges, build_fast
from rhglab.sampler import SampleSet, sample_uniform_model

PARAMS = ModelParams(alpha=0.75, C=0.0, n=500)


def graph_from_edges(n, edges, params=PARAMS):
    """Graph with synthetic coordinates; only adjacency matters here."""
    s = SampleSet(
        r=np.full(n, params.R - 1.0),
        theta=np.linspace(0, 1, n, endpoint=False),
        params=params,
        seed=0,
        model="manual",
    )
    us = np.array([e[0] for e in edges], dtype=np.int64)
    vs = np.array([e[1] for e in edges], dtype=np.int64)
    indptr, indices = _csr_from_edges(n, us, vs)
    return Graph(sample=s, indptr=indptr, indices=indices, builder="manual")


def test_components_empty_graph():
    g = graph_from_edges(5, [])
    stats = connected_components(g)
    assert len(stats.sizes) == 5
    assert stats.giant_size == 1 and stats.second_size == 1
    assert list(stats.labels) == [0, 1, 2, 3, 4]


def test_components_labels_are_min_index():
    g = graph_from_edges(6, [(1, 4), (4, 5), (2, 3)])
    stats = connected_components(g)
    assert list(stats.labels) == [0, 1, 2, 2, 1, 1]
    assert stats.giant_size == 3 and stats.second_size == 2


def test_components_match_bfs_oracle():
    for seed in range(20):
        params = ModelParams(alpha=0.75, C=0.0, n=500)
        g = build_fast(sample_uniform_model(params, seed))
        stats = connected_components(g)
        seen = np.zeros(g.n_vertices, dtype=bool)
        for v in range(g.n_vertices):
            if seen[v]:
                continue
            comp = _bfs_component(g, v)
            seen[comp] = True
            assert np.all(stats.labels[comp] == stats.labels[v])
            assert int(comp.min()) == stats.labels[v]
            assert len(comp) == int(np.count_nonzero(stats.labels == stats.labels[v]))


def test_component_diameter_trivials():
    path3 = graph_from_edges(3, [(0, 1), (1, 2)])
    val, exact = component_diameter(path3, np.arange(3), mode="exact")
    assert (val, exact) == (2, True)
    clique = graph_from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert component_diameter(clique, np.arange(4), mode="exact") == (1, True)
    single = graph_from_edges(1, [])
    assert component_diameter(single, np.array([0]), mode="exact") == (0, True)


def test_double_sweep_lower_bound():
    for seed in range(10):
        g = build_fast(sample_uniform_model(PARAMS, seed))
        stats = connected_components(g)
        comp = component_vertices(stats, stats.giant_label)
        lo, lo_exact = component_diameter(g, comp, mode="double_sweep")
        hi, hi_exact = component_diameter(g, comp, mode="exact")
        assert not lo_exact and hi_exact
        assert lo <= hi


def test_component_diameter_cap():
    g = graph_from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        component_diameter(g, np.arange(3), mode="exact", cap=2)


def test_center_clique_and_distance():
    g = build_fast(sample_uniform_model(ModelParams(alpha=0.75, C=0.0, n=3000), 4))
    clique = center_clique(g)
    r = g.sample.all_r()
    assert np.all(r[clique] <= g.params.R / 2)
    dist = distance_to_center(g)
    assert np.all(dist[clique] == 0)
    for u in clique:
        for v in g.neighbors(int(u)):
            assert dist[v] <= 1
    # finite distance iff sharing a component with a clique vertex
    stats = connected_components(g)
    clique_labels = set(stats.labels[clique].tolist())
    for v in range(g.n_vertices):
        assert np.isfinite(dist[v]) == (stats.labels[v] in clique_labels)


def test_induced_path_classifier_trivials():
    g = graph_from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (5, 7)])
    paths = induced_path_components(g)
    lengths = sorted(p.length for p in paths)
    assert lengths == [4]  # the 5-path; the triangle is excluded
    assert verify_induced_path(g, paths[0].vertices)


def test_induced_path_cycle_excluded():
    g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert induced_path_components(g) == []


def test_induced_path_singleton():
    g = graph_from_edges(3, [(0, 1)])
    paths = induced_path_components(g)
    lengths = sorted(p.length for p in paths)
    assert lengths == [0, 1]


def exhaustive_path_check(g, members):
    """Oracle: induced subgraph on a component is a simple path."""
    k = len(members)
    if k == 1:
        return True
    deg = {int(v): sum(1 for w in g.neighbors(int(v)) if w in set(members)) for v in members}
    ones = [v for v in members if deg[int(v)] == 1]
    twos = [v for v in members if deg[int(v)] == 2]
    if len(ones) != 2 or len(twos) != k - 2:
        return False
    edges = sum(deg.values()) // 2
    return edges == k - 1


def test_induced_paths_match_exhaustive_oracle():
    for seed in range(20):
        g = build_fast(sample_uniform_model(PARAMS, seed))
        stats = connected_components(g)
        found = {tuple(sorted(p.vertices)) for p in induced_path_components(g, stats=stats)}
        expected = set()
        for label in np.unique(stats.labels):
            members = component_vertices(stats, label)
            if exhaustive_path_check(g, members):
                expected.add(tuple(sorted(int(v) for v in members)))
        assert found == expected


def test_band_tagging():
    params = ModelParams(alpha=0.75, C=0.0, n=500)
    R = params.R
    s = SampleSet(
        r=np.array([R - 0.25, R - 0.25, R - 5.0, R - 5.0]),
        theta=np.array([0.0, 0.1, 2.0, 2.1]),
        params=params,
        seed=0,
        model="manual",
    )
    indptr, indices = _csr_from_edges(4, np.array([0, 2]), np.array([1, 3]))
    g = Graph(sample=s, indptr=indptr, indices=indices, builder="manual")
    paths = induced_path_components(g, band=(0.2, 0.3))
    by_start = {p.vertices[0]: p for p in paths}
    assert by_start[0].in_band
    assert not by_start[2].in_band


def test_degree_stats():
    clique = graph_from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    d = degree_stats(clique)
    assert int(d.histogram.sum()) == 4
    assert d.histogram[3] == 4
    g = build_fast(sample_uniform_model(PARAMS, 1))
    d1 = degree_stats(g)
    d2 = degree_stats(g)
    assert d1.tail_slope == d2.tail_slope
    assert int(d1.histogram.sum()) == g.n_vertices


def test_analyze_report_schema(tmp_path):
    g = build_fast(sample_uniform_model(PARAMS, 2))
    report = analyze(g)
    assert report["schema"] == "rhg-report v1"
    assert report["params"]["n"] == PARAMS.n
    assert sum(report["component_sizes"]) <= g.n_vertices
    assert report["giant_size"] >= report["second_size"]
    clique = center_clique(g, verify=False)
    assert report["center_clique"]["size"] == len(clique)
    if len(clique) > 0:
        assert report["giant_size"] >= report["center_clique"]["size"]
    path = tmp_path / "rep.json"
    save_report(report, path)
    assert json.loads(path.read_text())["schema"] == "rhg-report v1"
