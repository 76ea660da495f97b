import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainlift.errors import ChainliftError, ParseError
from chainlift.space import (
    build_scale_graph,
    is_chain_connected,
    load_point_cloud,
    sample_circle,
    space_to_csv,
    wedge_graph_space,
)

from conftest import bfs_dist, chord


def test_load_csv_collinear_points():
    space = load_point_cloud("0\n1\n2\n", "csv")
    assert space.n_points == 3
    assert space.dist[0][2] == 2.0


def test_load_empty_stream_rejected():
    with pytest.raises(ParseError, match="no points"):
        load_point_cloud("", "csv")
    with pytest.raises(ParseError, match="no points"):
        load_point_cloud("# only a comment\n", "csv")


def test_load_malformed_row_reports_line():
    with pytest.raises(ParseError, match="line 3"):
        load_point_cloud("0,0\n1,0\nbogus,x\n", "csv")


def test_load_ragged_row_rejected():
    with pytest.raises(ParseError, match="line 2"):
        load_point_cloud("0,0\n1\n", "csv")


def test_duplicate_points_rejected_with_indices():
    with pytest.raises(ChainliftError, match=r"0.*2|2.*0"):
        load_point_cloud("0,0\n1,0\n0,0\n", "csv")


def test_csv_round_trip_bit_for_bit():
    space = sample_circle(12, 1.0)
    reloaded = load_point_cloud(space_to_csv(space), "csv")
    assert reloaded.dist == space.dist
    assert reloaded.coords == space.coords


def test_json_explicit_table_and_basepoint():
    payload = {
        "points": [[0], [1], [2], [3]],
        "dist": [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]],
        "basepoint": 2,
    }
    space = load_point_cloud(json.dumps(payload), "json")
    assert space.metric_kind == "explicit-table"
    assert space.basepoint == 2
    assert space.dist[0][3] == 1.0


def test_sample_circle_chords():
    space = sample_circle(12, 1.0)
    # closed form: 2 r sin(pi/n) = 0.5176380902050415 for n=12
    assert space.dist[0][1] == pytest.approx(0.517638, abs=1e-6)
    assert space.dist[0][1] == pytest.approx(chord(12, 1), abs=0)
    assert sample_circle(4, 1.0).dist[0][1] == pytest.approx(math.sqrt(2.0))
    # closed form gives 0.0523539 for n=120
    assert sample_circle(120, 1.0).dist[0][1] == pytest.approx(chord(120, 1), abs=0)
    assert sample_circle(120, 1.0).dist[0][1] == pytest.approx(0.0523539, abs=1e-6)


def test_sample_circle_needs_three_points():
    with pytest.raises(ChainliftError):
        sample_circle(2, 1.0)


def test_wedge_vertex_and_edge_counts():
    space = wedge_graph_space([6, 6])
    assert space.n_points == 11
    graph = build_scale_graph(space, 1.5, 0)
    assert len(graph.edges) == 12


def test_wedge_triangle_is_unit_diameter():
    space = wedge_graph_space([3])
    assert max(max(row) for row in space.dist) == 1.0


def test_wedge_hop_distances_match_bfs_oracle():
    space = wedge_graph_space([4, 5])
    graph = build_scale_graph(space, 1.5, 0)
    for src in range(space.n_points):
        oracle = bfs_dist(space.n_points, graph.edges, src)
        assert [space.dist[src][v] for v in range(space.n_points)] == [
            float(d) for d in oracle
        ]
    # antipode of the 4-cycle sits two hops from the shared basepoint
    assert space.dist[2][0] == 2.0


def test_wedge_rejects_bad_input():
    with pytest.raises(ChainliftError):
        wedge_graph_space([])
    with pytest.raises(ChainliftError):
        wedge_graph_space([2])


def test_scale_graph_edges_at_known_scales():
    space = sample_circle(12, 1.0)
    assert len(build_scale_graph(space, 0.6, 0).edges) == 12
    assert len(build_scale_graph(space, 1.1, 0).edges) == 24
    # diameter 2 < 2.1: complete graph
    assert len(build_scale_graph(space, 2.1, 0).edges) == 12 * 11 // 2


def test_scale_graph_edge_relation_matches_rescan():
    space = sample_circle(12, 1.0)
    graph = build_scale_graph(space, 1.1, 0)
    for p in range(12):
        for q in range(p + 1, 12):
            assert graph.has_edge(p, q) == space.closer_than(p, q, 1.1)
            assert graph.has_edge(q, p) == graph.has_edge(p, q)
        assert not graph.has_edge(p, p)


def test_chain_connectivity_examples(cycle_graph):
    assert is_chain_connected(cycle_graph)
    space = sample_circle(12, 1.0)
    assert not is_chain_connected(build_scale_graph(space, 0.4, 0))
    wedge = wedge_graph_space([6, 6])
    assert is_chain_connected(build_scale_graph(wedge, 1.5, 0))


def test_strict_threshold_excludes_ties():
    # hop metric realizes distance 1 exactly; epsilon=1 must exclude it
    space = wedge_graph_space([3])
    assert len(build_scale_graph(space, 1.0, 0).edges) == 0
    assert len(build_scale_graph(space, 1.0000001, 0).edges) == 3


@given(st.integers(min_value=4, max_value=24), st.integers(min_value=1, max_value=40))
@settings(max_examples=40, deadline=None)
def test_circle_cycle_window(n, numer):
    """In the window between first and second chords the graph is an n-cycle.

    Vacuous for n=3 where the two chords coincide.
    """
    eps = chord(n, 1) + (chord(n, 2) - chord(n, 1)) * numer / 41.0
    graph = build_scale_graph(sample_circle(n, 1.0), eps, 0)
    assert len(graph.edges) == n
    assert all(len(graph.neighbors(v)) == 2 for v in range(n))


@given(st.floats(min_value=0.1, max_value=2.2), st.floats(min_value=0.0, max_value=0.5))
@settings(max_examples=30, deadline=None)
def test_scale_monotonicity(eps, bump):
    space = sample_circle(10, 1.0)
    fine = build_scale_graph(space, eps, 0)
    coarse = build_scale_graph(space, eps + bump, 0)
    assert set(fine.edges) <= set(coarse.edges)
