from fractions import Fraction

import pytest

from app.mpld.cover_matrix import build_cover_matrix
from app.mpld.errors import InvariantViolationError, LayoutValidationError, ParameterError
from app.mpld.layout_graph import (
    build_layout_graph,
    insert_stitch_candidates,
    rect_distance_sq,
    recover_colors,
    simplify_graph,
    stitch_cut,
)
from app.mpld.layout_io import Layout, Rect, parse_layout
from app.mpld.oracle import brute_force_oracle
from app.mpld.solution import score_assignment
from conftest import STITCHABLE_CLIQUE, make_graph, random_component, whole_component


def grid_layout(rng, cells=6, spacing=60):
    """Random rects, one per grid cell, never overlapping"""
    rects = []
    for i in range(cells):
        for j in range(cells):
            if rng.random() < 0.3:
                continue
            x, y = 100 * i, 100 * j
            w, h = int(rng.integers(5, 90)), int(rng.integers(5, 90))
            rects.append(Rect(id=len(rects), x_lo=x, y_lo=y, x_hi=x + w, y_hi=y + h))
    return Layout(rects=rects, spacing_nm=spacing)


def test_clique_layout_builds_k4():
    graph = build_layout_graph(parse_layout(STITCHABLE_CLIQUE))
    assert [v.feature_id for v in graph.vertices] == [0, 1, 2, 3]
    assert graph.conflict_edges == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    assert graph.stitch_edges == ()
    assert graph.num_edges == 6


def test_distance_is_strictly_below_spacing():
    # exactly one spacing apart is legal
    layout = Layout(rects=[
        Rect(id=0, x_lo=0, y_lo=0, x_hi=10, y_hi=10),
        Rect(id=1, x_lo=130, y_lo=0, x_hi=140, y_hi=10),
        Rect(id=2, x_lo=0, y_lo=129, x_hi=10, y_hi=140),
    ])
    graph = build_layout_graph(layout)
    assert graph.conflict_edges == ((0, 2),)


def test_corner_distance_is_euclidean():
    a = Rect(id=0, x_lo=0, y_lo=0, x_hi=10, y_hi=10)
    b = Rect(id=1, x_lo=100, y_lo=100, x_hi=110, y_hi=110)
    assert rect_distance_sq(a, b) == 2 * 90 * 90
    graph = build_layout_graph(Layout(rects=[a, b], spacing_nm=128))
    assert graph.conflict_edges == ((0, 1),)
    graph = build_layout_graph(Layout(rects=[a, b], spacing_nm=127))
    assert graph.conflict_edges == ()


def test_sweep_matches_pairwise_distances(rng):
    for _ in range(20):
        layout = grid_layout(rng)
        graph = build_layout_graph(layout)
        rects = sorted(layout.rects, key=lambda r: r.id)
        expected = tuple(
            (i, j)
            for i in range(len(rects))
            for j in range(i + 1, len(rects))
            if rect_distance_sq(rects[i], rects[j]) < layout.spacing_nm ** 2
        )
        assert graph.conflict_edges == expected


def test_overlap_is_rejected():
    layout = Layout(rects=[
        Rect(id=4, x_lo=0, y_lo=0, x_hi=50, y_hi=50),
        Rect(id=9, x_lo=40, y_lo=40, x_hi=90, y_hi=90),
    ])
    with pytest.raises(LayoutValidationError) as err:
        build_layout_graph(layout)
    assert "4" in str(err.value) and "9" in str(err.value)


def test_touching_rects_do_not_overlap():
    layout = Layout(rects=[
        Rect(id=0, x_lo=0, y_lo=0, x_hi=50, y_hi=50),
        Rect(id=1, x_lo=50, y_lo=0, x_hi=90, y_hi=50),
    ])
    assert build_layout_graph(layout).conflict_edges == ((0, 1),)


def test_stitch_insertion_splits_long_features():
    graph = insert_stitch_candidates(build_layout_graph(parse_layout(STITCHABLE_CLIQUE)))
    assert [(v.feature_id, v.segment_index) for v in graph.vertices] == [
        (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (3, 0),
    ]
    assert graph.stitch_edges == ((0, 1), (2, 3))
    assert graph.conflict_edges == (
        (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5),
    )
    assert graph.num_edges == 13

    a1, a2, b1, b2 = (graph.vertices[i].geometry for i in range(4))
    assert stitch_cut(a1, a2) == 200
    assert stitch_cut(b1, b2) == 109
    assert (a1.x_lo, a1.x_hi, a2.x_lo, a2.x_hi) == (0, 200, 200, 400)


def test_stitch_cap_one_keeps_features_whole():
    base = build_layout_graph(parse_layout(STITCHABLE_CLIQUE))
    graph = insert_stitch_candidates(base, stitch_cap=1)
    assert graph.vertices == base.vertices
    assert graph.stitch_edges == ()


def test_stitch_cap_must_be_positive():
    base = build_layout_graph(parse_layout(STITCHABLE_CLIQUE))
    with pytest.raises(ParameterError):
        insert_stitch_candidates(base, stitch_cap=0)


def test_segments_respect_cap(rng):
    for cap in (2, 3):
        for _ in range(10):
            graph = insert_stitch_candidates(build_layout_graph(grid_layout(rng, spacing=150)), stitch_cap=cap)
            counts: dict[int, int] = {}
            for v in graph.vertices:
                counts[v.feature_id] = counts.get(v.feature_id, 0) + 1
            assert max(counts.values()) <= cap
            assert len(graph.stitch_edges) == sum(c - 1 for c in counts.values())


def test_no_gap_means_no_stitch():
    # the neighbors' projections on the bar overlap
    layout = Layout(rects=[
        Rect(id=0, x_lo=0, y_lo=0, x_hi=300, y_hi=20),
        Rect(id=1, x_lo=100, y_lo=60, x_hi=140, y_hi=100),
        Rect(id=2, x_lo=120, y_lo=-100, x_hi=160, y_hi=-60),
    ])
    graph = insert_stitch_candidates(build_layout_graph(layout))
    assert graph.stitch_edges == ()


def test_stitch_cut_requires_shared_boundary():
    a = Rect(id=0, x_lo=0, y_lo=0, x_hi=10, y_hi=10)
    b = Rect(id=0, x_lo=20, y_lo=0, x_hi=30, y_hi=10)
    with pytest.raises(InvariantViolationError):
        stitch_cut(a, b)


def test_path_is_hidden_and_recovered():
    graph = make_graph([0, 1, 2], [(0, 1), (1, 2)])
    simplified = simplify_graph(graph)
    assert simplified.components == ()
    assert [v for v, _ in simplified.hidden_stack] == [0, 1, 2]

    solution = recover_colors(simplified, [])
    assert solution.color_vector() == (0, 1, 0)
    assert solution.cost == 0


def test_stitched_and_dense_vertices_stay():
    graph = make_graph([0, 0, 1, 1, 2, 3],
                       [(0, 3), (0, 4), (1, 2), (1, 4), (1, 5), (2, 5), (3, 4), (3, 5), (4, 5)],
                       [(0, 1), (2, 3)])
    simplified = simplify_graph(graph)
    assert simplified.hidden_stack == ()
    assert len(simplified.components) == 1
    assert simplified.components[0].vertex_ids == (0, 1, 2, 3, 4, 5)


def test_components_split_on_disconnection():
    # two K4s plus a pendant vertex
    k4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    edges = k4 + [(a + 4, b + 4) for a, b in k4] + [(0, 8)]
    simplified = simplify_graph(make_graph(list(range(9)), edges))
    assert [c.vertex_ids for c in simplified.components] == [(0, 1, 2, 3), (4, 5, 6, 7)]
    assert simplified.hidden_stack == ((8, frozenset({0})),)
    assert simplified.components[1].conflict_edges == tuple((a + 4, b + 4) for a, b in k4)


def test_interleaved_components_are_ordered_by_lowest_vertex():
    evens, odds = [0, 2, 4, 6], [1, 3, 5, 7]
    edges = [(a, b) for group in (odds, evens) for i, a in enumerate(group) for b in group[i + 1:]]
    simplified = simplify_graph(make_graph(list(range(8)), edges))
    assert [c.id for c in simplified.components] == [0, 1]
    assert [c.vertex_ids for c in simplified.components] == [tuple(evens), tuple(odds)]


def test_recovery_keeps_cost(rng):
    for _ in range(30):
        graph, _ = random_component(rng, max_vertices=8)
        simplified = simplify_graph(graph)
        solutions = [brute_force_oracle(c, graph.k, graph.alpha) for c in simplified.components]
        recovered = recover_colors(simplified, solutions)
        whole = brute_force_oracle(whole_component(graph), graph.k, graph.alpha)
        assert recovered.cost == whole.cost
        assert score_assignment(recovered.colors, graph.conflict_edges, graph.stitch_edges, graph.alpha)[2] == recovered.cost
        # matrix construction accepts every component
        for component in simplified.components:
            build_cover_matrix(component, graph.k, graph.alpha)


def test_recovery_checks_solution_count():
    simplified = simplify_graph(make_graph([0, 0, 1], [(0, 2), (1, 2)], [(0, 1)]))
    with pytest.raises(InvariantViolationError):
        recover_colors(simplified, [])


def test_recovery_rejects_missing_vertex():
    simplified = simplify_graph(make_graph([0, 0, 1], [(0, 2), (1, 2)], [(0, 1)], k=2))
    assert len(simplified.components) == 1
    with pytest.raises(InvariantViolationError):
        recover_colors(simplified, [{0: 0, 1: 0}])


def test_graph_keeps_layout_parameters():
    layout = Layout(rects=[Rect(id=0, x_lo=0, y_lo=0, x_hi=5, y_hi=5)], k=4, spacing_nm=90, alpha=Fraction(1, 3))
    graph = insert_stitch_candidates(build_layout_graph(layout))
    assert (graph.k, graph.spacing_nm, graph.alpha) == (4, 90, Fraction(1, 3))
