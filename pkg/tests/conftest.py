from fractions import Fraction

import numpy as np
import pytest

from app.mpld.layout_graph import Component, LayoutGraph, Vertex
from app.mpld.layout_io import Rect
from settings import get_settings

# A long bar, a tall bar and two pads: a 4-clique that one stitch on the
# long bar resolves.
STITCHABLE_CLIQUE = """\
# four features, spacing 120
K 3
SPACING 120
ALPHA 0.1
RECT 0 0 0 400 40
RECT 1 100 60 140 500
RECT 2 144 159 184 199
RECT 3 216 159 256 199
"""

# Two copies of the stitchable clique, 600 apart: each needs its own stitch.
TWIN_STITCHABLE_CLIQUES = STITCHABLE_CLIQUE + """\
RECT 4 1000 0 1400 40
RECT 5 1100 60 1140 500
RECT 6 1144 159 1184 199
RECT 7 1216 159 1256 199
"""

# Same features after stitch insertion, but wired so that both long
# features must be stitched: optimum cost 2 * alpha.
TWO_STITCH_FEATURES = [0, 0, 1, 1, 2, 3]
TWO_STITCH_CE = [(0, 3), (0, 4), (1, 2), (1, 4), (1, 5), (2, 5), (3, 4), (3, 5), (4, 5)]
TWO_STITCH_SE = [(0, 1), (2, 3)]


def make_graph(features, conflict_edges, stitch_edges=(), k=3, alpha=Fraction(1, 10)) -> LayoutGraph:
    """Hand-built graph; vertex i belongs to ``features[i]`` and ids must follow (feature, segment) order"""
    vertices = []
    seen: dict[int, int] = {}
    for i, f in enumerate(features):
        segment = seen.get(f, 0)
        seen[f] = segment + 1
        geometry = Rect(id=f, x_lo=100 * i, y_lo=0, x_hi=100 * i + 50, y_hi=50)
        vertices.append(Vertex(id=i, feature_id=f, segment_index=segment, geometry=geometry))
    return LayoutGraph(
        vertices=tuple(vertices),
        conflict_edges=tuple(sorted(tuple(sorted(e)) for e in conflict_edges)),
        stitch_edges=tuple(sorted(tuple(sorted(e)) for e in stitch_edges)),
        k=k,
        alpha=alpha,
    )


def whole_component(graph: LayoutGraph, component_id: int = 0) -> Component:
    return Component(
        id=component_id,
        vertices=graph.vertices,
        conflict_edges=graph.conflict_edges,
        stitch_edges=graph.stitch_edges,
    )


def random_component(rng, max_vertices=8, k=None):
    """Random component with single- and two-segment features"""
    k = k or int(rng.integers(2, 5))
    features = []
    feature = 0
    while len(features) < max_vertices:
        segments = 2 if rng.random() < 0.3 and len(features) + 2 <= max_vertices else 1
        features.extend([feature] * segments)
        feature += 1
        if rng.random() < 0.15:
            break
    n = len(features)
    stitches = [(i, i + 1) for i in range(n - 1) if features[i] == features[i + 1]]
    density = rng.uniform(0.2, 0.8)
    conflicts = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if features[i] != features[j] and rng.random() < density
    ]
    alpha = Fraction(int(rng.integers(0, 4)), int(rng.integers(1, 5)))
    graph = make_graph(features, conflicts, stitches, k=k, alpha=alpha)
    return graph, whole_component(graph)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_stitch_graph():
    return make_graph(TWO_STITCH_FEATURES, TWO_STITCH_CE, TWO_STITCH_SE)


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for var in ("MPLD_LOG", "MPLD_K", "MPLD_SPACING", "MPLD_ALPHA", "MPLD_ENGINE", "MPLD_WORKERS",
                "MPLD_ITEMS_PER_GROUP", "MPLD_STITCH_CAP", "MPLD_NODE_BUDGET"):
        monkeypatch.delenv(var, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
