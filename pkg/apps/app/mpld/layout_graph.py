"""
Decomposition graph: conflict edges between features closer than the
spacing, stitch candidates that split features into segments, and the
simplification that peels off trivially colorable vertices.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import networkx as nx
import numpy as np

from app.mpld.errors import InvariantViolationError, LayoutValidationError, ParameterError
from app.mpld.layout_io import Layout, Rect
from app.mpld.solution import Edge, Solution, build_solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Vertex:
    id: int
    feature_id: int
    segment_index: int
    geometry: Rect


@dataclass(frozen=True)
class LayoutGraph:
    vertices: tuple[Vertex, ...]
    conflict_edges: tuple[Edge, ...]
    stitch_edges: tuple[Edge, ...] = ()
    k: int = 3
    alpha: Fraction = Fraction(1, 10)
    spacing_nm: int = 120

    @cached_property
    def conflict_neighbors(self) -> list[list[int]]:
        nbrs = [[] for _ in self.vertices]
        for u, v in self.conflict_edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return nbrs

    @cached_property
    def stitched(self) -> frozenset[int]:
        return frozenset(x for e in self.stitch_edges for x in e)

    @property
    def num_edges(self) -> int:
        return len(self.conflict_edges) + len(self.stitch_edges)


@dataclass(frozen=True)
class Component:
    """Connected piece of the simplified graph, keyed by original vertex ids"""

    id: int
    vertices: tuple[Vertex, ...]
    conflict_edges: tuple[Edge, ...]
    stitch_edges: tuple[Edge, ...]

    @property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.vertices)


@dataclass(frozen=True)
class SimplifiedGraph:
    graph: LayoutGraph
    components: tuple[Component, ...]
    hidden_stack: tuple[tuple[int, frozenset[int]], ...] = field(default=())


# =============================
# Geometry
# =============================
def rect_distance_sq(a: Rect, b: Rect) -> int:
    dx = max(0, b.x_lo - a.x_hi, a.x_lo - b.x_hi)
    dy = max(0, b.y_lo - a.y_hi, a.y_lo - b.y_hi)
    return dx * dx + dy * dy


def stitch_cut(a: Rect, b: Rect) -> int:
    """Coordinate of the shared boundary between two adjacent segments"""
    if a.x_hi == b.x_lo and a.y_lo == b.y_lo:
        return a.x_hi
    if b.x_hi == a.x_lo and a.y_lo == b.y_lo:
        return b.x_hi
    if a.y_hi == b.y_lo:
        return a.y_hi
    if b.y_hi == a.y_lo:
        return b.y_hi
    raise InvariantViolationError(f"segments {a} and {b} do not share a boundary")


def _conflict_pairs(rects: Sequence[Rect], spacing: int) -> list[tuple[int, int]]:
    """Index pairs (i, j) of rects closer than ``spacing``, via a sweep over x_lo"""
    n = len(rects)
    if n < 2:
        return []
    coords = np.array([(r.x_lo, r.y_lo, r.x_hi, r.y_hi) for r in rects], dtype=np.int64)
    order = np.argsort(coords[:, 0], kind="stable")
    xs_lo, ys_lo, xs_hi, ys_hi = (coords[order, c] for c in range(4))
    # candidates of i are the rects starting before x_hi[i] + spacing
    limits = np.searchsorted(xs_lo, xs_hi + spacing, side="left")
    spacing_sq = spacing * spacing

    pairs = []
    for i in range(n - 1):
        stop = limits[i]
        if stop <= i + 1:
            continue
        j = np.arange(i + 1, stop)
        dx = np.maximum(0, xs_lo[j] - xs_hi[i])
        dy = np.maximum(0, np.maximum(ys_lo[j] - ys_hi[i], ys_lo[i] - ys_hi[j]))
        overlap = (xs_lo[j] < xs_hi[i]) & (ys_lo[j] < ys_hi[i]) & (ys_lo[i] < ys_hi[j])
        if overlap.any():
            other = rects[order[j[np.argmax(overlap)]]]
            raise LayoutValidationError(
                f"rects {rects[order[i]].id} and {other.id} overlap"
            )
        hit = j[dx * dx + dy * dy < spacing_sq]
        pairs.extend((int(order[i]), int(order[h])) for h in hit)
    return pairs


# =============================
# Construction
# =============================
def build_layout_graph(layout: Layout) -> LayoutGraph:
    rects = sorted(layout.rects, key=lambda r: r.id)
    vertices = tuple(Vertex(id=i, feature_id=r.id, segment_index=0, geometry=r) for i, r in enumerate(rects))
    edges = sorted((min(a, b), max(a, b)) for a, b in _conflict_pairs(rects, layout.spacing_nm))
    logger.debug(f"Layout graph: {len(vertices)} vertices, {len(edges)} conflict edges")
    return LayoutGraph(
        vertices=vertices,
        conflict_edges=tuple(edges),
        k=layout.k,
        alpha=layout.alpha,
        spacing_nm=layout.spacing_nm,
    )


def _split_axis(rect: Rect) -> str:
    return "x" if rect.width >= rect.height else "y"


def _extent(rect: Rect, axis: str) -> tuple[int, int]:
    return (rect.x_lo, rect.x_hi) if axis == "x" else (rect.y_lo, rect.y_hi)


def _projection(seg: Rect, other: Rect, axis: str) -> tuple[int, int]:
    lo, hi = _extent(seg, axis)
    o_lo, o_hi = _extent(other, axis)
    p_lo, p_hi = max(lo, o_lo), min(hi, o_hi)
    if p_lo <= p_hi:
        return p_lo, p_hi
    point = lo if o_hi < lo else hi
    return point, point


def _best_cut(seg: Rect, neighbors: Sequence[Rect], axis: str):
    """Midpoint of the widest clean gap between neighbor projections, or None"""
    if len(neighbors) < 2:
        return None
    intervals = sorted(_projection(seg, n, axis) for n in neighbors)
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    best = None
    for left, right in zip(merged, merged[1:]):
        gap_lo, gap_hi = left[1], right[0]
        if gap_hi - gap_lo < 2:
            continue
        if best is None or gap_hi - gap_lo > best[1] - best[0]:
            best = (gap_lo, gap_hi)
    if best is None:
        return None
    return (best[0] + best[1]) // 2


def _cut(seg: Rect, at: int, axis: str) -> tuple[Rect, Rect]:
    if axis == "x":
        return (
            Rect(id=seg.id, x_lo=seg.x_lo, y_lo=seg.y_lo, x_hi=at, y_hi=seg.y_hi),
            Rect(id=seg.id, x_lo=at, y_lo=seg.y_lo, x_hi=seg.x_hi, y_hi=seg.y_hi),
        )
    return (
        Rect(id=seg.id, x_lo=seg.x_lo, y_lo=seg.y_lo, x_hi=seg.x_hi, y_hi=at),
        Rect(id=seg.id, x_lo=seg.x_lo, y_lo=at, x_hi=seg.x_hi, y_hi=seg.y_hi),
    )


def insert_stitch_candidates(graph: LayoutGraph, stitch_cap: int = 2) -> LayoutGraph:
    """Split features at clean gaps between their conflict neighbors.

    Features are visited in id order, repeatedly, until a full pass inserts
    nothing. A feature never grows beyond ``stitch_cap`` segments and every
    segment keeps the feature's original long axis.
    """
    if stitch_cap < 1:
        raise ParameterError(f"stitch_cap must be >= 1, got {stitch_cap}")
    if graph.stitch_edges:
        raise InvariantViolationError("graph already carries stitch edges")

    spacing_sq = graph.spacing_nm * graph.spacing_nm
    features = [v.feature_id for v in graph.vertices]
    pieces: dict[int, list[Rect]] = {v.feature_id: [v.geometry] for v in graph.vertices}
    axis = {v.feature_id: _split_axis(v.geometry) for v in graph.vertices}
    feature_nbrs: dict[int, list[int]] = {f: [] for f in features}
    for u, v in graph.conflict_edges:
        fu, fv = graph.vertices[u].feature_id, graph.vertices[v].feature_id
        feature_nbrs[fu].append(fv)
        feature_nbrs[fv].append(fu)

    def segment_neighbors(feature: int, seg: Rect) -> list[Rect]:
        return [
            other
            for g in feature_nbrs[feature]
            for other in pieces[g]
            if rect_distance_sq(seg, other) < spacing_sq
        ]

    inserted = 0
    changed = stitch_cap > 1
    while changed:
        changed = False
        for f in features:
            index = 0
            while index < len(pieces[f]) and len(pieces[f]) < stitch_cap:
                seg = pieces[f][index]
                at = _best_cut(seg, segment_neighbors(f, seg), axis[f])
                if at is None:
                    index += 1
                    continue
                pieces[f][index:index + 1] = list(_cut(seg, at, axis[f]))
                inserted += 1
                changed = True
    logger.debug(f"Inserted {inserted} stitch candidate(s)")

    vertices = []
    first_vertex: dict[int, int] = {}
    for f in sorted(features):
        first_vertex[f] = len(vertices)
        for s, rect in enumerate(pieces[f]):
            vertices.append(Vertex(id=len(vertices), feature_id=f, segment_index=s, geometry=rect))

    stitch_edges = [
        (first_vertex[f] + s, first_vertex[f] + s + 1)
        for f in sorted(features)
        for s in range(len(pieces[f]) - 1)
    ]
    conflict_edges = []
    for u, v in graph.conflict_edges:
        fu, fv = graph.vertices[u].feature_id, graph.vertices[v].feature_id
        for su, a in enumerate(pieces[fu]):
            for sv, b in enumerate(pieces[fv]):
                if rect_distance_sq(a, b) < spacing_sq:
                    x, y = first_vertex[fu] + su, first_vertex[fv] + sv
                    conflict_edges.append((min(x, y), max(x, y)))

    return LayoutGraph(
        vertices=tuple(vertices),
        conflict_edges=tuple(sorted(conflict_edges)),
        stitch_edges=tuple(sorted(stitch_edges)),
        k=graph.k,
        alpha=graph.alpha,
        spacing_nm=graph.spacing_nm,
    )


# =============================
# Simplification
# =============================
def simplify_graph(graph: LayoutGraph) -> SimplifiedGraph:
    """Hide stitch-free vertices with fewer than k remaining conflict neighbors,
    then split what is left into connected components."""
    n = len(graph.vertices)
    nbrs = graph.conflict_neighbors
    stitched = graph.stitched
    hidden = [False] * n
    degree = [len(x) for x in nbrs]
    stack = []

    changed = True
    while changed:
        changed = False
        for v in range(n):
            if hidden[v] or v in stitched or degree[v] >= graph.k:
                continue
            remaining = frozenset(u for u in nbrs[v] if not hidden[u])
            hidden[v] = True
            stack.append((v, remaining))
            for u in remaining:
                degree[u] -= 1
            changed = True

    remaining_graph = nx.Graph()
    remaining_graph.add_nodes_from(v for v in range(n) if not hidden[v])
    remaining_graph.add_edges_from(
        (u, v) for u, v in (*graph.conflict_edges, *graph.stitch_edges) if not hidden[u] and not hidden[v]
    )
    groups = sorted(sorted(c) for c in nx.connected_components(remaining_graph))
    label = [-1] * n
    for cid, members in enumerate(groups):
        for v in members:
            label[v] = cid

    component_ce = [[] for _ in groups]
    component_se = [[] for _ in groups]
    for edges, bucket in ((graph.conflict_edges, component_ce), (graph.stitch_edges, component_se)):
        for u, v in edges:
            if label[u] >= 0 and label[u] == label[v]:
                bucket[label[u]].append((u, v))

    components = tuple(
        Component(
            id=cid,
            vertices=tuple(graph.vertices[v] for v in members),
            conflict_edges=tuple(component_ce[cid]),
            stitch_edges=tuple(component_se[cid]),
        )
        for cid, members in enumerate(groups)
    )
    logger.debug(f"Simplified: {len(stack)} hidden, {len(components)} component(s)")
    return SimplifiedGraph(graph=graph, components=components, hidden_stack=tuple(stack))


def recover_colors(simplified: SimplifiedGraph, component_solutions: Sequence[Mapping[int, int] | Solution]) -> Solution:
    """Merge component colorings and give hidden vertices, in reverse hiding
    order, the smallest color their colored conflict neighbors leave free."""
    graph = simplified.graph
    if len(component_solutions) != len(simplified.components):
        raise InvariantViolationError(
            f"expected {len(simplified.components)} component solutions, got {len(component_solutions)}"
        )

    colors: dict[int, int] = {}
    proven, nodes, candidates = True, 0, []
    for component, sol in zip(simplified.components, component_solutions):
        mapping = sol.colors if isinstance(sol, Solution) else sol
        if isinstance(sol, Solution):
            proven = proven and sol.proven_optimal
            nodes += sol.nodes_expanded
            candidates.extend(sol.conflict_candidates)
        for v in component.vertex_ids:
            if v not in mapping:
                raise InvariantViolationError(f"component {component.id} solution misses vertex {v}")
            colors[v] = mapping[v]

    nbrs = graph.conflict_neighbors
    for v, _ in reversed(simplified.hidden_stack):
        used = {colors[u] for u in nbrs[v] if u in colors}
        free = next((c for c in range(graph.k) if c not in used), None)
        if free is None:
            raise InvariantViolationError(f"hidden vertex {v} has no free color")
        colors[v] = free

    if len(colors) != len(graph.vertices):
        raise InvariantViolationError("recovered coloring does not cover every vertex")
    return build_solution(
        colors,
        graph.conflict_edges,
        graph.stitch_edges,
        graph.alpha,
        proven_optimal=proven,
        nodes_expanded=nodes,
        conflict_candidates=sorted(candidates),
    )
