"""
Exact-cover encoding of one component.

Each feature is a column. A feature with ``s`` segments owns ``k**s`` rows,
one per color configuration, enumerated in lexicographic order so that row
order inside a column matches color-vector order. Two rows of different
columns conflict when a conflict edge joins segments they color alike.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from app.mpld.errors import ParameterError
from app.mpld.layout_graph import Component
from app.mpld.solution import Edge

logger = logging.getLogger(__name__)

MAX_ROWS_PER_COLUMN = 4096


@dataclass(frozen=True)
class CoverRow:
    feature_column: int
    color_config: tuple[int, ...]
    stitch_cost: int
    conflict_row_ids: tuple[int, ...]


@dataclass(frozen=True)
class CoverMatrix:
    k: int
    alpha: Fraction
    rows: tuple[CoverRow, ...]
    column_rows: tuple[tuple[int, int], ...]
    column_order: tuple[int, ...]
    # graph vertex ids of each column's segments, in segment order
    column_vertices: tuple[tuple[int, ...], ...]
    # (own segment, other column, other segment) per conflict edge
    column_conflicts: tuple[tuple[tuple[int, int, int], ...], ...]
    conflict_edges: tuple[Edge, ...] = ()
    stitch_edges: tuple[Edge, ...] = ()
    component_id: int = 0

    @property
    def num_columns(self) -> int:
        return len(self.column_rows)

    def rows_of(self, column: int) -> range:
        start, end = self.column_rows[column]
        return range(start, end)


def build_cover_matrix(component: Component, k: int, alpha: Fraction = Fraction(1, 10)) -> CoverMatrix:
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")

    features = sorted({v.feature_id for v in component.vertices})
    column_of = {f: c for c, f in enumerate(features)}
    segments: list[list[int]] = [[] for _ in features]
    for v in sorted(component.vertices, key=lambda v: (v.feature_id, v.segment_index)):
        segments[column_of[v.feature_id]].append(v.id)
    locate = {vid: (c, s) for c, segs in enumerate(segments) for s, vid in enumerate(segs)}

    inner_stitches: list[list[tuple[int, int]]] = [[] for _ in features]
    for u, v in component.stitch_edges:
        (cu, su), (cv, sv) = locate[u], locate[v]
        if cu != cv:
            raise ParameterError(f"stitch edge ({u}, {v}) joins different features")
        inner_stitches[cu].append((su, sv))

    conflicts: list[list[tuple[int, int, int]]] = [[] for _ in features]
    for u, v in component.conflict_edges:
        (cu, su), (cv, sv) = locate[u], locate[v]
        if cu == cv:
            raise ParameterError(f"conflict edge ({u}, {v}) lies inside feature {features[cu]}")
        conflicts[cu].append((su, cv, sv))
        conflicts[cv].append((sv, cu, su))

    configs: list[list[tuple[int, ...]]] = []
    column_rows = []
    start = 0
    for c, segs in enumerate(segments):
        if k ** len(segs) > MAX_ROWS_PER_COLUMN:
            raise ParameterError(
                f"feature {features[c]} has {len(segs)} segments; {k}^{len(segs)} rows exceed {MAX_ROWS_PER_COLUMN}"
            )
        configs.append(list(itertools.product(range(k), repeat=len(segs))))
        column_rows.append((start, start + len(configs[c])))
        start += len(configs[c])

    # rows_with[c][s][color] -> rows of column c whose segment s takes color
    rows_with = []
    for c, segs in enumerate(segments):
        base = column_rows[c][0]
        table = [[[] for _ in range(k)] for _ in segs]
        for offset, config in enumerate(configs[c]):
            for s, color in enumerate(config):
                table[s][color].append(base + offset)
        rows_with.append(table)

    conflict_sets = [set() for _ in range(start)]
    for u, v in component.conflict_edges:
        (cu, su), (cv, sv) = locate[u], locate[v]
        for color in range(k):
            for a in rows_with[cu][su][color]:
                for b in rows_with[cv][sv][color]:
                    conflict_sets[a].add(b)
                    conflict_sets[b].add(a)

    rows = []
    for c in range(len(segments)):
        base = column_rows[c][0]
        for offset, config in enumerate(configs[c]):
            rows.append(
                CoverRow(
                    feature_column=c,
                    color_config=config,
                    stitch_cost=sum(config[a] != config[b] for a, b in inner_stitches[c]),
                    conflict_row_ids=tuple(sorted(conflict_sets[base + offset])),
                )
            )

    matrix = CoverMatrix(
        k=k,
        alpha=alpha,
        rows=tuple(rows),
        column_rows=tuple(column_rows),
        column_order=_bfs_order(len(segments), conflicts),
        column_vertices=tuple(tuple(s) for s in segments),
        column_conflicts=tuple(tuple(x) for x in conflicts),
        conflict_edges=tuple(component.conflict_edges),
        stitch_edges=tuple(component.stitch_edges),
        component_id=component.id,
    )
    logger.debug(f"Cover matrix for component {component.id}: {matrix.num_columns} columns, {len(rows)} rows")
    return matrix


def _bfs_order(num_columns: int, conflicts) -> tuple[int, ...]:
    feature_graph = nx.Graph()
    feature_graph.add_nodes_from(range(num_columns))
    feature_graph.add_edges_from((c, other) for c in range(num_columns) for _, other, _ in conflicts[c])
    order, seen = [], set()
    for root in range(num_columns):
        if root in seen:
            continue
        tree = [root] + [v for _, v in nx.bfs_edges(feature_graph, root, sort_neighbors=sorted)]
        order.extend(tree)
        seen.update(tree)
    return tuple(order)
