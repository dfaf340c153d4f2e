"""
End-to-end decomposition of a layout: build the graph, insert stitch
candidates, simplify, solve every component, recover hidden vertices and
check the result.
"""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from pydantic import BaseModel, Field

from app.mpld.cover_matrix import build_cover_matrix
from app.mpld.errors import InvariantViolationError, ParameterError, VerificationError
from app.mpld.layout_graph import (
    LayoutGraph,
    SimplifiedGraph,
    build_layout_graph,
    insert_stitch_candidates,
    recover_colors,
    simplify_graph,
    stitch_cut,
)
from app.mpld.layout_io import ColoredResult, Layout
from app.mpld.oracle import brute_force_oracle
from app.mpld.parallel import make_schedule, solve_parallel_timed
from app.mpld.search import solve_matrix
from app.mpld.solution import Solution, build_solution, score_assignment

logger = logging.getLogger(__name__)

ENGINES = ("sequential", "parallel", "oracle")


class ComponentStats(BaseModel):
    component_id: int
    vertices: int
    nodes_expanded: int
    time_s: float
    proven_optimal: bool


class DecompositionStats(BaseModel):
    name: str
    vertices: int
    edges: int
    time_s: float
    stitches: int
    conflicts: int
    engine: str = "sequential"
    workers: int = 1
    cost: str = "0"
    components: list[ComponentStats] = Field(default_factory=list)


class VerificationReport(BaseModel):
    violations: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class Decomposition:
    graph: LayoutGraph
    simplified: SimplifiedGraph
    solution: Solution
    stats: DecompositionStats


def evaluate_cost(colors: Mapping[int, int], graph: LayoutGraph) -> tuple[int, int, Fraction]:
    for v in graph.vertices:
        if v.id not in colors:
            raise InvariantViolationError(f"vertex {v.id} has no color")
        if not 0 <= colors[v.id] < graph.k:
            raise InvariantViolationError(f"vertex {v.id} has color {colors[v.id]} outside 0..{graph.k - 1}")
    conflicts, stitches, cost = score_assignment(colors, graph.conflict_edges, graph.stitch_edges, graph.alpha)
    return len(conflicts), len(stitches), cost


def verify_solution(solution: Solution, graph: LayoutGraph) -> VerificationReport:
    report = VerificationReport()
    for v in graph.vertices:
        color = solution.colors.get(v.id)
        if color is None:
            report.violations.append(f"vertex {v.id} has no color")
        elif not 0 <= color < graph.k:
            report.violations.append(f"vertex {v.id} has color {color} outside 0..{graph.k - 1}")
    extra = sorted(set(solution.colors) - {v.id for v in graph.vertices})
    if extra:
        report.violations.append(f"colors given for unknown vertices {extra}")
    if report.violations:
        return report

    conflicts, stitches, cost = score_assignment(
        solution.colors, graph.conflict_edges, graph.stitch_edges, graph.alpha
    )
    for e in sorted(set(conflicts) - set(solution.conflicts)):
        report.violations.append(f"conflict edge {e} has equal colors but is not listed")
    for e in sorted(set(solution.conflicts) - set(conflicts)):
        report.violations.append(f"listed conflict {e} is not a monochromatic conflict edge")
    for e in sorted(set(stitches) - set(solution.stitches)):
        report.violations.append(f"stitch edge {e} has differing colors but is not listed")
    for e in sorted(set(solution.stitches) - set(stitches)):
        report.violations.append(f"listed stitch {e} is not a bichromatic stitch edge")
    if solution.cost != cost:
        report.violations.append(f"stored cost {solution.cost} differs from recomputed cost {cost}")
    return report


def decompose_layout(
    layout: Layout,
    engine: str = "sequential",
    workers: int = 1,
    *,
    name: str = "layout",
    items_per_group: int = 32,
    stitch_cap: int = 2,
    node_budget: Optional[int] = None,
    record_time: bool = True,
) -> Decomposition:
    if engine not in ENGINES:
        raise ParameterError(f"unknown engine {engine!r}; expected one of {', '.join(ENGINES)}")
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    if items_per_group < 1:
        raise ParameterError(f"items_per_group must be >= 1, got {items_per_group}")
    if node_budget is not None and node_budget < 1:
        raise ParameterError(f"node_budget must be >= 1, got {node_budget}")

    base = build_layout_graph(layout)
    started = time.perf_counter()
    graph = insert_stitch_candidates(base, stitch_cap=stitch_cap)
    simplified = simplify_graph(graph)
    components = simplified.components

    if engine == "oracle":
        timed = []
        for component in components:
            t0 = time.perf_counter()
            sol = brute_force_oracle(component, layout.k, layout.alpha)
            timed.append((sol, time.perf_counter() - t0))
    else:
        matrices = [build_cover_matrix(c, layout.k, layout.alpha) for c in components]
        if engine == "parallel":
            schedule = make_schedule(len(matrices), items_per_group)
            timed = solve_parallel_timed(matrices, schedule, workers, node_budget)
        else:
            timed = [solve_matrix(m, "dancing_links", node_budget=node_budget) for m in matrices]

    solution = recover_colors(simplified, [sol for sol, _ in timed])
    elapsed = time.perf_counter() - started if record_time else 0.0

    report = verify_solution(solution, graph)
    if not report.ok:
        logger.error(f"Verification of {name} failed: {'; '.join(report.violations)}")
        raise VerificationError(report)

    stats = DecompositionStats(
        name=name,
        vertices=len(graph.vertices),
        edges=graph.num_edges,
        time_s=elapsed,
        stitches=len(solution.stitches),
        conflicts=len(solution.conflicts),
        engine=engine,
        workers=workers if engine == "parallel" else 1,
        cost=str(solution.cost),
        components=[
            ComponentStats(
                component_id=c.id,
                vertices=len(c.vertices),
                nodes_expanded=sol.nodes_expanded,
                time_s=seconds if record_time else 0.0,
                proven_optimal=sol.proven_optimal,
            )
            for c, (sol, seconds) in zip(components, timed)
        ],
    )
    logger.info(
        f"Decomposed {name}: {stats.vertices} vertices, {stats.edges} edges, {len(components)} component(s), "
        f"cn={stats.conflicts} st={stats.stitches} cost={solution.cost} in {elapsed:.3f}s ({engine})"
    )
    return Decomposition(graph=graph, simplified=simplified, solution=solution, stats=stats)


def decompose(
    layout: Layout,
    engine: str = "sequential",
    workers: int = 1,
    **options,
) -> tuple[Solution, DecompositionStats]:
    result = decompose_layout(layout, engine, workers, **options)
    return result.solution, result.stats


def verify_colored(layout: Layout, colored: ColoredResult, stitch_cap: int = 2) -> tuple[VerificationReport, Optional[Solution]]:
    """Check a colored-layout file against the graph its layout decomposes into.

    Masks are read back per segment, the conflict and stitch lists are
    recomputed from them and compared with the CONFLICT and STITCH lines.
    """
    graph = insert_stitch_candidates(build_layout_graph(layout), stitch_cap)
    report = VerificationReport()
    colors = {}
    for v in graph.vertices:
        mask = colored.segments.get((v.feature_id, v.segment_index))
        if mask is None and v.segment_index == 0:
            mask = colored.colors.get(v.feature_id)
        if mask is None:
            report.violations.append(f"no mask for rect {v.feature_id} segment {v.segment_index}")
        else:
            colors[v.id] = mask
    known = {v.feature_id for v in graph.vertices}
    report.violations.extend(f"COLOR line for unknown rect {rid}" for rid in sorted(set(colored.colors) - known))
    if not report.ok:
        return report, None
    for v in graph.vertices:
        if not 0 <= colors[v.id] < graph.k:
            report.violations.append(f"rect {v.feature_id} segment {v.segment_index} has mask {colors[v.id]} outside 0..{graph.k - 1}")
    if not report.ok:
        return report, None

    solution = build_solution(colors, graph.conflict_edges, graph.stitch_edges, graph.alpha)
    vertices = graph.vertices
    listed = sorted(tuple(sorted(e)) for e in colored.conflicts)
    actual = sorted(tuple(sorted((vertices[u].feature_id, vertices[v].feature_id))) for u, v in solution.conflicts)
    if listed != actual:
        report.violations.append(f"CONFLICT lines {listed} differ from recomputed {actual}")
    listed = sorted(colored.stitches)
    actual = sorted(
        (vertices[u].feature_id, stitch_cut(vertices[u].geometry, vertices[v].geometry)) for u, v in solution.stitches
    )
    if listed != actual:
        report.violations.append(f"STITCH lines {listed} differ from recomputed {actual}")
    return report, solution
