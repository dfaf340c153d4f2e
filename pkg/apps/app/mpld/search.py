"""
Exact branch-and-bound over a cover matrix.

One driver serves both cover states (dancing links and flat arrays); the
states only differ in how rows and columns are removed and restored. Costs
are kept as integers scaled by the denominator of alpha so that comparisons
are exact: a conflict weighs ``q`` and a stitch ``p`` for ``alpha = p/q``.

Rows still live in a column cost nothing in conflicts. Rows removed by an
earlier choice are still branched on, after the live ones, charged the
conflicts they create; this keeps the search exact when a column runs out
of live rows.
"""
import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Protocol

from app.mpld.cover_matrix import CoverMatrix
from app.mpld.dancing_links import DancingLinksState
from app.mpld.errors import InvariantViolationError
from app.mpld.flat_cover import FlatCoverState
from app.mpld.solution import Solution, build_solution

logger = logging.getLogger(__name__)

STATES = {
    "dancing_links": DancingLinksState,
    "flat": FlatCoverState,
}


class CoverState(Protocol):
    def select_column(self) -> Optional[int]: ...
    def live_rows(self, col: int) -> list[int]: ...
    def dead_rows(self, col: int) -> list[int]: ...
    def empty_columns(self) -> int: ...
    def cover_column(self, col: int, depth: int) -> None: ...
    def uncover_column(self, col: int, depth: int) -> None: ...
    def assign_row(self, row: int, depth: int) -> None: ...
    def undo_rows(self, depth: int) -> None: ...


class _BudgetExhausted(Exception):
    pass


@dataclass
class SearchResult:
    rows: list[int]
    scaled_cost: int
    nodes_expanded: int
    proven_optimal: bool
    conflict_candidates: list[tuple[int, int]] = field(default_factory=list)
    elapsed_s: float = 0.0


class CoverSearch:
    def __init__(self, matrix: CoverMatrix, state: CoverState, node_budget: Optional[int] = None, prune: bool = True):
        self.matrix = matrix
        self.state = state
        self.node_budget = node_budget
        self.prune = prune

        self.conflict_unit = matrix.alpha.denominator
        self.stitch_unit = matrix.alpha.numerator
        self.row_stitch = [r.stitch_cost * self.stitch_unit for r in matrix.rows]

        n = matrix.num_columns
        self.assigned = [-1] * n
        self.depth_column = [-1] * (n + 2)
        self.candidates: list[tuple[int, int]] = []
        self.nodes = 0
        self.best_cost: Optional[int] = None
        self.best_rows: Optional[list[int]] = None
        self.best_candidates: list[tuple[int, int]] = []

    def run(self) -> SearchResult:
        started = time.perf_counter()
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 4 * self.matrix.num_columns + 200))
        proven = True
        try:
            self._search(1, 0)
        except _BudgetExhausted:
            proven = False
            logger.warning(
                f"Component {self.matrix.component_id}: node budget {self.node_budget} exhausted; "
                f"returning best found (cost {self.best_cost}/{self.conflict_unit})"
            )
        finally:
            sys.setrecursionlimit(limit)
        if self.best_rows is None:
            raise InvariantViolationError(f"component {self.matrix.component_id}: search found no assignment")
        return SearchResult(
            rows=self.best_rows,
            scaled_cost=self.best_cost,
            nodes_expanded=self.nodes,
            proven_optimal=proven,
            conflict_candidates=sorted(set(self.best_candidates)),
            elapsed_s=time.perf_counter() - started,
        )

    # -- helpers -----------------------------------------------------------
    def _new_conflicts(self, col: int, row: int) -> int:
        config = self.matrix.rows[row].color_config
        rows = self.matrix.rows
        count = 0
        for a, other, b in self.matrix.column_conflicts[col]:
            chosen = self.assigned[other]
            if chosen >= 0 and config[a] == rows[chosen].color_config[b]:
                count += 1
        return count

    def _candidate(self, col: int, row: int, depth: int) -> tuple[int, int]:
        """Conflict edge between ``col`` and the deepest earlier choice that rules out ``row``"""
        config = self.matrix.rows[row].color_config
        for d in range(depth - 1, 0, -1):
            other = self.depth_column[d]
            chosen = self.matrix.rows[self.assigned[other]].color_config
            for a, c, b in self.matrix.column_conflicts[col]:
                if c == other and config[a] == chosen[b]:
                    u = self.matrix.column_vertices[col][a]
                    v = self.matrix.column_vertices[other][b]
                    return (min(u, v), max(u, v))
        raise InvariantViolationError(f"row {row} was removed without a conflicting choice")

    def _prefix_order(self) -> int:
        """-1 / 0 / 1: partial assignment is below, undecided against, or not below the best"""
        for col, row in enumerate(self.assigned):
            if row < 0:
                return 0
            best = self.best_rows[col]
            if row != best:
                return -1 if row < best else 1
        return 1

    def _can_prune(self, bound: int) -> bool:
        if not self.prune or self.best_cost is None:
            return False
        if bound != self.best_cost:
            return bound > self.best_cost
        return self._prefix_order() > 0

    def _record(self, cost: int) -> None:
        if (
            self.best_cost is None
            or cost < self.best_cost
            or (cost == self.best_cost and self.assigned < self.best_rows)
        ):
            self.best_cost = cost
            self.best_rows = list(self.assigned)
            self.best_candidates = list(self.candidates)

    # -- recursion ---------------------------------------------------------
    def _search(self, depth: int, cost: int) -> None:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget and self.best_rows is not None:
            raise _BudgetExhausted

        col = self.state.select_column()
        if col is None:
            self._record(cost)
            return
        if self._can_prune(cost + self.conflict_unit * self.state.empty_columns()):
            return

        branches = [(self.row_stitch[r], r, False) for r in self.state.live_rows(col)]
        branches.extend(
            sorted(
                (self.row_stitch[r] + self.conflict_unit * self._new_conflicts(col, r), r, True)
                for r in self.state.dead_rows(col)
            )
        )

        self.state.cover_column(col, depth)
        self.depth_column[depth] = col
        for step, row, dead in branches:
            if self.prune and self.best_cost is not None and cost + step > self.best_cost:
                continue
            if dead:
                self.candidates.append(self._candidate(col, row, depth))
            self.assigned[col] = row
            self.state.assign_row(row, depth)
            self._search(depth + 1, cost + step)
            self.state.undo_rows(depth)
            self.assigned[col] = -1
            if dead:
                self.candidates.pop()
        self.depth_column[depth] = -1
        self.state.uncover_column(col, depth)


def _to_solution(matrix: CoverMatrix, result: SearchResult) -> Solution:
    colors = {}
    for col, row in enumerate(result.rows):
        for vertex, color in zip(matrix.column_vertices[col], matrix.rows[row].color_config):
            colors[vertex] = color
    solution = build_solution(
        colors,
        matrix.conflict_edges,
        matrix.stitch_edges,
        matrix.alpha,
        proven_optimal=result.proven_optimal,
        nodes_expanded=result.nodes_expanded,
        conflict_candidates=result.conflict_candidates,
    )
    if solution.cost * matrix.alpha.denominator != result.scaled_cost:
        raise InvariantViolationError(
            f"component {matrix.component_id}: search cost {result.scaled_cost}/{matrix.alpha.denominator} "
            f"disagrees with evaluated cost {solution.cost}"
        )
    return solution


def solve_matrix(
    matrix: CoverMatrix,
    state: str = "dancing_links",
    node_budget: Optional[int] = None,
    prune: bool = True,
) -> tuple[Solution, float]:
    """Solve one component; returns the solution and the seconds spent searching"""
    search = CoverSearch(matrix, STATES[state](matrix), node_budget=node_budget, prune=prune)
    result = search.run()
    logger.debug(
        f"Component {matrix.component_id}: cost {result.scaled_cost}/{search.conflict_unit}, "
        f"{result.nodes_expanded} nodes, {result.elapsed_s:.4f}s"
    )
    return _to_solution(matrix, result), result.elapsed_s


def solve_sequential(matrix: CoverMatrix, node_budget: Optional[int] = None, prune: bool = True) -> Solution:
    return solve_matrix(matrix, "dancing_links", node_budget=node_budget, prune=prune)[0]


def solve_flat(matrix: CoverMatrix, node_budget: Optional[int] = None, prune: bool = True) -> Solution:
    return solve_matrix(matrix, "flat", node_budget=node_budget, prune=prune)[0]
