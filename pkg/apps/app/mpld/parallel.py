"""
Component-parallel solving.

Components are independent, so each becomes one work item. Items are laid
out as ``group_id * items_per_group + slot`` and handed to a process pool
in that order; results are keyed by component id, so the outcome does not
depend on which worker finishes first.
"""
import logging
import multiprocessing
from dataclasses import dataclass
from typing import Optional, Sequence

from app.mpld.cover_matrix import CoverMatrix
from app.mpld.errors import ComponentSolveError, ParallelSolveError, ParameterError
from app.mpld.search import solve_matrix
from app.mpld.solution import Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WorkItem:
    component_id: int
    group_id: int
    slot: int


@dataclass(frozen=True)
class ParallelSchedule:
    work_items: tuple[WorkItem, ...]
    items_per_group: int = 32

    def work_index(self, item: WorkItem) -> int:
        return item.group_id * self.items_per_group + item.slot

    def ordered(self) -> list[WorkItem]:
        return sorted(self.work_items, key=self.work_index)

    @property
    def num_groups(self) -> int:
        return 1 + max((i.group_id for i in self.work_items), default=-1)


def make_schedule(num_components: int, items_per_group: int = 32) -> ParallelSchedule:
    if items_per_group < 1:
        raise ParameterError(f"items_per_group must be >= 1, got {items_per_group}")
    items = tuple(
        WorkItem(component_id=c, group_id=c // items_per_group, slot=c % items_per_group)
        for c in range(num_components)
    )
    return ParallelSchedule(work_items=items, items_per_group=items_per_group)


def _validate(schedule: ParallelSchedule, num_components: int) -> None:
    ids = sorted(i.component_id for i in schedule.work_items)
    if ids != list(range(num_components)):
        raise ParameterError("schedule must assign every component exactly once")
    for item in schedule.work_items:
        if not 0 <= item.slot < schedule.items_per_group or item.group_id < 0:
            raise ParameterError(f"work item {item} lies outside its group")
    indices = {schedule.work_index(i) for i in schedule.work_items}
    if len(indices) != len(schedule.work_items):
        raise ParameterError("schedule maps two components to the same work index")


def _solve_item(matrix: CoverMatrix, node_budget: Optional[int]) -> tuple[Solution, float]:
    return solve_matrix(matrix, "flat", node_budget=node_budget)


def solve_parallel_timed(
    matrices: Sequence[CoverMatrix],
    schedule: ParallelSchedule,
    workers: int,
    node_budget: Optional[int] = None,
) -> list[tuple[Solution, float]]:
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    _validate(schedule, len(matrices))
    ordered = schedule.ordered()
    results: list[Optional[tuple[Solution, float]]] = [None] * len(matrices)
    failures: list[ComponentSolveError] = []

    if workers == 1 or len(ordered) <= 1:
        for item in ordered:
            try:
                results[item.component_id] = _solve_item(matrices[item.component_id], node_budget)
            except Exception as e:
                failures.append(ComponentSolveError(item.component_id, e))
    else:
        logger.info(f"Solving {len(ordered)} component(s) on {workers} worker(s), {schedule.num_groups} group(s)")
        with multiprocessing.Pool(processes=workers) as pool:
            pending = [
                (item, pool.apply_async(_solve_item, (matrices[item.component_id], node_budget)))
                for item in ordered
            ]
            for item, handle in pending:
                try:
                    results[item.component_id] = handle.get()
                except Exception as e:
                    failures.append(ComponentSolveError(item.component_id, e))

    if failures:
        failures.sort(key=lambda f: f.component_id)
        for f in failures:
            logger.error(f"Component {f.component_id} failed: {f.cause!r}")
        raise ParallelSolveError(failures, [r[0] if r else None for r in results])
    return results


def solve_parallel(
    matrices: Sequence[CoverMatrix],
    schedule: ParallelSchedule,
    workers: int,
    node_budget: Optional[int] = None,
) -> list[Solution]:
    return [sol for sol, _ in solve_parallel_timed(matrices, schedule, workers, node_budget)]
