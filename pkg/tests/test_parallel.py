import dataclasses
import os
import time

import pytest

from app.automation.corpus import ladder_layout
from app.mpld import parallel
from app.mpld.cover_matrix import build_cover_matrix
from app.mpld.decomposer import decompose_layout
from app.mpld.errors import ParallelSolveError, ParameterError
from app.mpld.parallel import ParallelSchedule, WorkItem, make_schedule, solve_parallel
from app.mpld.search import solve_sequential
from conftest import random_component


@pytest.fixture
def matrices(rng):
    built = []
    for _ in range(7):
        graph, component = random_component(rng, max_vertices=7)
        built.append(build_cover_matrix(component, graph.k, graph.alpha))
    return built


def test_schedule_groups_components():
    schedule = make_schedule(5, items_per_group=2)
    assert [(i.component_id, i.group_id, i.slot) for i in schedule.ordered()] == [
        (0, 0, 0), (1, 0, 1), (2, 1, 0), (3, 1, 1), (4, 2, 0),
    ]
    assert schedule.num_groups == 3
    assert schedule.work_index(schedule.work_items[3]) == 3


def test_empty_schedule():
    schedule = make_schedule(0)
    assert schedule.num_groups == 0
    assert solve_parallel([], schedule, workers=2) == []


def test_schedule_rejects_bad_group_size():
    with pytest.raises(ParameterError):
        make_schedule(3, items_per_group=0)


def test_in_process_matches_sequential(matrices):
    expected = [solve_sequential(m) for m in matrices]
    found = solve_parallel(matrices, make_schedule(len(matrices), 3), workers=1)
    assert [s.colors for s in found] == [s.colors for s in expected]
    assert [s.cost for s in found] == [s.cost for s in expected]


def test_pool_matches_sequential(matrices):
    expected = [solve_sequential(m) for m in matrices]
    found = solve_parallel(matrices, make_schedule(len(matrices), 2), workers=2)
    assert [s.colors for s in found] == [s.colors for s in expected]


def test_result_does_not_depend_on_schedule(matrices):
    baseline = solve_parallel(matrices, make_schedule(len(matrices), 4), workers=1)
    reversed_items = tuple(
        WorkItem(component_id=c, group_id=i // 3, slot=i % 3)
        for i, c in enumerate(reversed(range(len(matrices))))
    )
    permuted = ParallelSchedule(work_items=reversed_items, items_per_group=3)
    assert [s.colors for s in solve_parallel(matrices, permuted, workers=2)] == [s.colors for s in baseline]


def test_schedule_must_cover_every_component(matrices):
    schedule = make_schedule(len(matrices) - 1, 4)
    with pytest.raises(ParameterError):
        solve_parallel(matrices, schedule, workers=1)


def test_schedule_rejects_colliding_slots(matrices):
    items = tuple(WorkItem(component_id=c, group_id=0, slot=0 if c < 2 else c) for c in range(len(matrices)))
    with pytest.raises(ParameterError):
        solve_parallel(matrices, ParallelSchedule(work_items=items, items_per_group=len(matrices)), workers=1)


def test_schedule_rejects_slot_outside_group(matrices):
    items = tuple(WorkItem(component_id=c, group_id=0, slot=c) for c in range(len(matrices)))
    with pytest.raises(ParameterError):
        solve_parallel(matrices, ParallelSchedule(work_items=items, items_per_group=2), workers=1)


def test_workers_must_be_positive(matrices):
    with pytest.raises(ParameterError):
        solve_parallel(matrices, make_schedule(len(matrices)), workers=0)


def test_failures_are_collected(monkeypatch, matrices):
    original = parallel._solve_item

    def flaky(matrix, node_budget):
        if matrix.component_id in (1, 4):
            raise RuntimeError("worker crashed")
        return original(matrix, node_budget)

    numbered = [dataclasses.replace(m, component_id=i) for i, m in enumerate(matrices)]
    monkeypatch.setattr(parallel, "_solve_item", flaky)
    with pytest.raises(ParallelSolveError) as err:
        solve_parallel(numbered, make_schedule(len(numbered), 2), workers=1)
    assert [f.component_id for f in err.value.failures] == [1, 4]
    assert err.value.results[1] is None
    assert err.value.results[0] is not None


@pytest.mark.slow
@pytest.mark.skipif((os.cpu_count() or 1) < 8, reason="needs at least 8 CPUs")
def test_parallel_engine_scales_on_many_components():
    layout = ladder_layout(num_ladders=128, length=12)

    started = time.perf_counter()
    single = decompose_layout(layout, "parallel", workers=1, items_per_group=8)
    single_s = time.perf_counter() - started

    started = time.perf_counter()
    pooled = decompose_layout(layout, "parallel", workers=8, items_per_group=8)
    pooled_s = time.perf_counter() - started

    assert len(pooled.simplified.components) >= 64
    assert pooled.solution.colors == single.solution.colors
    assert pooled.stats.workers == 8
    assert pooled_s / single_s <= 0.5
