import io

import pandas as pd
import pytest

from app.automation.benchmark import (
    BENCH_COLUMNS,
    build_corpus,
    format_benchmark,
    oracle_eligible,
    ratio_rows,
    run_benchmark,
    write_benchmark,
)
from app.automation.corpus import FAMILIES, generate_layout, ladder_layout, place_blocks, stitchable_block
from app.mpld.layout_graph import build_layout_graph, simplify_graph


@pytest.mark.parametrize("size", [1, 17, 100])
def test_generated_layout_has_exact_size(size):
    layout = generate_layout(size, seed=3)
    assert len(layout.rects) == size
    assert sorted(r.id for r in layout.rects) == list(range(size))


def test_generation_is_seeded():
    assert generate_layout(60, seed=11) == generate_layout(60, seed=11)
    assert generate_layout(60, seed=11) != generate_layout(60, seed=12)


def test_generated_layouts_are_legal():
    for family in FAMILIES:
        layout = generate_layout(80, seed=1, families=(family,))
        build_layout_graph(layout)


def test_blocks_do_not_interact():
    layout = place_blocks([stitchable_block(None)] * 3, spacing_nm=120)
    graph = build_layout_graph(layout)
    # each block is a K4 on its own
    assert len(graph.conflict_edges) == 3 * 6
    assert all(u // 4 == v // 4 for u, v in graph.conflict_edges)


def test_ladders_form_one_component_each():
    layout = ladder_layout(num_ladders=5, length=4)
    simplified = simplify_graph(build_layout_graph(layout))
    assert len(simplified.components) == 5
    assert all(len(c.vertices) == 8 for c in simplified.components)


def test_chains_vanish_under_simplification():
    layout = generate_layout(40, seed=2, families=("chain",))
    assert simplify_graph(build_layout_graph(layout)).components == ()


def test_corpus_names_and_streams():
    corpus = build_corpus([10, 20], trials=2, seed=4)
    assert [name for name, _ in corpus] == ["bars-10-t0", "bars-10-t1", "bars-20-t0", "bars-20-t1"]
    assert corpus[0][1] != corpus[1][1]


def test_oracle_eligibility():
    assert oracle_eligible(generate_layout(20, seed=0, families=("clique",)))
    assert not oracle_eligible(ladder_layout(num_ladders=1, length=6))


def test_run_benchmark_rows():
    frame = run_benchmark([16], trials=1, seed=0, workers=2, record_time=False)
    assert list(frame.columns) == BENCH_COLUMNS
    data = frame[frame["name"] != "ratio"]
    assert set(data["engine"]) <= {"sequential", "parallel", "oracle"}
    assert {"sequential", "parallel"} <= set(data["engine"])
    # every engine reaches the same cost on the same layout
    assert data.groupby("name")["cost"].nunique().max() == 1
    ratios = frame[frame["name"] == "ratio"]
    assert list(ratios["engine"]) == list(data["engine"].drop_duplicates())


def test_ratio_rows_compare_with_sequential():
    frame = pd.DataFrame(
        [
            ["a", 4, 6, "sequential", 1, 2.0, 0, 1, "1"],
            ["a", 4, 6, "parallel", 4, 1.0, 0, 1, "1"],
            ["b", 2, 1, "sequential", 1, 2.0, 0, 0, "0"],
            ["b", 2, 1, "parallel", 4, 0.5, 0, 0, "0"],
        ],
        columns=BENCH_COLUMNS,
    )
    ratios = ratio_rows(frame).set_index("engine")
    assert ratios.loc["sequential", "time_s"] == 1.0
    assert ratios.loc["parallel", "time_s"] == 0.375
    assert ratios.loc["parallel", "workers"] == 4


def test_format_benchmark_header_and_floats():
    frame = pd.DataFrame([["a", 4, 6, "sequential", 1, 0.1234567, 0, 1, "1"]], columns=BENCH_COLUMNS)
    text = format_benchmark(frame, seed=9)
    assert text.splitlines() == [
        "# seed=9 generator=bar-blocks/1",
        ",".join(BENCH_COLUMNS),
        "a,4,6,sequential,1,0.123457,0,1,1",
    ]
    sink = io.StringIO()
    write_benchmark(frame, 9, sink)
    assert sink.getvalue() == text


def test_benchmark_out_dir(tmp_path):
    run_benchmark([8], engines=("sequential",), record_time=False, out_dir=tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["bars-8-t0.lay", "bars-8-t0.sequential.colored"]
