"""
Benchmark harness: decompose a seeded synthetic corpus with every engine
and tabulate time, stitches and conflicts per layout, followed by ratio
rows comparing each engine's total time with the sequential engine.
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd

from app.automation.corpus import GENERATOR_VERSION, generate_layout
from app.mpld.decomposer import decompose_layout
from app.mpld.layout_graph import build_layout_graph, insert_stitch_candidates, simplify_graph
from app.mpld.layout_io import Layout, ResultSinks, write_layout, write_results

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["name", "vertices", "edges", "engine", "workers", "time_s", "stitches", "conflicts", "cost"]
ORACLE_MAX_VERTICES = 10


def oracle_eligible(layout: Layout, stitch_cap: int = 2) -> bool:
    simplified = simplify_graph(insert_stitch_candidates(build_layout_graph(layout), stitch_cap))
    return all(len(c.vertices) <= ORACLE_MAX_VERTICES for c in simplified.components)


def build_corpus(sizes: Sequence[int], trials: int, seed: int, **layout_options) -> list[tuple[str, Layout]]:
    corpus = []
    for size in sizes:
        for trial in range(trials):
            # one independent stream per (size, trial)
            layout_seed = seed * 1_000_003 + size * 101 + trial
            corpus.append((f"bars-{size}-t{trial}", generate_layout(size, layout_seed, **layout_options)))
    return corpus


def run_benchmark(
    sizes: Sequence[int],
    trials: int = 1,
    seed: int = 0,
    workers: int = 4,
    engines: Sequence[str] = ("sequential", "parallel", "oracle"),
    record_time: bool = True,
    items_per_group: int = 32,
    stitch_cap: int = 2,
    node_budget: Optional[int] = None,
    out_dir: Optional[Union[str, Path]] = None,
    **layout_options,
) -> pd.DataFrame:
    rows = []
    for name, layout in build_corpus(sizes, trials, seed, **layout_options):
        if out_dir is not None:
            write_layout(layout, Path(out_dir) / f"{name}.lay")
        for engine in engines:
            if engine == "oracle" and not oracle_eligible(layout, stitch_cap):
                logger.info(f"Skipping oracle on {name}: components larger than {ORACLE_MAX_VERTICES} vertices")
                continue
            result = decompose_layout(
                layout,
                engine,
                workers if engine == "parallel" else 1,
                name=name,
                items_per_group=items_per_group,
                stitch_cap=stitch_cap,
                node_budget=node_budget,
                record_time=record_time,
            )
            stats = result.stats
            rows.append(
                {
                    "name": name,
                    "vertices": stats.vertices,
                    "edges": stats.edges,
                    "engine": engine,
                    "workers": stats.workers,
                    "time_s": stats.time_s,
                    "stitches": stats.stitches,
                    "conflicts": stats.conflicts,
                    "cost": stats.cost,
                }
            )
            if out_dir is not None:
                write_results(
                    layout,
                    result.solution,
                    stats,
                    ResultSinks(colored=Path(out_dir) / f"{name}.{engine}.colored"),
                    graph=result.graph,
                )
    frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    return pd.concat([frame, ratio_rows(frame)], ignore_index=True)


def ratio_rows(frame: pd.DataFrame) -> pd.DataFrame:
    """Total time per engine relative to the sequential engine on the same layouts"""
    rows = []
    baseline = frame[frame["engine"] == "sequential"].set_index("name")["time_s"]
    for engine in frame["engine"].drop_duplicates():
        part = frame[frame["engine"] == engine]
        base = baseline.reindex(part["name"]).sum()
        ratio = part["time_s"].sum() / base if base > 0 else 0.0
        rows.append(
            {
                "name": "ratio",
                "vertices": part["vertices"].sum(),
                "edges": part["edges"].sum(),
                "engine": engine,
                "workers": part["workers"].max(),
                "time_s": ratio,
                "stitches": part["stitches"].sum(),
                "conflicts": part["conflicts"].sum(),
                "cost": "",
            }
        )
    return pd.DataFrame(rows, columns=BENCH_COLUMNS)


def format_benchmark(frame: pd.DataFrame, seed: int) -> str:
    header = f"# seed={seed} generator={GENERATOR_VERSION}\n"
    return header + frame.to_csv(index=False, float_format="%.6f", lineterminator="\n")


def write_benchmark(frame: pd.DataFrame, seed: int, sink) -> None:
    text = format_benchmark(frame, seed)
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sink.write(text)
