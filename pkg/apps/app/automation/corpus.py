"""
Seeded synthetic layouts.

Layouts are built from small blocks of bars whose conflict structure is
known in advance, placed far enough apart that blocks never interact:

- ``clique``: four squares in a 2x2 grid, a 4-clique no stitch can break
- ``stitchable``: a long bar, a tall bar and two pads forming a 4-clique
  that one stitch resolves
- ``ladder``: two rows of squares, a strip of overlapping 4-cliques
- ``chain``: a row of bars forming a path, removed entirely by simplification
- ``single``: an isolated square
"""
import logging
from typing import Callable, Optional

import numpy as np

from app.mpld.layout_io import Layout, Rect

logger = logging.getLogger(__name__)

GENERATOR_VERSION = "bar-blocks/1"
FAMILIES = ("clique", "stitchable", "ladder", "chain", "single")
ROW_WIDTH = 20000
SQUARE = 40
GAP = 60

Block = list[tuple[int, int, int, int]]


def clique_block(rng) -> Block:
    step = SQUARE + GAP
    return [(x, y, x + SQUARE, y + SQUARE) for y in (0, step) for x in (0, step)]


def stitchable_block(rng) -> Block:
    return [
        (0, 0, 400, 40),
        (100, 60, 140, 500),
        (144, 159, 184, 199),
        (216, 159, 256, 199),
    ]


def ladder_block(rng, length: Optional[int] = None) -> Block:
    if length is None:
        length = int(rng.integers(3, 8))
    step = SQUARE + GAP
    return [(i * step, y, i * step + SQUARE, y + SQUARE) for i in range(length) for y in (0, step)]


def chain_block(rng) -> Block:
    length = int(rng.integers(2, 7))
    pitch = SQUARE + GAP
    return [(i * pitch, 0, i * pitch + SQUARE, 200) for i in range(length)]


def single_block(rng) -> Block:
    return [(0, 0, SQUARE, SQUARE)]


BUILDERS: dict[str, Callable] = {
    "clique": clique_block,
    "stitchable": stitchable_block,
    "ladder": ladder_block,
    "chain": chain_block,
    "single": single_block,
}


def place_blocks(blocks: list[Block], spacing_nm: int, k: int = 3, alpha="0.1") -> Layout:
    """Lay blocks out row by row, at least ``2 * spacing_nm`` apart"""
    margin = 2 * spacing_nm
    rects = []
    x = y = row_height = 0
    for block in blocks:
        width = max(r[2] for r in block) - min(r[0] for r in block)
        height = max(r[3] for r in block) - min(r[1] for r in block)
        if x > 0 and x + width > ROW_WIDTH:
            x, y, row_height = 0, y + row_height + margin, 0
        ox, oy = min(r[0] for r in block), min(r[1] for r in block)
        for x_lo, y_lo, x_hi, y_hi in block:
            rects.append(
                Rect(id=len(rects), x_lo=x + x_lo - ox, y_lo=y + y_lo - oy, x_hi=x + x_hi - ox, y_hi=y + y_hi - oy)
            )
        x += width + margin
        row_height = max(row_height, height)
    return Layout(rects=rects, spacing_nm=spacing_nm, k=k, alpha=alpha)


def generate_layout(num_rects: int, seed: int, spacing_nm: int = 120, k: int = 3, alpha="0.1",
                    families: tuple[str, ...] = FAMILIES) -> Layout:
    rng = np.random.default_rng(seed)
    blocks: list[Block] = []
    remaining = num_rects
    while remaining > 0:
        family = families[int(rng.integers(len(families)))]
        block = BUILDERS[family](rng)
        if len(block) > remaining:
            block = single_block(rng)
        blocks.append(block)
        remaining -= len(block)
    layout = place_blocks(blocks, spacing_nm, k=k, alpha=alpha)
    logger.debug(f"Generated layout: {len(layout.rects)} rects in {len(blocks)} blocks (seed {seed})")
    return layout


def ladder_layout(num_ladders: int, length: int, spacing_nm: int = 120, k: int = 3, alpha="0.1") -> Layout:
    """Independent ladders of equal length, one component each"""
    return place_blocks([ladder_block(None, length) for _ in range(num_ladders)], spacing_nm, k=k, alpha=alpha)
